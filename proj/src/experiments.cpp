#include "spectral_hull/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "spectral_hull/errors.hpp"

namespace spectral_hull {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::vector<CVec> random_unit_vectors(int dim, int count, std::uint64_t seed, Field field) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<CVec> out;
    out.reserve(static_cast<size_t>(count));
    for (int t = 0; t < count; ++t) {
        CVec x(dim);
        for (int i = 0; i < dim; ++i) {
            double re = g(rng);
            double im = g(rng);
            x(i) = cx(re, field == Field::Real ? 0.0 : im);
        }
        out.push_back(x / std::sqrt(norm2(x)));
    }
    return out;
}

VectorDefects vector_defects(const Sampling& s, const SpectralAtomMeasure& m, int count, std::uint64_t seed) {
    VectorDefects r;
    for (const auto& x : random_unit_vectors(s.dim, count, seed, s.field)) {
        EmbeddedVec u = embed(x, s, m);
        r.isometry = std::max(r.isometry, std::abs(norm2_mu(u, m) - norm2(x)));
        EmbeddedVec t = multiply(u, eigenvalue_multiplier(m));
        EmbeddedVec ua = embed(s.op.apply(x), s, m);
        r.intertwine = std::max(r.intertwine, std::sqrt(norm2_mu(EmbeddedVec{t.values - ua.values}, m)));
    }
    return r;
}

std::vector<Arc> default_arcs() { return {{0.0, 0.25}, {1.0 / 3.0, 0.5}, {0.9, 1.0}}; }

double arc_measure(const HullSpace& h, const std::vector<ChartPoint>& chart, const Arc& arc) {
    CompensatedSum<double> w;
    for (const auto& p : chart)
        if (p.valid && p.coordinate >= arc.a && p.coordinate < arc.b) w.add(h.clusters[p.cluster].weight);
    return w.value();
}

double circle_chart_defect(const HullSpace& h, const std::vector<ChartPoint>& chart, const SpectralAtomMeasure& m) {
    double worst = 0;
    for (int k = 0; k < m.size(); ++k) {
        double t = chart.at(h.cluster_of[k]).coordinate;
        worst = std::max(worst, std::abs(m.lambda[k] - std::cos(2 * kPi * t)));
    }
    return worst;
}

double atom_omega(const Sampling& s, int k) {
    if (s.provenance.builder != "diff") throw ValidationError("expected a diff sampling");
    const int n = s.provenance.params.at("N").get<int>();
    return static_cast<double>(k - n * n) / n;
}

double g0_integral(double a, double b) {
    const double r = kPi / std::sqrt(2.0);
    return 0.5 * (std::erf(r * b) - std::erf(r * a));
}

double g0_atom_mass(const Sampling& s, const SpectralAtomMeasure& m, double a, double b) {
    CompensatedSum<double> w;
    for (int k = 0; k < m.size(); ++k) {
        double om = atom_omega(s, k);
        if (om >= a && om < b) w.add(m.mu[k]);
    }
    return w.value();
}

LineChartDefect line_chart_defect(const Sampling& s, const SpectralAtomMeasure& m, double omega_max) {
    const int n = s.provenance.params.at("N").get<int>();
    LineChartDefect r;
    r.max_excess = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < m.size(); ++k) {
        double om = atom_omega(s, k);
        if (std::abs(om) > omega_max) continue;
        double d = std::abs(m.lambda[k] - kPi * om);
        double bound = std::pow(kPi * std::abs(om), 3) / (6.0 * n * n) + 1e-12;
        r.max_defect = std::max(r.max_defect, d);
        r.max_excess = std::max(r.max_excess, d - bound);
    }
    return r;
}

double multiplier_at(const Sampling& s, const SpectralAtomMeasure& m, double omega) {
    const int n = s.provenance.params.at("N").get<int>();
    long long k = std::llround(omega * n) + static_cast<long long>(n) * n;
    if (k < 0 || k >= m.size()) throw ValidationError("omega outside the grid");
    return m.lambda[static_cast<size_t>(k)];
}

GridFunction scale_grid_function(const Sampling& s, const Scale& sc, int j) {
    const int n = s.provenance.params.at("N").get<int>();
    const long long n1 = s.provenance.params.at("N1").get<long long>();
    return GridFunction::from_coords(n, n1, sc.vectors.at(static_cast<size_t>(j)).dense());
}

GridFunction gaussian_grid_function(const Sampling& s) {
    const int n = s.provenance.params.at("N").get<int>();
    const long long n1 = s.provenance.params.at("N1").get<long long>();
    return GridFunction::sample(n, n1, [](double x) { return cx(reference_gaussian(x), 0); });
}

PVMDefects standard_pvm_defects(const Sampling& s, const SpectralAtomMeasure& m, std::uint64_t seed) {
    double lo = *std::min_element(s.eigenvalues.begin(), s.eigenvalues.end());
    double hi = *std::max_element(s.eigenvalues.begin(), s.eigenvalues.end());
    double w = std::max(hi - lo, 1.0);
    IntervalSet v1 = IntervalSet::single(lo + 0.2 * w, lo + 0.7 * w);
    IntervalSet v2 = IntervalSet::single(lo + 0.45 * w, hi + 1).unite(IntervalSet::single(lo - 1, lo + 0.1 * w));
    return pvm_algebra_check(v1, v2, s, m, seed);
}

double resolution_defect(const Sampling& s, const SpectralAtomMeasure& m) {
    DenseOp p = integrate_step_function(eigenvalue_partition(s), s, m);
    return (p.entries - s.op.to_dense()).cwiseAbs().maxCoeff();
}

PseudometricSuite pseudometric_suite(const PseudoMetric& d, int triples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, d.size() - 1);
    PseudometricSuite r;
    r.triangle_slack = std::numeric_limits<double>::infinity();
    for (int t = 0; t < triples; ++t) {
        int a = pick(rng), b = pick(rng), c = pick(rng);
        double ab = d(a, b), ba = d(b, a), bc = d(b, c), ac = d(a, c);
        r.symmetry = std::max(r.symmetry, std::abs(ab - ba));
        r.triangle_slack = std::min(r.triangle_slack, ab + bc - ac);
        r.max_distance = std::max({r.max_distance, ab, bc, ac});
        r.zero_diagonal = std::max(r.zero_diagonal, d(a, a));
        ++r.triples;
    }
    return r;
}

}  // namespace spectral_hull
