#include "spectral_hull/fourier_bridge.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "spectral_hull/errors.hpp"
#include "spectral_hull/serialize.hpp"

namespace spectral_hull {

namespace {

constexpr double kPi = 3.14159265358979323846;

int grid_n(const Sampling& s) {
    if (s.provenance.builder != "diff") throw ValidationError("expected a diff sampling");
    return s.provenance.params.at("N").get<int>();
}

void check_grid(const GridFunction& h, const Sampling& s) {
    int n = grid_n(s);
    if (h.n != n || static_cast<int>(h.values.size()) != s.dim)
        throw ValidationError("grid function N does not match the sampling (" + std::to_string(h.n) + " vs " +
                              std::to_string(n) + ")");
}

// 5-point Gauss-Legendre on [-1, 1]
constexpr std::array<double, 5> kGlX = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                        0.9061798459386640};
constexpr std::array<double, 5> kGlW = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                        0.4786286704993665, 0.2369268850561891};

template <class F>
double gauss(double a, double b, int pieces, F&& g) {
    CompensatedSum<double> acc;
    const double h = (b - a) / pieces;
    for (int i = 0; i < pieces; ++i) {
        double lo = a + i * h, mid = lo + 0.5 * h;
        for (size_t t = 0; t < kGlX.size(); ++t) acc.add(kGlW[t] * 0.5 * h * g(mid + 0.5 * h * kGlX[t]));
    }
    return acc.value();
}

}  // namespace

// ------------------------------------------------------------- GridFunction

GridFunction GridFunction::sample(int n, long long n1, const std::function<cx(double)>& f, double r) {
    GridFunction g = zero(n, n1);
    const long long half = static_cast<long long>(n) * n;
    for (long long l = -half; l < half; ++l) g.values[static_cast<size_t>(l + half)] = f((l + r) / n);
    return g;
}

GridFunction GridFunction::zero(int n, long long n1) {
    if (n < 1) throw ValidationError("grid N must be positive");
    GridFunction g;
    g.n = n;
    g.n1 = n1;
    g.values.assign(static_cast<size_t>(2) * n * n, cx(0, 0));
    return g;
}

CVec GridFunction::coords() const {
    CVec c(static_cast<Eigen::Index>(values.size()));
    const double s = 1.0 / std::sqrt(static_cast<double>(n));
    for (size_t i = 0; i < values.size(); ++i) c(static_cast<Eigen::Index>(i)) = values[i] * s;
    return c;
}

GridFunction GridFunction::from_coords(int n, long long n1, const CVec& c) {
    GridFunction g = zero(n, n1);
    if (static_cast<size_t>(c.size()) != g.values.size()) throw ValidationError("coordinate vector has wrong size");
    const double s = std::sqrt(static_cast<double>(n));
    for (size_t i = 0; i < g.values.size(); ++i) g.values[i] = c(static_cast<Eigen::Index>(i)) * s;
    return g;
}

double GridFunction::l1() const {
    CompensatedSum<double> acc;
    for (const auto& v : values) acc.add(std::abs(v));
    return acc.value() / n;
}

double GridFunction::l2() const {
    CompensatedSum<double> acc;
    for (const auto& v : values) acc.add(std::norm(v));
    return std::sqrt(acc.value() / n);
}

json GridFunction::to_json() const {
    std::vector<double> raw;
    raw.reserve(values.size() * 2);
    for (const auto& v : values) {
        raw.push_back(v.real());
        raw.push_back(v.imag());
    }
    return {{"N", n}, {"N1", n1}, {"layout", "interleaved re,im; cell l at index l + N^2"},
            {"values", base64_encode_doubles(raw)}};
}

GridFunction GridFunction::from_json(const json& j) {
    GridFunction g = zero(j.at("N").get<int>(), j.at("N1").get<long long>());
    std::vector<double> raw = base64_decode_doubles(j.at("values").get<std::string>());
    if (raw.size() != g.values.size() * 2) throw ValidationError("grid function JSON has the wrong number of values");
    for (size_t i = 0; i < g.values.size(); ++i) g.values[i] = cx(raw[2 * i], raw[2 * i + 1]);
    return g;
}

GridFunction central_difference(const GridFunction& h) {
    GridFunction d = GridFunction::zero(h.n, h.n1);
    const long long m = static_cast<long long>(h.values.size());
    for (long long i = 0; i < m; ++i) {
        cx up = h.values[static_cast<size_t>((i + 1) % m)];
        cx dn = h.values[static_cast<size_t>((i - 1 + m) % m)];
        d.values[static_cast<size_t>(i)] = (up - dn) * (0.5 * h.n);
    }
    return d;
}

// ---------------------------------------------------------------- references

double reference_gaussian(double x) { return std::pow(2.0 / kPi, 0.25) * std::exp(-x * x); }

double g0(double omega) { return std::sqrt(kPi / 2) * std::exp(-kPi * kPi * omega * omega / 2); }

double gaussian_reference(double omega) { return std::pow(2 * kPi, 0.25) * std::exp(-kPi * kPi * omega * omega / 4); }

// ----------------------------------------------------------- Fourier series

double fourier_series_check(const Sampling& s, const SpectralAtomMeasure& m) {
    if (s.provenance.builder != "shift") throw ValidationError("fourier_series_check requires a shift sampling");
    const int n = s.dim;
    const int half = (n - 1) / 2;
    const int lmax = std::min(3, half);
    double worst = 0;
    for (int l = -lmax; l <= lmax; ++l) {
        CVec g = CVec::Zero(n);
        g(l + half) = 1.0;
        EmbeddedVec u = embed(g, s, m);
        for (int i = 0; i < n; ++i) {
            int k = i - half;
            // exact phase from the reduced integer l k mod N
            long long r = ((static_cast<long long>(l) * k) % n + n) % n;
            cx ref = std::polar(1.0, 2 * kPi * static_cast<double>(r) / n);
            worst = std::max(worst, std::abs(u.values(i) - ref));
        }
    }
    return worst;
}

double fourier_series_check(int n) {
    auto built = build_shift_sampling(n);
    auto m = atom_measure(built.sampling, built.scale);
    return fourier_series_check(built.sampling, m);
}

// --------------------------------------------------------- Fourier transform

TransformTable fourier_transform(const GridFunction& h, const Sampling& s, const SpectralAtomMeasure& m,
                                 double omega_max, double table_range) {
    check_grid(h, s);
    const int n = h.n;
    const int half = n * n;
    EmbeddedVec u = embed(h.coords(), s, m);
    TransformTable t;
    t.omega_max = omega_max;
    for (int i = 0; i < s.dim; ++i) {
        double om = static_cast<double>(i - half) / n;
        if (std::abs(om) > table_range) continue;
        TransformRow r;
        r.atom = i;
        r.omega = om;
        r.u = u.values(i);
        r.f = r.u * gaussian_reference(om);
        r.reliable = std::abs(om) <= omega_max;
        t.rows.push_back(r);
    }
    return t;
}

RecoveryError recovery_error(const TransformTable& t, const std::function<cx(double)>& reference,
                             double omega_limit) {
    RecoveryError e;
    double refmax = 0, errmax = 0;
    for (const auto& r : t.rows) {
        if (std::abs(r.omega) > omega_limit) continue;
        cx ref = reference(r.omega);
        double err = std::abs(r.f - ref);
        refmax = std::max(refmax, std::abs(ref));
        errmax = std::max(errmax, err);
        e.pointwise_rel = std::max(e.pointwise_rel, err / std::abs(ref));
        if (std::abs(r.f) > 0) e.phase = std::max(e.phase, std::abs(r.f / std::abs(r.f) - ref / std::abs(ref)));
    }
    e.sup_rel = refmax > 0 ? errmax / refmax : 0;
    return e;
}

double scale_phase_defect(const Sampling& s, const Scale& sc, double omega_limit) {
    const int n = grid_n(s);
    const int half = n * n;
    CVec c = s.basis.coefficients(sc.vectors.at(0));
    double worst = 0;
    for (int i = 0; i < s.dim; ++i) {
        double om = static_cast<double>(i - half) / n;
        if (std::abs(om) > omega_limit) continue;
        // (f_k, e~) is the conjugate of <e~, f_k>
        cx v = std::conj(c(i));
        worst = std::max(worst, std::abs(v / std::abs(v) - 1.0));
    }
    return worst;
}

PlancherelReport plancherel_check(const GridFunction& h, const Sampling& s, const SpectralAtomMeasure& m,
                                  double omega_max) {
    check_grid(h, s);
    PlancherelReport r;
    CVec hc = h.coords();
    r.norm2 = norm2(hc);
    EmbeddedVec u = embed(hc, s, m);
    r.exact_defect = std::abs(norm2_mu(u, m) - r.norm2);
    TransformTable t = fourier_transform(h, s, m, omega_max, omega_max);
    CompensatedSum<double> q;
    // d(omega / 2) = 1 / (2N)
    for (const auto& row : t.rows)
        if (row.reliable) q.add(std::norm(row.f) / (2.0 * h.n));
    r.quadrature = q.value();
    r.quadrature_rel = r.norm2 > 0 ? std::abs(r.quadrature - r.norm2) / r.norm2 : std::abs(r.quadrature);
    return r;
}

DifferentiationReport differentiation_check(const GridFunction& h, const GridFunction& hprime, const Sampling& s,
                                            const SpectralAtomMeasure& m, double omega_max) {
    check_grid(h, s);
    check_grid(hprime, s);
    const int half = h.n * h.n;
    CVec d = hprime.coords() * cx(0, -1);
    EmbeddedVec ud = embed(d, s, m);
    EmbeddedVec uh = embed(h.coords(), s, m);
    DifferentiationReport r;
    for (int i = 0; i < s.dim; ++i) {
        double om = static_cast<double>(i - half) / h.n;
        if (std::abs(om) > omega_max) continue;
        r.max_defect = std::max(r.max_defect, std::abs(ud.values(i) - m.lambda[i] * uh.values(i)));
    }
    r.constant = r.max_defect * h.n;
    return r;
}

// ---------------------------------------------------- staircase convergence

StaircaseError staircase_lp_error(const std::function<double(double)>& f, int p, int n, long long n1, int r,
                                  int refine, double tail_extent) {
    if (p != 1 && p != 2) throw ValidationError("staircase_lp_error: p must be 1 or 2");
    if (n < 1 || n1 < 0) throw ValidationError("staircase_lp_error: need N >= 1 and N1 >= 0");
    if (refine < 8) throw ValidationError("staircase_lp_error: refinement must be at least 8 per cell");
    auto pw = [p](double x) { return p == 1 ? std::abs(x) : x * x; };
    CompensatedSum<double> inside;
    for (long long k = -n1; k <= n1; ++k) {
        const double a = static_cast<double>(k) / n, b = static_cast<double>(k + 1) / n;
        const double v = f(static_cast<double>(k + r) / n);
        inside.add(gauss(a, b, refine, [&](double x) { return pw(f(x) - v); }));
    }
    const double lo = static_cast<double>(-n1) / n, hi = static_cast<double>(n1 + 1) / n;
    const int pieces = std::max(1, static_cast<int>(std::ceil(tail_extent * n))) * refine;
    double tail = gauss(lo - tail_extent, lo, pieces, [&](double x) { return pw(f(x)); }) +
                  gauss(hi, hi + tail_extent, pieces, [&](double x) { return pw(f(x)); });
    StaircaseError e;
    const double ip = 1.0 / p;
    e.inside = std::pow(inside.value(), ip);
    e.tail = std::pow(tail, ip);
    e.total = std::pow(inside.value() + tail, ip);
    return e;
}

}  // namespace spectral_hull
