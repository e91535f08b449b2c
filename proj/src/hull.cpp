#include "spectral_hull/hull.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "spectral_hull/errors.hpp"
#include "spectral_hull/parallel.hpp"

namespace spectral_hull {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct UnionFind {
    std::vector<int> p;
    explicit UnionFind(int n) : p(static_cast<size_t>(n)) { std::iota(p.begin(), p.end(), 0); }
    int find(int x) {
        while (p[x] != x) x = p[x] = p[p[x]];
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a > b) std::swap(a, b);
        p[b] = a;
    }
};

}  // namespace

// ------------------------------------------------------------- PseudoMetric

PseudoMetric::PseudoMetric(const Scale& sc, const SpectralAtomMeasure& m) {
    n_ = m.size();
    j_ = m.stored_rows();
    tail_ = m.tail_bound;
    w_.resize(static_cast<size_t>(j_));
    u_.resize(static_cast<size_t>(n_) * j_);
    for (int j = 0; j < j_; ++j) {
        double c = sc.weights[j];
        w_[j] = std::pow(c, 1.5) * sc.vectors[j].norm2();
        for (int k = 0; k < n_; ++k) {
            cx v = m.scale_embedded[j](k);
            u_[static_cast<size_t>(k) * j_ + j] = v;
            max_term_ = std::max(max_term_, c * std::norm(v));
        }
    }
    if (max_term_ > 1 + 1e-12) throw NumericalError("pseudometric: c_j |U(e_j)|^2 exceeds 1");
}

double PseudoMetric::operator()(int a, int b) const {
    if (!dense_.empty()) return dense_[static_cast<size_t>(a) * n_ + b];
    return partial(a, b, j_);
}

double PseudoMetric::partial(int a, int b, int jmax) const {
    const cx* ua = &u_[static_cast<size_t>(a) * j_];
    const cx* ub = &u_[static_cast<size_t>(b) * j_];
    double s = 0;
    for (int j = 0; j < std::min(jmax, j_); ++j) s += w_[j] * std::abs(ua[j] - ub[j]);
    return s;
}

bool PseudoMetric::closer_than(int a, int b, double eps) const {
    if (!dense_.empty()) return dense_[static_cast<size_t>(a) * n_ + b] < eps;
    const cx* ua = &u_[static_cast<size_t>(a) * j_];
    const cx* ub = &u_[static_cast<size_t>(b) * j_];
    double s = 0;
    for (int j = 0; j < j_; ++j) {
        s += w_[j] * std::abs(ua[j] - ub[j]);
        if (s >= eps) return false;  // terms are non-negative
    }
    return s < eps;
}

void PseudoMetric::cache() {
    if (n_ > 2048) throw ValidationError("pseudometric: dense cache limited to 2048 atoms");
    std::vector<double> d(static_cast<size_t>(n_) * n_);
    parallel_for(0, n_, [&](std::ptrdiff_t a) {
        for (int b = 0; b < n_; ++b) d[static_cast<size_t>(a) * n_ + b] = partial(static_cast<int>(a), b, j_);
    });
    dense_ = std::move(d);
}

// --------------------------------------------------------------------- hull

HullSpace build_hull(const PseudoMetric& d, const SpectralAtomMeasure& m, const MultiplierFn& f, double epsilon,
                     int j0) {
    if (!(epsilon > 0)) throw ValidationError("build_hull: epsilon must be positive");
    const int n = d.size();
    if (m.size() != n || static_cast<int>(f.values.size()) != n)
        throw ValidationError("build_hull: metric, measure and multiplier differ in size");
    std::vector<std::vector<int>> edges(static_cast<size_t>(n));
    parallel_for(0, n, [&](std::ptrdiff_t a) {
        for (int b = static_cast<int>(a) + 1; b < n; ++b)
            if (d.closer_than(static_cast<int>(a), b, epsilon)) edges[a].push_back(b);
    });
    UnionFind uf(n);
    for (int a = 0; a < n; ++a)
        for (int b : edges[a]) uf.unite(a, b);

    HullSpace h;
    h.epsilon = epsilon;
    h.j0 = std::min(j0, m.stored_rows());
    h.cluster_of.assign(static_cast<size_t>(n), -1);
    std::vector<int> root_to_cluster(static_cast<size_t>(n), -1);
    for (int a = 0; a < n; ++a) {
        int r = uf.find(a);
        if (root_to_cluster[r] < 0) {
            root_to_cluster[r] = static_cast<int>(h.clusters.size());
            h.clusters.emplace_back();
        }
        int c = root_to_cluster[r];
        h.cluster_of[a] = c;
        h.clusters[c].members.push_back(a);
    }
    for (auto& c : h.clusters) {
        CompensatedSum<double> w, wm;
        std::vector<CompensatedSum<cx>> wc(static_cast<size_t>(h.j0));
        for (int k : c.members) {
            w.add(m.mu[k]);
            wm.add(m.mu[k] * f.values[k]);
            for (int j = 0; j < h.j0; ++j) wc[j].add(m.mu[k] * m.scale_embedded[j](k));
        }
        c.weight = w.value();
        c.m = wm.value() / c.weight;
        c.coords.resize(static_cast<size_t>(h.j0));
        c.degenerate = true;
        for (int j = 0; j < h.j0; ++j) {
            c.coords[j] = wc[j].value() / c.weight;
            if (std::abs(c.coords[j]) > 1e-12) c.degenerate = false;
        }
    }
    return h;
}

std::vector<cx> hull_coordinate_functions(const HullSpace& h, int j) {
    if (j < 0 || j >= h.j0) throw ValidationError("hull coordinate index out of range");
    std::vector<cx> out;
    out.reserve(h.clusters.size());
    for (const auto& c : h.clusters) out.push_back(c.coords[j]);
    return out;
}

LipschitzReport lipschitz_check(const HullSpace& h, const PseudoMetric& d, const Scale& sc, int j, long long max_pairs,
                                std::uint64_t seed) {
    if (j < 0 || j >= h.j0) throw ValidationError("hull coordinate index out of range");
    const double cj = 1.0 / (std::pow(sc.weights[j], 1.5) * sc.vectors[j].norm2());
    const long long nc = static_cast<long long>(h.clusters.size());
    LipschitzReport r;
    r.max_violation = -std::numeric_limits<double>::infinity();
    auto check = [&](long long p, long long q) {
        const auto& cp = h.clusters[p];
        const auto& cq = h.clusters[q];
        double slack = h.epsilon * std::max<double>(2.0, static_cast<double>(cp.members.size() + cq.members.size()) - 2);
        double lhs = std::abs(cp.coords[j] - cq.coords[j]);
        double rhs = cj * (d(cp.members[0], cq.members[0]) + slack);
        r.max_violation = std::max(r.max_violation, lhs - rhs);
        ++r.pairs;
    };
    if (nc * (nc - 1) / 2 <= max_pairs) {
        for (long long p = 0; p < nc; ++p)
            for (long long q = p + 1; q < nc; ++q) check(p, q);
    } else {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<long long> pick(0, nc - 1);
        for (long long t = 0; t < max_pairs; ++t) {
            long long p = pick(rng), q = pick(rng);
            if (p != q) check(p, q);
        }
    }
    if (r.pairs == 0) r.max_violation = 0;
    return r;
}

std::vector<double> pushforward_multiplier_via_partition(const HullSpace& h, const SpectralAtomMeasure& m,
                                                         const Scale& sc, const Sampling& s) {
    std::vector<double> out(h.clusters.size());
    std::vector<CVec> ae(static_cast<size_t>(h.j0));  // U(A~ e_j), computed on demand
    for (size_t ci = 0; ci < h.clusters.size(); ++ci) {
        const auto& c = h.clusters[ci];
        int jsel = -1;
        for (int j = 0; j < h.j0; ++j)
            if (std::abs(c.coords[j]) > 1e-12) {
                jsel = j;
                break;
            }
        if (jsel < 0)
            throw ValidationError("partition multiplier: cluster " + std::to_string(ci) +
                                  " is not covered by any nonzero coordinate");
        if (ae[jsel].size() == 0) ae[jsel] = embed(s.op.apply(sc.vectors[jsel].dense()), s, m).values;
        CompensatedSum<cx> num;
        for (int k : c.members) num.add(m.mu[k] * ae[jsel](k));
        cx ua = num.value() / c.weight;
        out[ci] = (ua / c.coords[jsel]).real();
    }
    return out;
}

double partition_tolerance(const HullSpace& h, const Scale& sc, const SpectralAtomMeasure& m) {
    double cmax = 0;
    for (int j = 0; j < h.j0; ++j) cmax = std::max(cmax, 1.0 / (std::pow(sc.weights[j], 1.5) * sc.vectors[j].norm2()));
    double lmax = 0;
    for (double l : m.lambda) lmax = std::max(lmax, std::abs(l));
    return h.epsilon * cmax * (1 + lmax);
}

// -------------------------------------------------------------------- charts

std::vector<ChartPoint> chart_circle(const HullSpace& h, const Sampling& s) {
    if (s.provenance.builder != "shift") throw ValidationError("chart_circle requires a shift sampling");
    // the g_1 vector sits at scale position 1 of the interleaved order
    const auto& order = s.provenance.params.at("order");
    if (order.size() < 2 || order[1].get<int>() != 1 || h.j0 < 2)
        throw ValidationError("chart_circle: g_1 coordinate not available");
    std::vector<ChartPoint> out;
    for (size_t ci = 0; ci < h.clusters.size(); ++ci) {
        const auto& c = h.clusters[ci];
        ChartPoint p;
        p.label = ChartPoint::Label::Circle;
        p.cluster = static_cast<int>(ci);
        p.valid = !c.degenerate;
        cx u = c.coords[1];
        p.modulus = std::abs(u);
        p.coherent = std::abs(p.modulus - 1.0) <= 1e-6;
        double t = std::arg(u) / (2 * kPi);
        if (t < 0) t += 1.0;
        if (t >= 1.0) t -= 1.0;
        p.coordinate = t;
        out.push_back(p);
    }
    return out;
}

std::vector<ChartPoint> chart_line(const HullSpace& h, const Sampling& s, const SpectralAtomMeasure& m,
                                   double spread_tol) {
    if (s.provenance.builder != "diff") throw ValidationError("chart_line requires a diff sampling");
    const int n = s.provenance.params.at("N").get<int>();
    const int half = n * n;
    std::vector<ChartPoint> out;
    for (size_t ci = 0; ci < h.clusters.size(); ++ci) {
        const auto& c = h.clusters[ci];
        CompensatedSum<double> w;
        double lo = 1e300, hi = -1e300;
        for (int k : c.members) {
            double om = static_cast<double>(k - half) / n;
            w.add(m.mu[k] * om);
            lo = std::min(lo, om);
            hi = std::max(hi, om);
        }
        if (hi - lo > spread_tol)
            throw ValidationError("chart_line: cluster " + std::to_string(ci) + " is chart-incoherent (spread " +
                                  std::to_string(hi - lo) + ")");
        ChartPoint p;
        p.label = ChartPoint::Label::Line;
        p.cluster = static_cast<int>(ci);
        p.valid = !c.degenerate;
        p.coordinate = w.value() / c.weight;
        out.push_back(p);
    }
    return out;
}

int covering_number(const PseudoMetric& d, double epsilon) {
    if (!(epsilon > 0)) throw ValidationError("covering_number: epsilon must be positive");
    std::vector<int> centers;
    for (int a = 0; a < d.size(); ++a) {
        bool covered = false;
        for (int c : centers)
            if (d.closer_than(a, c, epsilon)) {
                covered = true;
                break;
            }
        if (!covered) centers.push_back(a);
    }
    return static_cast<int>(centers.size());
}

}  // namespace spectral_hull
