#include "spectral_hull/resolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "spectral_hull/errors.hpp"

namespace spectral_hull {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

json bound_to_json(double x) {
    if (x == kInf) return "inf";
    if (x == -kInf) return "-inf";
    return x;
}

double bound_from_json(const json& j) {
    if (j.is_string()) {
        auto s = j.get<std::string>();
        if (s == "inf") return kInf;
        if (s == "-inf") return -kInf;
        throw ValidationError("interval bound must be a number, \"inf\" or \"-inf\"");
    }
    return j.get<double>();
}

std::vector<int> atoms_in(const IntervalSet& v, const Sampling& s) {
    std::vector<int> out;
    for (int k = 0; k < s.dim; ++k)
        if (v.contains(s.eigenvalues[k])) out.push_back(k);
    return out;
}

CMat projector_from(const std::vector<int>& atoms, const CMat& f) {
    CMat fv(f.rows(), static_cast<Eigen::Index>(atoms.size()));
    for (size_t t = 0; t < atoms.size(); ++t) fv.col(static_cast<Eigen::Index>(t)) = f.col(atoms[t]);
    return fv * fv.adjoint();
}

}  // namespace

// -------------------------------------------------------------- IntervalSet

IntervalSet::IntervalSet(std::vector<Interval> iv) {
    for (const auto& x : iv)
        if (std::isnan(x.a) || std::isnan(x.b) || !(x.a < x.b))
            throw ValidationError("malformed interval: need a < b");
    std::sort(iv.begin(), iv.end(), [](const Interval& p, const Interval& q) { return p.a < q.a; });
    for (const auto& x : iv) {
        if (!iv_.empty() && x.a <= iv_.back().b)
            iv_.back().b = std::max(iv_.back().b, x.b);
        else
            iv_.push_back(x);
    }
}

IntervalSet IntervalSet::real_line() { return IntervalSet({{-kInf, kInf}}); }

bool IntervalSet::contains(double x) const {
    for (const auto& v : iv_)
        if (v.a <= x && x < v.b) return true;
    return false;
}

IntervalSet IntervalSet::unite(const IntervalSet& o) const {
    std::vector<Interval> all = iv_;
    all.insert(all.end(), o.iv_.begin(), o.iv_.end());
    return IntervalSet(all);
}

IntervalSet IntervalSet::intersect(const IntervalSet& o) const {
    std::vector<Interval> out;
    for (const auto& p : iv_)
        for (const auto& q : o.iv_) {
            double a = std::max(p.a, q.a), b = std::min(p.b, q.b);
            if (a < b) out.push_back({a, b});
        }
    return IntervalSet(out);
}

IntervalSet IntervalSet::complement() const {
    std::vector<Interval> out;
    double cur = -kInf;
    for (const auto& v : iv_) {
        if (cur < v.a) out.push_back({cur, v.a});
        cur = v.b;
    }
    if (cur < kInf) out.push_back({cur, kInf});
    return IntervalSet(out);
}

json IntervalSet::to_json() const {
    json j = json::array();
    for (const auto& v : iv_) j.push_back({bound_to_json(v.a), bound_to_json(v.b)});
    return j;
}

IntervalSet IntervalSet::from_json(const json& j) {
    if (!j.is_array()) throw ValidationError("interval set must be a JSON array of [a, b] pairs");
    std::vector<Interval> iv;
    for (const auto& p : j) {
        if (!p.is_array() || p.size() != 2) throw ValidationError("interval must be a pair [a, b]");
        iv.push_back({bound_from_json(p[0]), bound_from_json(p[1])});
    }
    return IntervalSet(iv);
}

// --------------------------------------------------------------- projectors

SpectralProjector pvm_project(const IntervalSet& v, const Sampling& s, const SpectralAtomMeasure& m) {
    if (m.size() != s.dim) throw ValidationError("pvm_project: measure and sampling differ");
    SpectralProjector p;
    p.set = v;
    p.matrix.entries = projector_from(atoms_in(v, s), s.basis.to_dense());
    p.matrix.field = s.field;
    p.matrix.symmetric = true;
    return p;
}

Vec pvm_apply(const IntervalSet& v, const Vec& x, const Sampling& s, const SpectralAtomMeasure& m) {
    EmbeddedVec u = embed(x, s, m);
    for (int k = 0; k < s.dim; ++k)
        if (!v.contains(s.eigenvalues[k])) u.values(k) = 0;
    return unembed(u, s, m);
}

double PVMDefects::max() const {
    return std::max({multiplicativity, idempotence, self_adjointness, additivity, commutation});
}

PVMDefects pvm_algebra_check(const IntervalSet& v1, const IntervalSet& v2, const Sampling& s,
                             const SpectralAtomMeasure& /*m*/, std::uint64_t seed, int parts) {
    if (parts < 1) throw ValidationError("pvm_algebra_check: need at least one partition cell");
    const CMat f = s.basis.to_dense();
    const CMat a = s.op.to_dense();
    auto proj = [&](const IntervalSet& v) { return projector_from(atoms_in(v, s), f); };
    const CMat p1 = proj(v1), p2 = proj(v2), p12 = proj(v1.intersect(v2));
    PVMDefects d;
    d.multiplicativity = max_abs(p12 - p1 * p2);
    d.idempotence = std::max(max_abs(p1 * p1 - p1), max_abs(p2 * p2 - p2));
    d.self_adjointness = std::max(symmetry_defect(p1), symmetry_defect(p2));
    d.commutation = std::max(max_abs(p1 * a - a * p1), max_abs(p2 * a - a * p2));

    double lo = *std::min_element(s.eigenvalues.begin(), s.eigenvalues.end()) - 1;
    double hi = *std::max_element(s.eigenvalues.begin(), s.eigenvalues.end()) + 1;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> cuts{-kInf, lo, hi, kInf};
    for (int i = 1; i < parts; ++i) cuts.push_back(u(rng));
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    CMat sum_all = CMat::Zero(s.dim, s.dim), sum_v1 = CMat::Zero(s.dim, s.dim);
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        IntervalSet cell = IntervalSet::single(cuts[i], cuts[i + 1]);
        sum_all += proj(cell);
        sum_v1 += proj(v1.intersect(cell));
    }
    CMat id = CMat::Identity(s.dim, s.dim);
    d.additivity = std::max(max_abs(sum_all - id), max_abs(sum_v1 - p1));
    return d;
}

// --------------------------------------------------------- step functions

StepFunction identity_staircase(int mesh, double lo, double hi) {
    if (mesh < 1) throw ValidationError("staircase mesh must be at least 1");
    StepFunction f;
    long long a = static_cast<long long>(std::floor(lo * mesh));
    long long b = static_cast<long long>(std::ceil(hi * mesh));
    if (b <= a) b = a + 1;
    for (long long l = a; l <= b; ++l) f.breaks.push_back(static_cast<double>(l) / mesh);
    for (long long l = a; l < b; ++l) f.values.push_back(static_cast<double>(l) / mesh);
    return f;
}

StepFunction eigenvalue_partition(const Sampling& s) {
    std::vector<double> u = s.eigenvalues;
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());
    StepFunction f;
    f.breaks.push_back(u.front() - 1);
    for (size_t i = 0; i + 1 < u.size(); ++i) f.breaks.push_back(0.5 * (u[i] + u[i + 1]));
    f.breaks.push_back(u.back() + 1);
    f.values = u;
    return f;
}

DenseOp integrate_step_function(const StepFunction& f, const Sampling& s, const SpectralAtomMeasure& m) {
    if (m.size() != s.dim) throw ValidationError("integrate_step_function: measure and sampling differ");
    if (f.breaks.size() != f.values.size() + 1 || f.values.empty())
        throw ValidationError("step function needs one more break than values");
    for (size_t i = 0; i + 1 < f.breaks.size(); ++i)
        if (!(f.breaks[i] < f.breaks[i + 1])) throw ValidationError("step function breaks must increase");
    double lo = *std::min_element(s.eigenvalues.begin(), s.eigenvalues.end()) - 1;
    double hi = *std::max_element(s.eigenvalues.begin(), s.eigenvalues.end()) + 1;
    if (f.breaks.front() > lo || f.breaks.back() < hi)
        throw ValidationError("step function partition does not cover [min lambda - 1, max lambda + 1)");

    // sum_i v_i P(V_i), grouped by atom: each atom lies in exactly one V_i
    const CMat fm = s.basis.to_dense();
    CMat scaled = fm;
    for (int k = 0; k < s.dim; ++k) {
        auto it = std::upper_bound(f.breaks.begin(), f.breaks.end(), s.eigenvalues[k]);
        size_t i = static_cast<size_t>(it - f.breaks.begin()) - 1;
        scaled.col(k) *= f.values[i];
    }
    DenseOp out;
    out.entries = scaled * fm.adjoint();
    out.field = s.field;
    out.symmetric = true;
    return out;
}

cx SignedAtomMeasure::value(const IntervalSet& v) const {
    CompensatedSum<cx> acc;
    for (size_t k = 0; k < contributions.size(); ++k)
        if (v.contains(lambda[k])) acc.add(contributions[k]);
    return acc.value();
}

SignedAtomMeasure signed_atom_measure(const Vec& x, const Vec& y, const Sampling& s) {
    CVec cx_ = s.basis.coefficients(x.coords);
    CVec cy = s.basis.coefficients(y.coords);
    SignedAtomMeasure r;
    r.lambda = s.eigenvalues;
    r.contributions.resize(static_cast<size_t>(s.dim));
    for (int k = 0; k < s.dim; ++k) r.contributions[k] = cx_(k) * std::conj(cy(k));
    return r;
}

cx signed_measure(const Vec& x, const Vec& y, const IntervalSet& v, const Sampling& s) {
    return signed_atom_measure(x, y, s).value(v);
}

// ------------------------------------------------------------ surjectivity

std::vector<double> staircase_residuals(const std::vector<double>& x, const std::vector<double>& mu, int n_max) {
    if (x.size() != mu.size()) throw ValidationError("staircase_residuals: size mismatch");
    std::vector<double> out;
    for (int n = 1; n <= n_max; ++n) {
        CompensatedSum<double> acc;
        for (size_t k = 0; k < x.size(); ++k) {
            double xn = 0;
            if (x[k] > 0) xn = n * x[k] / std::ceil(n * x[k]);
            acc.add(mu[k] * (1 - xn) * (1 - xn));
        }
        out.push_back(std::sqrt(acc.value()));
    }
    return out;
}

double projection_residual_of_one(const Sampling& s, const SpectralAtomMeasure& m) {
    EmbeddedVec one{CVec::Ones(s.dim)};
    EmbeddedVec back = embed(unembed(one, s, m), s, m);
    EmbeddedVec d{one.values - back.values};
    return std::sqrt(norm2_mu(d, m));
}

SurjectivityReport surjectivity_diagnostic(const Sampling& s, const SpectralAtomMeasure& m, const Scale& sc, int n_max,
                                           int j0) {
    if (s.provenance.builder != "pvm")
        throw ValidationError("surjectivity diagnostic is only defined for PVM samplings");
    if (n_max < 1) throw ValidationError("n_max must be at least 1");
    const int jn = std::min({j0, sc.count(), m.stored_rows()});
    SurjectivityReport r;
    r.x.resize(static_cast<size_t>(s.dim));
    for (int k = 0; k < s.dim; ++k) {
        CompensatedSum<cx> acc;
        for (int j = 0; j < jn; ++j) acc.add(std::ldexp(sc.weights[j], -(j + 1)) * m.scale_embedded[j](k));
        cx v = acc.value();
        if (std::abs(v.imag()) > 1e-12 || v.real() < -1e-15 || v.real() > 1 + 1e-12)
            throw NumericalError("surjectivity diagnostic: X is not real in [0, 1]");
        r.x[k] = std::max(0.0, v.real());
    }
    r.residuals = staircase_residuals(r.x, m.mu, n_max);
    for (int n = 1; n <= n_max; ++n) {
        CompensatedSum<double> b, lhs;
        for (int k = 0; k < s.dim; ++k) {
            double xk = r.x[k];
            if (xk > 1.0 / n) {
                b.add(m.mu[k] / (xk * xk));
                double xn = n * xk / std::ceil(n * xk);
                lhs.add(m.mu[k] * (1 - xn) * (1 - xn));
            }
        }
        r.bounds.push_back(std::sqrt(b.value()) / n);
        r.restricted.push_back(std::sqrt(lhs.value()));
        if (r.restricted.back() > r.bounds.back() + 1e-12) r.bound_holds = false;
    }
    double prev = r.residuals[0];
    for (int n = 2; n <= n_max; n *= 2) {
        double cur = r.residuals[static_cast<size_t>(n) - 1];
        if (cur > prev + 1e-12) r.dyadic_nonincreasing = false;
        prev = cur;
    }
    r.projection_residual = projection_residual_of_one(s, m);
    return r;
}

}  // namespace spectral_hull
