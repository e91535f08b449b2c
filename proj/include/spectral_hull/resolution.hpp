#pragma once

#include <cstdint>
#include <vector>

#include "spectral_hull/spectral_measure.hpp"

namespace spectral_hull {

struct Interval {
    double a = 0, b = 0;  // [a, b)
};

// Finite union of half-open intervals, kept sorted, disjoint and merged.
class IntervalSet {
public:
    IntervalSet() = default;
    explicit IntervalSet(std::vector<Interval> iv);

    static IntervalSet empty() { return {}; }
    static IntervalSet real_line();
    static IntervalSet single(double a, double b) { return IntervalSet({{a, b}}); }

    const std::vector<Interval>& intervals() const { return iv_; }
    bool is_empty() const { return iv_.empty(); }
    bool contains(double x) const;

    IntervalSet unite(const IntervalSet& o) const;
    IntervalSet intersect(const IntervalSet& o) const;
    IntervalSet complement() const;

    json to_json() const;
    static IntervalSet from_json(const json& j);

private:
    std::vector<Interval> iv_;
};

struct SpectralProjector {
    DenseOp matrix;
    IntervalSet set;
};

SpectralProjector pvm_project(const IntervalSet& v, const Sampling& s, const SpectralAtomMeasure& m);
// unembed(mask * embed(x)), x in sampling coordinates
Vec pvm_apply(const IntervalSet& v, const Vec& x, const Sampling& s, const SpectralAtomMeasure& m);

struct PVMDefects {
    double multiplicativity = 0;  // |P(V1 n V2) - P(V1) P(V2)|_max
    double idempotence = 0;
    double self_adjointness = 0;
    double additivity = 0;  // random finite partition
    double commutation = 0;  // |P A~ - A~ P|_max
    double max() const;
};
PVMDefects pvm_algebra_check(const IntervalSet& v1, const IntervalSet& v2, const Sampling& s,
                             const SpectralAtomMeasure& m, std::uint64_t seed = 7, int parts = 5);

// values[i] on [breaks[i], breaks[i+1])
struct StepFunction {
    std::vector<double> breaks;
    std::vector<double> values;
};
StepFunction identity_staircase(int mesh, double lo, double hi);
StepFunction eigenvalue_partition(const Sampling& s);

DenseOp integrate_step_function(const StepFunction& f, const Sampling& s, const SpectralAtomMeasure& m);

struct SignedAtomMeasure {
    std::vector<cx> contributions;  // <x, f_k> conj(<y, f_k>)
    std::vector<double> lambda;
    cx value(const IntervalSet& v) const;
};
SignedAtomMeasure signed_atom_measure(const Vec& x, const Vec& y, const Sampling& s);
cx signed_measure(const Vec& x, const Vec& y, const IntervalSet& v, const Sampling& s);

// |1 - X_n|_mu for X_n = n X / ceil(n X) on X > 0 (0 elsewhere), n = 1..n_max.
std::vector<double> staircase_residuals(const std::vector<double>& x, const std::vector<double>& mu, int n_max);

struct SurjectivityReport {
    std::vector<double> x;          // X per atom
    std::vector<double> residuals;  // n = 1..n_max
    std::vector<double> bounds;      // (1/n) |1/X|_mu on X > 1/n
    std::vector<double> restricted;  // |1 - X_n|_mu on X > 1/n
    bool dyadic_nonincreasing = true;  // along n = 1, 2, 4, ...
    bool bound_holds = true;
    double projection_residual = 0;  // |1 - proj_{U(H)} 1|_mu
};
SurjectivityReport surjectivity_diagnostic(const Sampling& s, const SpectralAtomMeasure& m, const Scale& sc, int n_max,
                                           int j0 = 16);
double projection_residual_of_one(const Sampling& s, const SpectralAtomMeasure& m);

}  // namespace spectral_hull
