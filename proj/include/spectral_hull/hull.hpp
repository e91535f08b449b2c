#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spectral_hull/spectral_measure.hpp"

namespace spectral_hull {

// d(a, b) = sum_j c_j^{3/2} |e_j|^2 |U(e_j)(a) - U(e_j)(b)|, summed over the
// rows the measure keeps; the remainder is bounded by tail_bound().
class PseudoMetric {
public:
    PseudoMetric(const Scale& sc, const SpectralAtomMeasure& m);

    int size() const { return n_; }
    int terms() const { return j_; }
    double tail_bound() const { return tail_; }
    double max_term_bound() const { return max_term_; }  // max_j,f c_j |U(e_j)(f)|^2
    const std::vector<double>& term_weights() const { return w_; }
    cx coordinate(int atom, int j) const { return u_[static_cast<size_t>(atom) * j_ + j]; }

    double operator()(int a, int b) const;
    // d(a, b) < eps, stopping as soon as the partial sum reaches eps
    bool closer_than(int a, int b, double eps) const;
    // Partial sum over the first jmax terms.
    double partial(int a, int b, int jmax) const;

    void cache();  // dense matrix, only for size() <= 2048
    bool cached() const { return !dense_.empty(); }

private:
    int n_ = 0, j_ = 0;
    double tail_ = 0, max_term_ = 0;
    std::vector<double> w_;
    std::vector<cx> u_;  // atom-major
    std::vector<double> dense_;
};

struct HullCluster {
    std::vector<int> members;  // ascending; members[0] is the representative
    double weight = 0;         // pushed-forward measure
    double m = 0;              // mu-weighted mean eigenvalue
    std::vector<cx> coords;    // mu-weighted mean of U(e_j), j < J0
    bool degenerate = false;   // every |coords_j| <= 1e-12
};

struct HullSpace {
    double epsilon = 0;
    int j0 = 0;
    std::vector<HullCluster> clusters;
    std::vector<int> cluster_of;  // atom -> cluster
};

// Connected components of the graph with an edge where d < epsilon.
HullSpace build_hull(const PseudoMetric& d, const SpectralAtomMeasure& m, const MultiplierFn& f, double epsilon,
                     int j0 = 16);

std::vector<cx> hull_coordinate_functions(const HullSpace& h, int j);

struct LipschitzReport {
    double max_violation = 0;  // max of |dU| - C_j (d^(p,q) + slack); <= 0 when the bound holds
    long long pairs = 0;
};
// |U^_j(p) - U^_j(q)| <= C_j (d(rep_p, rep_q) + eps * max(2, |p| + |q| - 2)),
// C_j = 1 / (c_j^{3/2} |e_j|^2). Large hulls are checked on max_pairs seeded pairs.
LipschitzReport lipschitz_check(const HullSpace& h, const PseudoMetric& d, const Scale& sc, int j,
                                long long max_pairs = 200000, std::uint64_t seed = 1);

// m^ on each cluster from the first j < J0 with U^_j != 0: Re(U^(A e_j) / U^_j).
std::vector<double> pushforward_multiplier_via_partition(const HullSpace& h, const SpectralAtomMeasure& m,
                                                         const Scale& sc, const Sampling& s);
double partition_tolerance(const HullSpace& h, const Scale& sc, const SpectralAtomMeasure& m);

struct ChartPoint {
    enum class Label { Circle, Line };
    Label label = Label::Circle;
    double coordinate = 0;
    int cluster = 0;
    bool valid = true;     // false on degenerate clusters
    bool coherent = true;  // circle: |U^| within 1e-6 of 1
    double modulus = 1;
};

std::vector<ChartPoint> chart_circle(const HullSpace& h, const Sampling& s);
std::vector<ChartPoint> chart_line(const HullSpace& h, const Sampling& s, const SpectralAtomMeasure& m,
                                   double spread_tol = 0.1);

int covering_number(const PseudoMetric& d, double epsilon);

}  // namespace spectral_hull
