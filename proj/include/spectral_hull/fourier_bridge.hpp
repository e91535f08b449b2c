#pragma once

#include <functional>
#include <vector>

#include "spectral_hull/spectral_measure.hpp"

namespace spectral_hull {

// Values on the cells s_l = [l/N, (l+1)/N), l in [-N^2, N^2), stored at index l + N^2.
struct GridFunction {
    int n = 0;
    long long n1 = 0;
    std::vector<cx> values;

    // f sampled at (l + r) / N; r = 0 is the left endpoint
    static GridFunction sample(int n, long long n1, const std::function<cx(double)>& f, double r = 0);
    static GridFunction zero(int n, long long n1);
    // Orthonormal coordinates: h_l / sqrt(N).
    CVec coords() const;
    static GridFunction from_coords(int n, long long n1, const CVec& c);
    double l1() const;
    double l2() const;

    json to_json() const;
    static GridFunction from_json(const json& j);
};

// Cyclic central difference (h_{l+1} - h_{l-1}) N / 2.
GridFunction central_difference(const GridFunction& h);

double reference_gaussian(double x);  // e(x) = (2/pi)^{1/4} exp(-x^2)
double g0(double omega);              // sqrt(pi/2) exp(-pi^2 omega^2 / 2)
double gaussian_reference(double omega);  // (2 pi)^{1/4} exp(-pi^2 omega^2 / 4)

double fourier_series_check(int n);
double fourier_series_check(const Sampling& s, const SpectralAtomMeasure& m);

struct TransformRow {
    int atom = 0;
    double omega = 0;
    cx u;  // U(h)(f_k)
    cx f;  // recovered F(h)(omega / 2)
    bool reliable = true;
};

struct TransformTable {
    double omega_max = 3;
    std::vector<TransformRow> rows;
};

// Rows for every atom with |omega| <= table_range; reliable when |omega| <= omega_max.
TransformTable fourier_transform(const GridFunction& h, const Sampling& s, const SpectralAtomMeasure& m,
                                 double omega_max = 3, double table_range = 4);

struct RecoveryError {
    double pointwise_rel = 0;  // max |F - ref| / |ref|
    double sup_rel = 0;        // max |F - ref| / max |ref|
    double phase = 0;          // max |F/|F| - ref/|ref||
};
RecoveryError recovery_error(const TransformTable& t, const std::function<cx(double)>& reference, double omega_limit);

// Phase of <e~, f_k> against 1, over |omega| <= omega_limit.
double scale_phase_defect(const Sampling& s, const Scale& sc, double omega_limit);

struct PlancherelReport {
    double exact_defect = 0;    // | |U h|_mu^2 - |h|^2 |
    double norm2 = 0;           // |h|^2 on the grid
    double quadrature = 0;      // sum over reliable rows of |F|^2 d(omega / 2)
    double quadrature_rel = 0;  // |quadrature - |h|^2| / |h|^2
};
PlancherelReport plancherel_check(const GridFunction& h, const Sampling& s, const SpectralAtomMeasure& m,
                                  double omega_max = 3);

struct DifferentiationReport {
    double max_defect = 0;  // max_k |U(-i h')(f_k) - lambda_k U(h)(f_k)| over |omega| <= omega_max
    double constant = 0;    // max_defect * N
};
DifferentiationReport differentiation_check(const GridFunction& h, const GridFunction& hprime, const Sampling& s,
                                            const SpectralAtomMeasure& m, double omega_max = 3);

struct StaircaseError {
    double total = 0;
    double inside = 0;  // over the window cells k in [-N1, N1]
    double tail = 0;    // |1_outside f|_p
};
// |f - sum_k f((k + r)/N) 1_[k/N, (k+1)/N)|_p by Gauss-Legendre quadrature on
// `refine` subcells per cell; the tail integral runs tail_extent past the window.
StaircaseError staircase_lp_error(const std::function<double(double)>& f, int p, int n, long long n1, int r = 0,
                                  int refine = 16, double tail_extent = 8);

}  // namespace spectral_hull
