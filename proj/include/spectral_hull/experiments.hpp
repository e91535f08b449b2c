#pragma once

#include <cstdint>
#include <vector>

#include "spectral_hull/fourier_bridge.hpp"
#include "spectral_hull/hull.hpp"
#include "spectral_hull/resolution.hpp"

// Measurements shared by the CLI, the acceptance driver and the bindings.
namespace spectral_hull {

// Seeded unit vectors in sampling coordinates (Gaussian, normalized; real parts only for Field::Real).
std::vector<CVec> random_unit_vectors(int dim, int count, std::uint64_t seed, Field field = Field::Complex);

struct VectorDefects {
    double isometry = 0;    // max | |Ux|_mu^2 - |x|^2 |
    double intertwine = 0;  // max |T(Ux) - U(A~x)|_mu
};
VectorDefects vector_defects(const Sampling& s, const SpectralAtomMeasure& m, int count, std::uint64_t seed);

// Shift example.
struct Arc {
    double a = 0, b = 0;
};
std::vector<Arc> default_arcs();
double arc_measure(const HullSpace& h, const std::vector<ChartPoint>& chart, const Arc& arc);
double circle_chart_defect(const HullSpace& h, const std::vector<ChartPoint>& chart, const SpectralAtomMeasure& m);

// Diff example.
double atom_omega(const Sampling& s, int k);  // k / N, centred index
double g0_integral(double a, double b);       // closed form via erf
double g0_atom_mass(const Sampling& s, const SpectralAtomMeasure& m, double a, double b);
struct LineChartDefect {
    double max_defect = 0;  // max |lambda_k - pi omega_k|
    double max_excess = 0;  // max of defect - (pi^3 |omega|^3 / (6 N^2) + 1e-12)
};
LineChartDefect line_chart_defect(const Sampling& s, const SpectralAtomMeasure& m, double omega_max);
double multiplier_at(const Sampling& s, const SpectralAtomMeasure& m, double omega);
GridFunction scale_grid_function(const Sampling& s, const Scale& sc, int j = 0);
GridFunction gaussian_grid_function(const Sampling& s);  // e sampled on every cell, no perturbation

// Two fixed Borel sets spread over the spectrum, then the full algebra check.
PVMDefects standard_pvm_defects(const Sampling& s, const SpectralAtomMeasure& m, std::uint64_t seed = 7);
double resolution_defect(const Sampling& s, const SpectralAtomMeasure& m);  // |int id dP - A~|_max

struct PseudometricSuite {
    double symmetry = 0;        // max |d(a,b) - d(b,a)|
    double triangle_slack = 0;  // min of d(a,b) + d(b,c) - d(a,c)
    double max_distance = 0;
    double zero_diagonal = 0;  // max d(a,a)
    int triples = 0;
};
PseudometricSuite pseudometric_suite(const PseudoMetric& d, int triples, std::uint64_t seed);

}  // namespace spectral_hull
