#pragma once

#include <vector>

#include "spectral_hull/sampling.hpp"

namespace spectral_hull {

constexpr double kMuMin = 1e-14;

struct SpectralAtomMeasure {
    std::vector<double> mu;      // mu_k, one per atom
    std::vector<double> lambda;  // eigenvalue of each atom
    // U(e_j)(f_k) for the leading scale vectors; rows beyond this are below
    // double resolution in every pseudometric and coordinate sum
    std::vector<CVec> scale_embedded;
    double tail_bound = 0;  // 2 * sum of c_j |e_j|^2 over the rows not stored

    int size() const { return static_cast<int>(mu.size()); }
    int stored_rows() const { return static_cast<int>(scale_embedded.size()); }
};

struct EmbeddedVec {
    CVec values;  // u_k over the atoms
};

struct MultiplierFn {
    std::vector<double> values;
};

// mu_k = sum_j c_j |<e_j, f_k>|^2. Rows are kept for j < max(min_rows, J_eff)
// where J_eff is where the tail bound drops below 1e-17.
SpectralAtomMeasure atom_measure(const Sampling& s, const Scale& sc, double mu_min = kMuMin, int min_rows = 16);

// x in sampling coordinates.
EmbeddedVec embed(const Vec& x, const Sampling& s, const SpectralAtomMeasure& m);
EmbeddedVec embed(const CVec& x, const Sampling& s, const SpectralAtomMeasure& m);
// x in the caller's ambient space; projected onto the sampling space first.
EmbeddedVec embed_ambient(const CVec& x, const Sampling& s, const SpectralAtomMeasure& m);
// sum_k u_k sqrt(mu_k) f_k, in sampling coordinates
Vec unembed(const EmbeddedVec& u, const Sampling& s, const SpectralAtomMeasure& m);

double norm2_mu(const EmbeddedVec& u, const SpectralAtomMeasure& m);
cx inner_mu(const EmbeddedVec& u, const EmbeddedVec& v, const SpectralAtomMeasure& m);

MultiplierFn eigenvalue_multiplier(const SpectralAtomMeasure& m);
EmbeddedVec multiply(const EmbeddedVec& u, const MultiplierFn& f);

// |T U x - U A x|_mu with x and Ax in sampling coordinates.
double intertwining_defect(const Vec& x, const Vec& ax, const Sampling& s, const SpectralAtomMeasure& m);
// Same, with x and Ax in the ambient space.
double intertwining_defect_ambient(const CVec& x, const CVec& ax, const Sampling& s, const SpectralAtomMeasure& m);

double measure_of(const SpectralAtomMeasure& m, const std::vector<int>& atoms);

}  // namespace spectral_hull
