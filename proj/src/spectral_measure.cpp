#include "spectral_hull/spectral_measure.hpp"

#include <cmath>
#include <sstream>

#include "spectral_hull/errors.hpp"
#include "spectral_hull/parallel.hpp"

namespace spectral_hull {

SpectralAtomMeasure atom_measure(const Sampling& s, const Scale& sc, double mu_min, int min_rows) {
    if (sc.count() == 0) throw ValidationError("atom_measure: empty scale");
    for (const auto& v : sc.vectors)
        if (v.dim != s.dim) throw ValidationError("atom_measure: scale does not match the sampling dimension");
    const int n = s.dim;
    const int J = sc.count();

    // tail[j] = sum_{i >= j} c_i |e_i|^2
    std::vector<double> tail(static_cast<size_t>(J) + 1, 0.0);
    for (int j = J - 1; j >= 0; --j) tail[j] = tail[j + 1] + sc.mass(j);
    int rows = std::min(J, min_rows);
    while (rows < J && 2 * tail[rows] >= 1e-17) ++rows;

    std::vector<CompensatedSum<double>> acc(static_cast<size_t>(n));
    SpectralAtomMeasure m;
    std::vector<CVec> coef;
    for (int j = 0; j < J; ++j) {
        const double c = sc.weights[j];
        if (c == 0 && j >= rows) continue;
        CVec cj = s.basis.coefficients(sc.vectors[j]);
        if (c != 0)
            for (int k = 0; k < n; ++k) acc[k].add(c * std::norm(cj(k)));
        if (j < rows) coef.push_back(std::move(cj));
    }
    m.mu.resize(static_cast<size_t>(n));
    CompensatedSum<double> total;
    for (int k = 0; k < n; ++k) {
        m.mu[k] = acc[k].value();
        total.add(m.mu[k]);
    }
    for (int k = 0; k < n; ++k) {
        if (!(m.mu[k] >= mu_min)) {
            std::ostringstream os;
            os << "compatibility violated: atom " << k << " has measure " << m.mu[k] << " below mu_min " << mu_min
               << " (no scale vector overlaps it)";
            throw ValidationError(os.str());
        }
    }
    if (std::abs(total.value() - 1.0) > 1e-10) throw NumericalError("atom_measure: total measure is not 1");
    m.lambda = s.eigenvalues;
    for (auto& cj : coef)
        for (int k = 0; k < n; ++k) cj(k) /= std::sqrt(m.mu[k]);
    m.scale_embedded = std::move(coef);
    m.tail_bound = 2 * tail[rows];
    return m;
}

EmbeddedVec embed(const CVec& x, const Sampling& s, const SpectralAtomMeasure& m) {
    if (x.size() != s.dim) throw ValidationError("embed: vector is not in sampling coordinates");
    EmbeddedVec u{s.basis.coefficients(x)};
    for (int k = 0; k < s.dim; ++k) u.values(k) /= std::sqrt(m.mu[k]);
    return u;
}

EmbeddedVec embed(const Vec& x, const Sampling& s, const SpectralAtomMeasure& m) { return embed(x.coords, s, m); }

EmbeddedVec embed_ambient(const CVec& x, const Sampling& s, const SpectralAtomMeasure& m) {
    return embed(s.ambient.project(x), s, m);
}

Vec unembed(const EmbeddedVec& u, const Sampling& s, const SpectralAtomMeasure& m) {
    if (u.values.size() != s.dim) throw ValidationError("unembed: wrong atom count");
    CVec c(s.dim);
    for (int k = 0; k < s.dim; ++k) c(k) = u.values(k) * std::sqrt(m.mu[k]);
    return Vec(s.basis.synthesize(c), s.field);
}

double norm2_mu(const EmbeddedVec& u, const SpectralAtomMeasure& m) {
    CompensatedSum<double> acc;
    for (int k = 0; k < m.size(); ++k) acc.add(std::norm(u.values(k)) * m.mu[k]);
    return acc.value();
}

cx inner_mu(const EmbeddedVec& u, const EmbeddedVec& v, const SpectralAtomMeasure& m) {
    CompensatedSum<cx> acc;
    for (int k = 0; k < m.size(); ++k) acc.add(u.values(k) * std::conj(v.values(k)) * m.mu[k]);
    return acc.value();
}

MultiplierFn eigenvalue_multiplier(const SpectralAtomMeasure& m) { return {m.lambda}; }

EmbeddedVec multiply(const EmbeddedVec& u, const MultiplierFn& f) {
    if (static_cast<size_t>(u.values.size()) != f.values.size()) throw ValidationError("multiply: atom sets differ");
    EmbeddedVec r{u.values};
    for (Eigen::Index k = 0; k < r.values.size(); ++k) r.values(k) *= f.values[static_cast<size_t>(k)];
    return r;
}

double intertwining_defect(const Vec& x, const Vec& ax, const Sampling& s, const SpectralAtomMeasure& m) {
    EmbeddedVec t = multiply(embed(x, s, m), eigenvalue_multiplier(m));
    EmbeddedVec ua = embed(ax, s, m);
    EmbeddedVec d{t.values - ua.values};
    return std::sqrt(norm2_mu(d, m));
}

double intertwining_defect_ambient(const CVec& x, const CVec& ax, const Sampling& s, const SpectralAtomMeasure& m) {
    return intertwining_defect(Vec(s.ambient.project(x), s.field), Vec(s.ambient.project(ax), s.field), s, m);
}

double measure_of(const SpectralAtomMeasure& m, const std::vector<int>& atoms) {
    CompensatedSum<double> acc;
    for (int k : atoms) {
        if (k < 0 || k >= m.size()) throw ValidationError("measure_of: atom index out of range");
        acc.add(m.mu[k]);
    }
    return acc.value();
}

}  // namespace spectral_hull
