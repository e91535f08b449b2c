#include "spectral_hull/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spectral_hull/errors.hpp"

namespace spectral_hull {

const char* field_name(Field f) { return f == Field::Real ? "real" : "complex"; }

Field field_from_name(const std::string& s) {
    if (s == "real") return Field::Real;
    if (s == "complex") return Field::Complex;
    throw ValidationError("unknown field tag: " + s);
}

Vec Vec::unit(int dim, int i, Field f) {
    CVec c = CVec::Zero(dim);
    c(i) = 1.0;
    return Vec(std::move(c), f);
}

Vec Vec::zero(int dim, Field f) { return Vec(CVec::Zero(dim), f); }

cx inner(const CVec& x, const CVec& y) {
    if (x.size() != y.size()) throw ValidationError("inner: dimension mismatch");
    CompensatedSum<cx> s;
    for (Eigen::Index i = 0; i < x.size(); ++i) s.add(x(i) * std::conj(y(i)));
    return s.value();
}

double norm2(const CVec& x) {
    CompensatedSum<double> s;
    for (Eigen::Index i = 0; i < x.size(); ++i) s.add(std::norm(x(i)));
    return s.value();
}

cx inner(const Vec& x, const Vec& y) {
    if (x.dim() != y.dim()) throw ValidationError("inner: dimension mismatch");
    if (x.field != y.field) throw ValidationError("inner: field mismatch");
    cx v = inner(x.coords, y.coords);
    if (x.field == Field::Real) v = cx(v.real(), 0.0);
    return v;
}

double norm(const Vec& x) { return std::sqrt(norm2(x.coords)); }

double max_abs(const CMat& m) {
    double r = 0;
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) r = std::max(r, std::abs(m(i, j)));
    return r;
}

double symmetry_defect(const CMat& m) {
    double r = 0;
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            r = std::max(r, std::abs(m(i, j) - std::conj(m(j, i))));
    return r;
}

double orthonormality_defect(const CMat& cols) {
    CMat g = cols.adjoint() * cols;
    g.diagonal().array() -= 1.0;
    return max_abs(g);
}

double orthonormality_defect(const std::vector<Vec>& basis) {
    if (basis.empty()) return 0.0;
    CMat cols(basis.front().dim(), static_cast<Eigen::Index>(basis.size()));
    for (size_t k = 0; k < basis.size(); ++k) {
        if (basis[k].dim() != cols.rows()) throw ValidationError("basis: dimension mismatch");
        cols.col(static_cast<Eigen::Index>(k)) = basis[k].coords;
    }
    return orthonormality_defect(cols);
}

Eigh eigh_self_adjoint(const DenseOp& a, double tol, double sym_tol) {
    const auto& m = a.entries;
    if (m.rows() != m.cols()) throw ValidationError("eigh: operator is not square");
    if (!a.symmetric) throw ValidationError("eigh: operator not flagged symmetric");
    double scale = std::max(1.0, max_abs(m));
    double asym = symmetry_defect(m);
    if (asym > sym_tol * scale)
        throw ValidationError("eigh: operator not symmetric (defect " + std::to_string(asym) + ")");

    CMat h = (m + m.adjoint()) * 0.5;
    Eigh out;
    const Eigen::Index n = m.rows();
    if (a.field == Field::Real) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.real());
        if (es.info() != Eigen::Success) throw NumericalError("eigh: solver did not converge");
        out.vectors = es.eigenvectors().cast<cx>();
        out.values.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
    } else {
        Eigen::SelfAdjointEigenSolver<CMat> es(h);
        if (es.info() != Eigen::Success) throw NumericalError("eigh: solver did not converge");
        out.vectors = es.eigenvectors();
        out.values.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
    }

    double anorm = std::max(1.0, max_abs(h) * std::sqrt(static_cast<double>(std::max<Eigen::Index>(n, 1))));
    for (Eigen::Index k = 0; k < n; ++k) {
        double lam = out.values[static_cast<size_t>(k)];
        double r = std::sqrt(norm2(h * out.vectors.col(k) - lam * out.vectors.col(k)));
        if (r > tol * (1 + std::abs(lam)) * anorm)
            throw NumericalError("eigh: eigenpair residual " + std::to_string(r) + " exceeds tolerance");
    }
    if (n > 0 && orthonormality_defect(out.vectors) > tol)
        throw NumericalError("eigh: eigenvectors not orthonormal");
    return out;
}

Vec project_onto_span(const Vec& x, const std::vector<Vec>& basis, double tol) {
    if (orthonormality_defect(basis) > tol) throw ValidationError("project_onto_span: basis not orthonormal");
    Vec r = Vec::zero(x.dim(), x.field);
    for (const auto& b : basis) r.coords += inner(x, b) * b.coords;
    return r;
}

}  // namespace spectral_hull
