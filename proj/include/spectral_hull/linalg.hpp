#pragma once

#include <complex>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

namespace spectral_hull {

using cx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

enum class Field { Real, Complex };

const char* field_name(Field f);
Field field_from_name(const std::string& s);

// Neumaier-compensated accumulator; add terms in index order for
// reproducible sums.
template <class T>
class CompensatedSum {
public:
    void add(T x) {
        T t = sum_ + x;
        if constexpr (std::is_same_v<T, double>) {
            comp_ += (std::abs(sum_) >= std::abs(x)) ? (sum_ - t) + x : (x - t) + sum_;
        } else {
            double sr = sum_.real(), si = sum_.imag();
            double xr = x.real(), xi = x.imag();
            double tr = t.real(), ti = t.imag();
            double cr = (std::abs(sr) >= std::abs(xr)) ? (sr - tr) + xr : (xr - tr) + sr;
            double ci = (std::abs(si) >= std::abs(xi)) ? (si - ti) + xi : (xi - ti) + si;
            comp_ += T(cr, ci);
        }
        sum_ = t;
    }
    T value() const { return sum_ + comp_; }

private:
    T sum_{};
    T comp_{};
};

struct Vec {
    CVec coords;
    Field field = Field::Complex;

    Vec() = default;
    Vec(CVec c, Field f = Field::Complex) : coords(std::move(c)), field(f) {}
    int dim() const { return static_cast<int>(coords.size()); }

    static Vec unit(int dim, int i, Field f = Field::Complex);
    static Vec zero(int dim, Field f = Field::Complex);
};

struct DenseOp {
    CMat entries;
    Field field = Field::Complex;
    bool symmetric = false;

    int dim() const { return static_cast<int>(entries.rows()); }
};

// <x, y>, conjugate-linear in y.
cx inner(const Vec& x, const Vec& y);
double norm(const Vec& x);

// Raw-coordinate versions with compensated summation.
cx inner(const CVec& x, const CVec& y);
double norm2(const CVec& x);

double max_abs(const CMat& m);
double symmetry_defect(const CMat& m);

struct Eigh {
    std::vector<double> values;  // ascending
    CMat vectors;                // column k pairs with values[k]

    Vec vec(int k, Field f = Field::Complex) const { return Vec(vectors.col(k), f); }
};

constexpr double kSymTol = 1e-12;

// Symmetrizes as (A + A*)/2 after checking the relative asymmetry against
// sym_tol, then decomposes. Residual and orthonormality are verified.
Eigh eigh_self_adjoint(const DenseOp& a, double tol = 1e-10, double sym_tol = kSymTol);

Vec project_onto_span(const Vec& x, const std::vector<Vec>& basis, double tol = 1e-10);

// Max |<b_i, b_j> - delta_ij|.
double orthonormality_defect(const std::vector<Vec>& basis);
double orthonormality_defect(const CMat& columns);

}  // namespace spectral_hull
