#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "spectral_hull/linalg.hpp"

namespace spectral_hull {

using json = nlohmann::json;

// Sparse coordinate vector; entries kept in ascending index order.
struct SparseVec {
    int dim = 0;
    std::vector<int> idx;
    std::vector<cx> val;

    static SparseVec from_dense(const CVec& x);
    static SparseVec unit(int dim, int i);
    CVec dense() const;
    double norm2() const;
};

// How sampling coordinates sit inside the caller's ambient space.
struct AmbientMap {
    enum class Kind { Identity, Offset, Isometry };
    Kind kind = Kind::Identity;
    int dim = 0;
    int ambient_dim = 0;
    int offset = 0;  // Offset: sampling coord i is ambient index i + offset
    CMat q;          // Isometry: ambient_dim x dim, orthonormal columns

    CVec project(const CVec& ambient) const;  // coefficients of proj_H x
    CVec lift(const CVec& coords) const;
    json describe() const;
};

// Sampling-space operator: dense, circulant stencil, or diagonal.
class SamplingOp {
public:
    enum class Kind { Dense, Circulant, Diagonal };

    static SamplingOp dense(CMat m);
    // (A x)_i = sum over (s, a) of a * x_{(i + s) mod n}
    static SamplingOp circulant(int n, std::vector<std::pair<int, cx>> stencil);
    static SamplingOp diagonal(std::vector<double> d);

    Kind kind() const { return kind_; }
    int dim() const { return n_; }
    CVec apply(const CVec& x) const;
    CMat to_dense() const;
    double symmetry_defect() const;
    const std::vector<std::pair<int, cx>>& stencil() const { return stencil_; }
    json describe() const;

private:
    Kind kind_ = Kind::Dense;
    int n_ = 0;
    CMat dense_;
    std::vector<std::pair<int, cx>> stencil_;
    std::vector<double> diag_;
};

// Orthonormal eigenbasis, dense columns or an implicit unitary DFT
//   f_k[l] = exp(sign * 2 pi i k l / n) / sqrt(n),  k, l in [-offset, n - offset)
class AtomBasis {
public:
    enum class Kind { Dense, Fourier };

    static AtomBasis dense(CMat columns);
    static AtomBasis fourier(int n, int offset, int sign);

    Kind kind() const { return kind_; }
    int size() const { return n_; }
    int offset() const { return offset_; }
    int sign() const { return sign_; }
    const CMat& columns() const { return cols_; }

    CVec column(int k) const;
    CVec coefficients(const CVec& x) const;  // <x, f_k> for all k
    CVec coefficients(const SparseVec& x) const;
    CVec synthesize(const CVec& c) const;  // sum_k c_k f_k
    CMat to_dense() const;
    json describe() const;

private:
    cx twiddle(long long m) const;  // exp(2 pi i m / n)
    Kind kind_ = Kind::Dense;
    int n_ = 0;
    int offset_ = 0;
    int sign_ = 1;
    CMat cols_;
    std::vector<cx> tw_;
};

struct Provenance {
    std::string builder;
    json params = json::object();
};

struct Sampling {
    Field field = Field::Complex;
    int dim = 0;
    std::vector<double> eigenvalues;
    AtomBasis basis;
    SamplingOp op;
    AmbientMap ambient;
    Provenance provenance;
};

struct Scale {
    // Which quantity must be non-increasing beyond the prefix: the mass
    // c_j |e_j|^2 (dyadic scales) or the weight c_j itself (PVM probes).
    enum class Bias { Mass, Weight };

    std::vector<SparseVec> vectors;
    std::vector<double> weights;
    int prefix = 0;  // length of the standard prefix J0 used for bias checks
    Bias bias = Bias::Mass;

    int count() const { return static_cast<int>(vectors.size()); }
    double mass(int j) const { return weights[j] * vectors[j].norm2(); }
};

// Sampling invariants: orthonormal atoms, eigen-residuals, operator symmetry.
void validate_sampling(const Sampling& s);
// |sum c_j |e_j|^2 - 1| and the bias tail bound beyond the prefix.
void validate_scale(const Sampling& s, const Scale& sc);

// Dyadic weights c_j = 1 / (2^j (1 - 2^-J) |e_j|^2), j = 1..J.
std::vector<double> dyadic_weights(const std::vector<double>& norms2);

using OpAction = std::function<CVec(const CVec&)>;

Sampling build_projection_sampling(const OpAction& op, const std::vector<Vec>& span, double tol = 1e-10);
Scale dyadic_scale(const Sampling& s, const std::vector<Vec>& standard_prefix);

struct SamplingAndScale {
    Sampling sampling;
    Scale scale;
};

// Interleaved index order 0, 1, -1, 2, -2, ... for |l| <= m.
std::vector<int> interleaved_indices(int m);
SamplingAndScale build_shift_sampling(int n);
// Ambient action of the non-cyclic (L + R)/2 on the window |l| <= (N-1)/2 + 1.
CVec shift_ambient_action(const CVec& x);

struct Rational {
    long long num = 0;
    long long den = 1;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};
std::vector<Rational> rational_enumeration(int count);
long long diff_window(int n, const std::vector<Rational>& rationals);
SamplingAndScale build_diff_sampling(int n, int j, std::vector<Rational> rationals = {});

// Projection-valued measure oracle on ambient vectors: x -> P([a, b)) x.
using PVMOracle = std::function<CVec(double a, double b, const CVec& x)>;
PVMOracle pvm_from_operator(const DenseOp& a);
PVMOracle pvm_from_diagonal(std::vector<double> values);

struct PVMProbe {
    double a = 0, b = 0;
    int k = 0;
    CVec vec;  // ambient
};
std::vector<PVMProbe> enumerate_pvm_probes(const PVMOracle& pvm, const std::vector<CVec>& g, double window,
                                           int mesh, int probe_count);
SamplingAndScale build_pvm_sampling(const PVMOracle& pvm, const std::vector<Vec>& g, double window, int mesh,
                                    int probe_count);

// Diagonal demo: diag(lambda_i), lambda_i = (2i + 1 - d) / 4, g = normalized ones.
struct PVMDemo {
    DenseOp op;
    double window = 1;
    SamplingAndScale built;
};
PVMDemo build_pvm_demo(int dim, int mesh, int probe_count = 64);

struct GraphDefectReport {
    std::vector<double> defects;  // |A~ proj x - proj A x|
    std::vector<double> outside;  // |A x - lift(proj A x)|
    double max = 0, mean = 0;
};
GraphDefectReport graph_defect(const Sampling& s, const OpAction& op, const std::vector<Vec>& test_vectors);

}  // namespace spectral_hull
