#include "spectral_hull/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "spectral_hull/errors.hpp"
#include "spectral_hull/parallel.hpp"

namespace spectral_hull {

namespace {

constexpr double kPi = 3.14159265358979323846;

long long mod(long long a, long long n) {
    long long r = a % n;
    return r < 0 ? r + n : r;
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

}  // namespace

// ---------------------------------------------------------------- SparseVec

SparseVec SparseVec::from_dense(const CVec& x) {
    SparseVec s;
    s.dim = static_cast<int>(x.size());
    for (int i = 0; i < s.dim; ++i) {
        if (x(i) != cx(0.0, 0.0)) {
            s.idx.push_back(i);
            s.val.push_back(x(i));
        }
    }
    return s;
}

SparseVec SparseVec::unit(int dim, int i) {
    SparseVec s;
    s.dim = dim;
    s.idx = {i};
    s.val = {cx(1.0, 0.0)};
    return s;
}

CVec SparseVec::dense() const {
    CVec x = CVec::Zero(dim);
    for (size_t t = 0; t < idx.size(); ++t) x(idx[t]) = val[t];
    return x;
}

double SparseVec::norm2() const {
    CompensatedSum<double> s;
    for (const auto& v : val) s.add(std::norm(v));
    return s.value();
}

// --------------------------------------------------------------- AmbientMap

CVec AmbientMap::project(const CVec& x) const {
    if (x.size() != ambient_dim) throw ValidationError("ambient vector has wrong dimension");
    switch (kind) {
        case Kind::Identity: return x;
        case Kind::Offset: return x.segment(offset, dim);
        case Kind::Isometry: return q.adjoint() * x;
    }
    return x;
}

CVec AmbientMap::lift(const CVec& c) const {
    if (c.size() != dim) throw ValidationError("sampling vector has wrong dimension");
    switch (kind) {
        case Kind::Identity: return c;
        case Kind::Offset: {
            CVec x = CVec::Zero(ambient_dim);
            x.segment(offset, dim) = c;
            return x;
        }
        case Kind::Isometry: return q * c;
    }
    return c;
}

json AmbientMap::describe() const {
    json j;
    j["ambient_dim"] = ambient_dim;
    switch (kind) {
        case Kind::Identity: j["kind"] = "identity"; break;
        case Kind::Offset:
            j["kind"] = "offset";
            j["offset"] = offset;
            break;
        case Kind::Isometry: j["kind"] = "isometry"; break;
    }
    return j;
}

// --------------------------------------------------------------- SamplingOp

SamplingOp SamplingOp::dense(CMat m) {
    if (m.rows() != m.cols()) throw ValidationError("operator must be square");
    SamplingOp op;
    op.kind_ = Kind::Dense;
    op.n_ = static_cast<int>(m.rows());
    op.dense_ = std::move(m);
    return op;
}

SamplingOp SamplingOp::circulant(int n, std::vector<std::pair<int, cx>> stencil) {
    SamplingOp op;
    op.kind_ = Kind::Circulant;
    op.n_ = n;
    op.stencil_ = std::move(stencil);
    return op;
}

SamplingOp SamplingOp::diagonal(std::vector<double> d) {
    SamplingOp op;
    op.kind_ = Kind::Diagonal;
    op.n_ = static_cast<int>(d.size());
    op.diag_ = std::move(d);
    return op;
}

CVec SamplingOp::apply(const CVec& x) const {
    if (x.size() != n_) throw ValidationError("operator applied to vector of wrong dimension");
    switch (kind_) {
        case Kind::Dense: return dense_ * x;
        case Kind::Diagonal: {
            CVec y(n_);
            for (int i = 0; i < n_; ++i) y(i) = diag_[i] * x(i);
            return y;
        }
        case Kind::Circulant: {
            CVec y = CVec::Zero(n_);
            for (int i = 0; i < n_; ++i) {
                cx acc = 0;
                for (const auto& [s, a] : stencil_) acc += a * x(mod(i + s, n_));
                y(i) = acc;
            }
            return y;
        }
    }
    return x;
}

CMat SamplingOp::to_dense() const {
    switch (kind_) {
        case Kind::Dense: return dense_;
        case Kind::Diagonal: {
            CMat m = CMat::Zero(n_, n_);
            for (int i = 0; i < n_; ++i) m(i, i) = diag_[i];
            return m;
        }
        case Kind::Circulant: {
            CMat m = CMat::Zero(n_, n_);
            for (int i = 0; i < n_; ++i)
                for (const auto& [s, a] : stencil_) m(i, mod(i + s, n_)) += a;
            return m;
        }
    }
    return dense_;
}

double SamplingOp::symmetry_defect() const {
    switch (kind_) {
        case Kind::Dense: return spectral_hull::symmetry_defect(dense_);
        case Kind::Diagonal: return 0.0;
        case Kind::Circulant: {
            // entry (i, i+s) = a_s must equal conj of entry (i+s, i), i.e. conj(a_{-s})
            auto coef = [&](long long s) {
                cx a = 0;
                for (const auto& [t, b] : stencil_)
                    if (mod(t, n_) == mod(s, n_)) a += b;
                return a;
            };
            double r = 0;
            for (const auto& st : stencil_) {
                long long s = st.first;
                r = std::max(r, std::abs(coef(s) - std::conj(coef(-s))));
            }
            return r;
        }
    }
    return 0.0;
}

json SamplingOp::describe() const {
    json j;
    j["dim"] = n_;
    switch (kind_) {
        case Kind::Dense: j["kind"] = "dense"; break;
        case Kind::Diagonal: j["kind"] = "diagonal"; break;
        case Kind::Circulant: {
            j["kind"] = "circulant";
            json st = json::array();
            for (const auto& [s, a] : stencil_) st.push_back({s, a.real(), a.imag()});
            j["stencil"] = st;
            break;
        }
    }
    return j;
}

// ---------------------------------------------------------------- AtomBasis

AtomBasis AtomBasis::dense(CMat columns) {
    if (columns.rows() != columns.cols()) throw ValidationError("eigenbasis must be square");
    AtomBasis b;
    b.kind_ = Kind::Dense;
    b.n_ = static_cast<int>(columns.cols());
    b.cols_ = std::move(columns);
    return b;
}

AtomBasis AtomBasis::fourier(int n, int offset, int sign) {
    if (n < 1 || (sign != 1 && sign != -1)) throw ValidationError("invalid Fourier basis parameters");
    AtomBasis b;
    b.kind_ = Kind::Fourier;
    b.n_ = n;
    b.offset_ = offset;
    b.sign_ = sign;
    b.tw_.resize(static_cast<size_t>(n));
    for (int m = 0; m < n; ++m) b.tw_[m] = std::polar(1.0, 2.0 * kPi * static_cast<double>(m) / n);
    return b;
}

cx AtomBasis::twiddle(long long m) const { return tw_[static_cast<size_t>(mod(m, n_))]; }

CVec AtomBasis::column(int k) const {
    if (kind_ == Kind::Dense) return cols_.col(k);
    CVec c(n_);
    const double s = 1.0 / std::sqrt(static_cast<double>(n_));
    const long long kk = k - offset_;
    for (int l = 0; l < n_; ++l) c(l) = twiddle(sign_ * kk * (l - offset_)) * s;
    return c;
}

CVec AtomBasis::coefficients(const CVec& x) const {
    if (x.size() != n_) throw ValidationError("coefficients: vector has wrong dimension");
    if (kind_ == Kind::Dense) {
        CVec c(n_);
        parallel_for(0, n_, [&](std::ptrdiff_t k) { c(k) = inner(x, CVec(cols_.col(k))); });
        return c;
    }
    CVec c(n_);
    const double s = 1.0 / std::sqrt(static_cast<double>(n_));
    parallel_for(0, n_, [&](std::ptrdiff_t k) {
        const long long kk = k - offset_;
        long long m = mod(-sign_ * kk * (-offset_), n_);
        const long long step = mod(-sign_ * kk, n_);
        // real arithmetic: std::complex products go through the NaN-checking path
        const cx* xs = x.data();
        double re = 0, im = 0;
        for (int l = 0; l < n_; ++l) {
            const cx a = xs[l], t = tw_[static_cast<size_t>(m)];
            re += a.real() * t.real() - a.imag() * t.imag();
            im += a.real() * t.imag() + a.imag() * t.real();
            m += step;
            if (m >= n_) m -= n_;
        }
        const cx acc(re, im);
        c(k) = acc * s;
    });
    return c;
}

CVec AtomBasis::coefficients(const SparseVec& x) const {
    if (x.dim != n_) throw ValidationError("coefficients: vector has wrong dimension");
    CVec c(n_);
    if (kind_ == Kind::Dense) {
        parallel_for(0, n_, [&](std::ptrdiff_t k) {
            cx acc = 0;
            for (size_t t = 0; t < x.idx.size(); ++t) acc += x.val[t] * std::conj(cols_(x.idx[t], k));
            c(k) = acc;
        });
        return c;
    }
    const double s = 1.0 / std::sqrt(static_cast<double>(n_));
    parallel_for(0, n_, [&](std::ptrdiff_t k) {
        const long long kk = k - offset_;
        cx acc = 0;
        for (size_t t = 0; t < x.idx.size(); ++t)
            acc += x.val[t] * twiddle(-sign_ * kk * (x.idx[t] - offset_));
        c(k) = acc * s;
    });
    return c;
}

CVec AtomBasis::synthesize(const CVec& c) const {
    if (c.size() != n_) throw ValidationError("synthesize: coefficient vector has wrong dimension");
    if (kind_ == Kind::Dense) return cols_ * c;
    CVec x(n_);
    const double s = 1.0 / std::sqrt(static_cast<double>(n_));
    parallel_for(0, n_, [&](std::ptrdiff_t l) {
        const long long ll = l - offset_;
        long long m = mod(sign_ * ll * (-offset_), n_);
        const long long step = mod(sign_ * ll, n_);
        // real arithmetic: std::complex products go through the NaN-checking path
        const cx* xs = c.data();
        double re = 0, im = 0;
        for (int k = 0; k < n_; ++k) {
            const cx a = xs[k], t = tw_[static_cast<size_t>(m)];
            re += a.real() * t.real() - a.imag() * t.imag();
            im += a.real() * t.imag() + a.imag() * t.real();
            m += step;
            if (m >= n_) m -= n_;
        }
        const cx acc(re, im);
        x(l) = acc * s;
    });
    return x;
}

CMat AtomBasis::to_dense() const {
    if (kind_ == Kind::Dense) return cols_;
    CMat m(n_, n_);
    parallel_for(0, n_, [&](std::ptrdiff_t k) { m.col(k) = column(static_cast<int>(k)); });
    return m;
}

json AtomBasis::describe() const {
    json j;
    j["size"] = n_;
    if (kind_ == Kind::Dense) {
        j["kind"] = "dense";
    } else {
        j["kind"] = "fourier";
        j["offset"] = offset_;
        j["sign"] = sign_;
    }
    return j;
}

// --------------------------------------------------------------- validation

void validate_sampling(const Sampling& s) {
    const int n = s.dim;
    if (s.basis.size() != n || s.op.dim() != n || static_cast<int>(s.eigenvalues.size()) != n)
        throw NumericalError("sampling: inconsistent dimensions");
    double scale = 1.0;
    for (double l : s.eigenvalues) scale = std::max(scale, std::abs(l));
    if (s.op.symmetry_defect() > kSymTol * scale) throw NumericalError("sampling: operator not symmetric");

    // orthonormality: full Gram when affordable, else an evenly spaced subset
    std::vector<int> pick;
    if (n <= 2048) {
        pick.resize(static_cast<size_t>(n));
        std::iota(pick.begin(), pick.end(), 0);
    } else {
        for (int t = 0; t < 64; ++t) pick.push_back(static_cast<int>((static_cast<long long>(t) * n) / 64));
    }
    CMat cols(n, static_cast<Eigen::Index>(pick.size()));
    for (size_t t = 0; t < pick.size(); ++t) cols.col(static_cast<Eigen::Index>(t)) = s.basis.column(pick[t]);
    if (orthonormality_defect(cols) > 1e-10) throw NumericalError("sampling: eigenvectors not orthonormal");

    std::vector<double> res(static_cast<size_t>(n));
    parallel_for(0, n, [&](std::ptrdiff_t k) {
        CVec f = s.basis.column(static_cast<int>(k));
        res[k] = std::sqrt(norm2(s.op.apply(f) - s.eigenvalues[k] * f)) / (1 + std::abs(s.eigenvalues[k]));
    });
    for (int k = 0; k < n; ++k)
        if (res[k] > 1e-9) throw NumericalError("sampling: eigen-residual too large at atom " + std::to_string(k));
}

void validate_scale(const Sampling& s, const Scale& sc) {
    if (sc.vectors.size() != sc.weights.size() || sc.vectors.empty())
        throw ValidationError("scale: vectors and weights must be nonempty and of equal length");
    CompensatedSum<double> total;
    for (int j = 0; j < sc.count(); ++j) {
        if (sc.vectors[j].dim != s.dim) throw ValidationError("scale: vector dimension does not match sampling");
        if (!(sc.weights[j] >= 0)) throw ValidationError("scale: negative weight");
        total.add(sc.mass(j));
    }
    if (std::abs(total.value() - 1.0) > 1e-10)
        throw NumericalError("scale: sum of c_j |e_j|^2 is " + fmt(total.value()) + ", expected 1");
    if (sc.bias == Scale::Bias::Mass) {
        for (int j = std::max(sc.prefix, 1); j < sc.count(); ++j)
            if (sc.mass(j) > sc.mass(j - 1) * (1 + 1e-12))
                throw NumericalError("scale: bias violated beyond the standard prefix");
    } else {
        // c_j = 2^-j min(1, |e_j|^-2) / Z, so the tail mass beyond J0 is at most 2^-J0 / Z
        double n1 = sc.vectors[0].norm2();
        double z = 0.5 * std::min(1.0, 1.0 / n1) / sc.weights[0];
        CompensatedSum<double> tail;
        for (int j = sc.prefix; j < sc.count(); ++j) tail.add(sc.mass(j));
        if (tail.value() > std::ldexp(1.0, -sc.prefix) / z * (1 + 1e-12))
            throw NumericalError("scale: bias tail bound violated");
    }
}

// -------------------------------------------------------------------- scale

std::vector<double> dyadic_weights(const std::vector<double>& norms2) {
    const int J = static_cast<int>(norms2.size());
    const double denom = 1.0 - std::ldexp(1.0, -J);
    std::vector<double> c(static_cast<size_t>(J));
    for (int j = 1; j <= J; ++j) {
        if (!(norms2[j - 1] > 0)) throw ValidationError("scale: zero vector");
        c[j - 1] = std::ldexp(1.0, -j) / (denom * norms2[j - 1]);
    }
    return c;
}

Scale dyadic_scale(const Sampling& s, const std::vector<Vec>& prefix) {
    const int n = s.dim;
    std::vector<CVec> family;
    std::vector<CVec> ortho;  // Gram-Schmidt basis of the running span
    auto residual = [&](const CVec& v) {
        CVec r = v;
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : ortho) r -= inner(r, q) * q;
        return r;
    };
    for (const auto& v : prefix) {
        if (v.dim() != n) throw ValidationError("dyadic_scale: prefix vector not in the sampling space");
        double nv = std::sqrt(norm2(v.coords));
        if (!(nv > 0)) throw ValidationError("dyadic_scale: zero vector in prefix");
        family.push_back(v.coords);
        CVec r = residual(v.coords);
        double nr = std::sqrt(norm2(r));
        if (nr > 1e-10 * nv) ortho.push_back(r / nr);
    }
    for (int i = 0; i < n && static_cast<int>(ortho.size()) < n; ++i) {
        CVec e = CVec::Zero(n);
        e(i) = 1.0;
        CVec r = residual(e);
        double nr = std::sqrt(norm2(r));
        if (nr > 1e-8) {
            ortho.push_back(r / nr);
            family.push_back(e);
        }
    }
    Scale sc;
    std::vector<double> n2;
    for (const auto& v : family) {
        sc.vectors.push_back(SparseVec::from_dense(v));
        n2.push_back(sc.vectors.back().norm2());
    }
    sc.weights = dyadic_weights(n2);
    sc.prefix = std::min<int>(16, static_cast<int>(prefix.size()));
    sc.bias = Scale::Bias::Mass;
    validate_scale(s, sc);
    return sc;
}

// --------------------------------------------------------------- projection

Sampling build_projection_sampling(const OpAction& op, const std::vector<Vec>& span, double tol) {
    if (span.empty()) throw ValidationError("projection sampling: empty span");
    const int amb = span.front().dim();
    const int n = static_cast<int>(span.size());
    bool real = true;
    CMat s(amb, n);
    for (int k = 0; k < n; ++k) {
        if (span[k].dim() != amb) throw ValidationError("projection sampling: span dimension mismatch");
        real = real && span[k].field == Field::Real;
        double nk = std::sqrt(norm2(span[k].coords));
        if (!(nk > 0)) throw ValidationError("projection sampling: rank-deficient span (zero vector)");
        s.col(k) = span[k].coords / nk;
    }
    // normalized Gram matrix must be well conditioned
    CMat g = s.adjoint() * s;
    Eigen::SelfAdjointEigenSolver<CMat> ge(g);
    if (ge.info() != Eigen::Success || ge.eigenvalues().minCoeff() < tol)
        throw ValidationError("projection sampling: rank-deficient span");

    CMat q = s;
    for (int k = 0; k < n; ++k) {
        for (int pass = 0; pass < 2; ++pass)
            for (int l = 0; l < k; ++l) q.col(k) -= inner(CVec(q.col(k)), CVec(q.col(l))) * q.col(l);
        q.col(k) /= std::sqrt(norm2(q.col(k)));
    }
    CMat aq(amb, n);
    for (int k = 0; k < n; ++k) {
        CVec y = op(q.col(k));
        if (y.size() != amb) throw ValidationError("projection sampling: operator changes dimension");
        aq.col(k) = y;
    }
    CMat at = q.adjoint() * aq;
    if (real && (q.imag().cwiseAbs().maxCoeff() > 0 || at.imag().cwiseAbs().maxCoeff() > 1e-14 * std::max(1.0, max_abs(at))))
        real = false;
    DenseOp dop{(at + at.adjoint()) * 0.5, real ? Field::Real : Field::Complex, true};
    if (real) dop.entries = dop.entries.real().cast<cx>();
    Eigh e = eigh_self_adjoint(dop, tol);

    Sampling out;
    out.field = dop.field;
    out.dim = n;
    out.eigenvalues = e.values;
    out.basis = AtomBasis::dense(e.vectors);
    out.op = SamplingOp::dense(dop.entries);
    out.ambient.kind = AmbientMap::Kind::Isometry;
    out.ambient.dim = n;
    out.ambient.ambient_dim = amb;
    out.ambient.q = q;
    out.provenance = {"projection", {{"span_size", n}, {"ambient_dim", amb}}};
    validate_sampling(out);
    return out;
}

// -------------------------------------------------------------------- shift

std::vector<int> interleaved_indices(int m) {
    std::vector<int> out{0};
    for (int l = 1; l <= m; ++l) {
        out.push_back(l);
        out.push_back(-l);
    }
    return out;
}

SamplingAndScale build_shift_sampling(int n) {
    if (n % 2 == 0) throw ValidationError("N must be odd (got " + std::to_string(n) + ")");
    if (n < 3) throw ValidationError("N must be at least 3 (got " + std::to_string(n) + ")");
    const int m = (n - 1) / 2;

    Sampling s;
    s.field = Field::Complex;
    s.dim = n;
    s.eigenvalues.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) s.eigenvalues[i] = std::cos(2.0 * kPi * (i - m) / n);
    s.basis = AtomBasis::fourier(n, m, -1);
    s.op = SamplingOp::circulant(n, {{-1, cx(0.5, 0)}, {1, cx(0.5, 0)}});
    s.ambient.kind = AmbientMap::Kind::Offset;
    s.ambient.dim = n;
    s.ambient.ambient_dim = n + 2;
    s.ambient.offset = 1;

    std::vector<int> order = interleaved_indices(m);
    s.provenance = {"shift", {{"N", n}, {"order", order}}};

    Scale sc;
    for (int l : order) sc.vectors.push_back(SparseVec::unit(n, l + m));
    sc.weights = dyadic_weights(std::vector<double>(static_cast<size_t>(n), 1.0));
    sc.prefix = std::min(16, n);
    sc.bias = Scale::Bias::Mass;
    validate_sampling(s);
    validate_scale(s, sc);
    return {std::move(s), std::move(sc)};
}

CVec shift_ambient_action(const CVec& x) {
    const Eigen::Index n = x.size();
    CVec y = CVec::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (i > 0) y(i) += 0.5 * x(i - 1);
        if (i + 1 < n) y(i) += 0.5 * x(i + 1);
    }
    return y;
}

// --------------------------------------------------------------------- diff

std::vector<Rational> rational_enumeration(int count) {
    std::vector<Rational> out;
    auto push = [&](long long p, long long q) {
        if (static_cast<int>(out.size()) < count) out.push_back({p, q});
    };
    push(0, 1);
    push(1, 1);
    push(-1, 1);
    for (long long h = 2; static_cast<int>(out.size()) < count; ++h) {
        for (long long a = 1; a < h && static_cast<int>(out.size()) < count; ++a) {
            if (std::gcd(a, h) != 1) continue;
            push(a, h);
            push(-a, h);
            push(h, a);
            push(-h, a);
        }
    }
    return out;
}

long long diff_window(int n, const std::vector<Rational>& rationals) {
    // floor(N^{5/3}) by integer cube root of N^5
    __int128 n5 = 1;
    for (int t = 0; t < 5; ++t) n5 *= n;
    long long r = static_cast<long long>(std::cbrt(static_cast<long double>(n5)));
    while (static_cast<__int128>(r + 1) * (r + 1) * (r + 1) <= n5) ++r;
    while (static_cast<__int128>(r) * r * r > n5) --r;
    long long maxshift = 0;
    for (const auto& q : rationals) maxshift = std::max(maxshift, std::llabs(n * q.num / q.den));
    long long safe = static_cast<long long>(n) * n - maxshift - 2;
    return std::min(r, safe);
}

SamplingAndScale build_diff_sampling(int n, int J, std::vector<Rational> rationals) {
    if (n < 1) throw ValidationError("N must be positive");
    if (J < 1) throw ValidationError("J must be at least 1");
    if (rationals.empty()) rationals = rational_enumeration(J);
    if (static_cast<int>(rationals.size()) < J) throw ValidationError("fewer rationals than J");
    rationals.resize(static_cast<size_t>(J));
    if (rationals.front().num != 0) throw ValidationError("the first rational must be 0");
    long long l = 1;
    for (auto& q : rationals) {
        if (q.den <= 0) throw ValidationError("rational denominators must be positive");
        long long g = std::gcd(std::llabs(q.num), q.den);
        if (g > 1) {
            q.num /= g;
            q.den /= g;
        }
        l = std::lcm(l, q.den);
    }
    if (n % l != 0)
        throw ValidationError("N must be divisible by the lcm of the rational denominators (" + std::to_string(l) +
                              "), got N=" + std::to_string(n));
    const long long n1 = diff_window(n, rationals);
    if (n1 < n)
        throw ValidationError("window overflow: N1=" + std::to_string(n1) + " < N=" + std::to_string(n));

    const int half = n * n;
    const int dim = 2 * half;
    Sampling s;
    s.field = Field::Complex;
    s.dim = dim;
    s.eigenvalues.resize(static_cast<size_t>(dim));
    for (int i = 0; i < dim; ++i) s.eigenvalues[i] = n * std::sin(kPi * (i - half) / static_cast<double>(half));
    s.basis = AtomBasis::fourier(dim, half, 1);
    // A~ = -i (L - R) / (2/N); (L x)_i = x_{i+1}, (R x)_i = x_{i-1}
    s.op = SamplingOp::circulant(dim, {{1, cx(0, -0.5 * n)}, {-1, cx(0, 0.5 * n)}});
    s.ambient.kind = AmbientMap::Kind::Identity;
    s.ambient.dim = dim;
    s.ambient.ambient_dim = dim;

    // e~ on the grid, in orthonormal coordinates u_l = sqrt(N) 1_{s_l}
    const double amp = std::pow(2.0 / kPi, 0.25);
    const double rs = 1.0 / std::sqrt(static_cast<double>(n));
    CVec e = CVec::Zero(dim);
    for (long long k = -n1; k <= n1; ++k) {
        double t = static_cast<double>(k) / n;
        e(k + half) = amp * std::exp(-t * t) * rs;
    }
    e(half) += cx(0, 1.0 / n) * rs;
    SparseVec es = SparseVec::from_dense(e);
    const double en2 = es.norm2();

    Scale sc;
    std::vector<long long> shifts;
    json rat = json::array();
    for (const auto& q : rationals) {
        long long kj = n * q.num / q.den;
        shifts.push_back(kj);
        rat.push_back({q.num, q.den});
        SparseVec v;
        v.dim = dim;
        for (size_t t = 0; t < es.idx.size(); ++t) {
            v.idx.push_back(static_cast<int>(mod(es.idx[t] + kj, dim)));
            v.val.push_back(es.val[t]);
        }
        // keep ascending order
        std::vector<size_t> p(v.idx.size());
        std::iota(p.begin(), p.end(), 0);
        std::sort(p.begin(), p.end(), [&](size_t a, size_t b) { return v.idx[a] < v.idx[b]; });
        SparseVec w;
        w.dim = dim;
        for (size_t t : p) {
            w.idx.push_back(v.idx[t]);
            w.val.push_back(v.val[t]);
        }
        sc.vectors.push_back(std::move(w));
    }
    sc.weights = dyadic_weights(std::vector<double>(static_cast<size_t>(J), en2));
    sc.prefix = std::min(16, J);
    sc.bias = Scale::Bias::Mass;
    s.provenance = {"diff", {{"N", n}, {"J", J}, {"N1", n1}, {"rationals", rat}, {"shifts", shifts}}};
    validate_sampling(s);
    validate_scale(s, sc);
    return {std::move(s), std::move(sc)};
}

// ---------------------------------------------------------------------- PVM

PVMOracle pvm_from_operator(const DenseOp& a) {
    Eigh e = eigh_self_adjoint(a);
    return [e](double lo, double hi, const CVec& x) {
        CVec y = CVec::Zero(x.size());
        for (size_t k = 0; k < e.values.size(); ++k) {
            double l = e.values[k];
            if (lo <= l && l < hi) {
                CVec v = e.vectors.col(static_cast<Eigen::Index>(k));
                y += inner(x, v) * v;
            }
        }
        return y;
    };
}

PVMOracle pvm_from_diagonal(std::vector<double> values) {
    return [values](double lo, double hi, const CVec& x) {
        if (x.size() != static_cast<Eigen::Index>(values.size()))
            throw ValidationError("PVM applied to vector of wrong dimension");
        CVec y = CVec::Zero(x.size());
        for (size_t k = 0; k < values.size(); ++k)
            if (lo <= values[k] && values[k] < hi) y(static_cast<Eigen::Index>(k)) = x(static_cast<Eigen::Index>(k));
        return y;
    };
}

namespace {

bool is_integer(double x) { return std::abs(x - std::round(x)) < 1e-12; }

// Endpoint steps 1/2, 1/4, ... while still a multiple of 1/M; 1 when M is odd.
std::vector<double> probe_steps(int mesh) {
    std::vector<double> out;
    double d = (mesh % 2 == 0) ? 0.5 : 1.0;
    while (d * mesh >= 1 - 1e-12 && is_integer(d * mesh)) {
        out.push_back(d);
        d /= 2;
    }
    return out;
}

}  // namespace

std::vector<PVMProbe> enumerate_pvm_probes(const PVMOracle& pvm, const std::vector<CVec>& g, double window, int mesh,
                                           int probe_count) {
    std::vector<PVMProbe> out;
    for (double d : probe_steps(mesh)) {
        const long long np = std::llround(2 * window / d);
        for (size_t k = 0; k < g.size(); ++k) {
            for (long long ia = 0; ia <= np; ++ia) {
                for (long long ib = ia + 1; ib <= np; ++ib) {
                    if (static_cast<int>(out.size()) >= probe_count) return out;
                    double a = -window + ia * d, b = -window + ib * d;
                    CVec v = pvm(a, b, g[k]);
                    double nv = std::sqrt(norm2(v));
                    if (nv <= 1e-14) continue;
                    bool dup = false;
                    for (const auto& p : out)
                        if (std::sqrt(norm2(p.vec - v)) <= 1e-12 * std::max(1.0, nv)) {
                            dup = true;
                            break;
                        }
                    if (!dup) out.push_back({a, b, static_cast<int>(k), v});
                }
            }
        }
    }
    return out;
}

SamplingAndScale build_pvm_sampling(const PVMOracle& pvm, const std::vector<Vec>& gin, double window, int mesh,
                                    int probe_count) {
    if (!(window > 0)) throw ValidationError("PVM sampling: window W must be positive");
    if (mesh < 1) throw ValidationError("PVM sampling: mesh M must be at least 1");
    if (probe_count < 1) throw ValidationError("PVM sampling: probe count must be at least 1");
    if (!is_integer(window * mesh)) throw ValidationError("PVM sampling: W*M must be an integer");
    if (gin.empty()) throw ValidationError("PVM sampling: empty g family");
    const int amb = gin.front().dim();
    const long long lo = std::llround(-window * mesh), hi = std::llround(window * mesh);
    const double inf = std::numeric_limits<double>::infinity();
    bool real = true;

    // pieces of each spectral subspace H_k at mesh resolution, plus the two tails
    auto pieces = [&](const CVec& x) {
        std::vector<CVec> out;
        out.push_back(pvm(-inf, -window, x));
        for (long long l = lo; l < hi; ++l)
            out.push_back(pvm(static_cast<double>(l) / mesh, static_cast<double>(l + 1) / mesh, x));
        out.push_back(pvm(window, inf, x));
        return out;
    };
    std::vector<CVec> g;
    std::vector<CVec> sub;  // orthonormal basis of H_1 + ... + H_{k-1}
    for (const auto& gv : gin) {
        if (gv.dim() != amb) throw ValidationError("PVM sampling: g dimension mismatch");
        real = real && gv.field == Field::Real;
        CVec r = gv.coords;
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : sub) r -= inner(r, q) * q;
        g.push_back(r);
        for (auto& p : pieces(r)) {
            double np = std::sqrt(norm2(p));
            if (np > 1e-14) sub.push_back(p / np);
        }
    }

    std::vector<PVMProbe> probes = enumerate_pvm_probes(pvm, g, window, mesh, probe_count);
    if (probes.empty()) throw ValidationError("PVM sampling: every probe vanishes");

    std::vector<CVec> atoms;
    std::vector<double> eig;
    json kept = json::array();
    for (size_t k = 0; k < g.size(); ++k) {
        for (long long l = lo; l < hi; ++l) {
            CVec gs = pvm(static_cast<double>(l) / mesh, static_cast<double>(l + 1) / mesh, g[k]);
            double ng = std::sqrt(norm2(gs));
            if (ng <= 1e-14) continue;
            bool hit = false;
            for (const auto& p : probes)
                if (std::abs(inner(p.vec, gs)) > 1e-14 * ng) {
                    hit = true;
                    break;
                }
            if (!hit) continue;
            atoms.push_back(gs / ng);
            eig.push_back(static_cast<double>(l) / mesh);
            kept.push_back({k, l});
        }
    }
    if (atoms.empty()) throw ValidationError("PVM sampling: degenerate g family (no kept cells)");
    const int n = static_cast<int>(atoms.size());
    CMat q(amb, n);
    for (int i = 0; i < n; ++i) q.col(i) = atoms[i];
    if (q.imag().cwiseAbs().maxCoeff() > 0) real = false;

    Sampling s;
    s.field = real ? Field::Real : Field::Complex;
    s.dim = n;
    s.eigenvalues = eig;
    s.basis = AtomBasis::dense(CMat::Identity(n, n));
    s.op = SamplingOp::diagonal(eig);
    s.ambient.kind = AmbientMap::Kind::Isometry;
    s.ambient.dim = n;
    s.ambient.ambient_dim = amb;
    s.ambient.q = q;

    Scale sc;
    std::vector<double> w;
    CompensatedSum<double> z;
    json pj = json::array();
    for (size_t j = 0; j < probes.size(); ++j) {
        const auto& p = probes[j];
        CVec c = q.adjoint() * p.vec;
        double np2 = norm2(p.vec);
        if (std::sqrt(norm2(p.vec - q * c)) > 1e-10 * std::sqrt(np2))
            throw NumericalError("PVM sampling: probe not contained in the sampling space");
        sc.vectors.push_back(SparseVec::from_dense(c));
        double wj = std::ldexp(1.0, -static_cast<int>(j + 1)) * std::min(1.0, 1.0 / np2);
        w.push_back(wj);
        z.add(wj * np2);
        pj.push_back({p.a, p.b, p.k});
    }
    for (double& x : w) x /= z.value();
    sc.weights = w;
    sc.prefix = std::min(16, sc.count());
    sc.bias = Scale::Bias::Weight;
    s.provenance = {"pvm", {{"W", window}, {"M", mesh}, {"K", probe_count}, {"probes", pj}, {"kept", kept}}};
    validate_sampling(s);
    validate_scale(s, sc);
    return {std::move(s), std::move(sc)};
}

PVMDemo build_pvm_demo(int dim, int mesh, int probe_count) {
    if (dim < 1 || dim > 64) throw ValidationError("PVM demo: dim must be in [1, 64]");
    std::vector<double> lam(static_cast<size_t>(dim));
    for (int i = 0; i < dim; ++i) lam[i] = (2.0 * i + 1 - dim) / 4.0;
    PVMDemo d;
    d.op.entries = CMat::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) d.op.entries(i, i) = lam[i];
    d.op.field = Field::Real;
    d.op.symmetric = true;
    d.window = std::floor((dim - 1) / 4.0) + 1;
    Vec g(CVec::Constant(dim, 1.0 / std::sqrt(static_cast<double>(dim))), Field::Real);
    d.built = build_pvm_sampling(pvm_from_diagonal(lam), {g}, d.window, mesh, probe_count);
    d.built.sampling.provenance.params["demo_dim"] = dim;
    return d;
}

// ------------------------------------------------------------- graph defect

GraphDefectReport graph_defect(const Sampling& s, const OpAction& op, const std::vector<Vec>& xs) {
    GraphDefectReport r;
    CompensatedSum<double> sum;
    for (const auto& x : xs) {
        CVec px = s.ambient.project(x.coords);
        CVec ax = op(x.coords);
        if (ax.size() != s.ambient.ambient_dim) throw ValidationError("graph_defect: operator changes dimension");
        CVec pax = s.ambient.project(ax);
        double d = std::sqrt(norm2(s.op.apply(px) - pax));
        r.defects.push_back(d);
        r.outside.push_back(std::sqrt(norm2(ax - s.ambient.lift(pax))));
        r.max = std::max(r.max, d);
        sum.add(d);
    }
    if (!xs.empty()) r.mean = sum.value() / static_cast<double>(xs.size());
    return r;
}

}  // namespace spectral_hull
