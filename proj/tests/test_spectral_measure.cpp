#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "spectral_hull/errors.hpp"
#include "spectral_hull/spectral_measure.hpp"

using namespace spectral_hull;

namespace {

constexpr double kPi = 3.14159265358979323846;

CVec random_cvec(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    CVec x(n);
    for (int i = 0; i < n; ++i) {
        double re = g(rng);
        double im = g(rng);
        x(i) = cx(re, im);
    }
    return x;
}

// composite Simpson, independent of the library's erf-based value
double simpson(double a, double b, int panels, double (*f)(double)) {
    const double h = (b - a) / panels;
    double s = f(a) + f(b);
    for (int i = 1; i < panels; ++i) s += f(a + i * h) * (i % 2 ? 4 : 2);
    return s * h / 3;
}

double g0_raw(double w) { return std::sqrt(kPi / 2) * std::exp(-kPi * kPi * w * w / 2); }

CVec grid_gaussian(int n, bool derivative) {
    const int half = n * n;
    const double rs = 1 / std::sqrt(static_cast<double>(n));
    CVec x(2 * half);
    for (int l = -half; l < half; ++l) {
        double t = static_cast<double>(l) / n;
        double e = std::pow(2 / kPi, 0.25) * std::exp(-t * t);
        x(l + half) = derivative ? cx(0, 2 * t * e) * rs : cx(e * rs, 0);
    }
    return x;
}

}  // namespace

TEST_CASE("shift measure is uniform") {
    for (int n : {3, 5, 33, 257}) {
        auto b = build_shift_sampling(n);
        auto m = atom_measure(b.sampling, b.scale);
        for (double mu : m.mu) CHECK(std::abs(mu - 1.0 / n) < 1e-15);
    }
}

TEST_CASE("atom concentrated on one scale vector violates compatibility") {
    CMat d = CMat::Zero(2, 2);
    d(1, 1) = 1;
    Sampling s = build_projection_sampling([d](const CVec& x) { return CVec(d * x); },
                                           {Vec::unit(2, 0), Vec::unit(2, 1)});
    Scale sc;
    sc.vectors.push_back(SparseVec::from_dense(s.basis.column(0)));
    sc.weights = {1.0};
    CHECK_THROWS_WITH_AS(atom_measure(s, sc), doctest::Contains("compatibility"), ValidationError);
}

TEST_CASE("diff measure near the g0 density at N = 12") {
    auto b = build_diff_sampling(12, 6);
    auto m = atom_measure(b.sampling, b.scale);
    double total = std::accumulate(m.mu.begin(), m.mu.end(), 0.0);
    CHECK(std::abs(total - 1) <= 1e-10);
    double w = 0;
    for (int k = 0; k < m.size(); ++k)
        if (std::abs(static_cast<double>(k - 144) / 12) <= 1) w += m.mu[k];
    double ref = simpson(-1, 1, 4000, g0_raw);
    CHECK(std::abs(w - ref) <= 0.05 * ref);
}

TEST_CASE("embed examples") {
    auto b = build_shift_sampling(7);
    const Sampling& s = b.sampling;
    auto m = atom_measure(s, b.scale);

    EmbeddedVec z = embed(CVec(CVec::Zero(7)), s, m);
    CHECK(z.values.cwiseAbs().maxCoeff() == 0.0);

    // U(g_l)(f_k) = e^{2 pi i l k / N}, k centred
    for (int l = -3; l <= 3; ++l) {
        EmbeddedVec u = embed(Vec::unit(7, l + 3), s, m);
        for (int i = 0; i < 7; ++i) CHECK(std::abs(u.values(i) - std::polar(1.0, 2 * kPi * l * (i - 3) / 7)) < 1e-14);
    }

    const int k0 = 4;
    EmbeddedVec u = embed(s.basis.column(k0), s, m);
    for (int i = 0; i < 7; ++i) CHECK(std::abs(u.values(i) - (i == k0 ? 1 / std::sqrt(m.mu[k0]) : 0.0)) < 1e-13);
    CHECK(std::abs(norm2_mu(u, m) - 1) < 1e-14);
}

TEST_CASE("embed of ambient vectors projects first") {
    auto b = build_shift_sampling(7);
    auto m = atom_measure(b.sampling, b.scale);
    CVec x = CVec::Zero(9);
    x(0) = 3.0;  // outside the sampling window
    x(4) = 1.0;  // g_0
    EmbeddedVec u = embed_ambient(x, b.sampling, m);
    CHECK(std::abs(norm2_mu(u, m) - 1) < 1e-14);
}

TEST_CASE("unembed examples") {
    auto b = build_shift_sampling(9);
    const Sampling& s = b.sampling;
    auto m = atom_measure(s, b.scale);

    CVec f1 = s.basis.column(1);
    CHECK(std::sqrt(norm2(unembed(embed(f1, s, m), s, m).coords - f1)) < 1e-14);

    EmbeddedVec one{CVec::Ones(9)};
    Vec x = unembed(one, s, m);
    CVec want = CVec::Zero(9);
    for (int k = 0; k < 9; ++k) want += std::sqrt(m.mu[k]) * s.basis.column(k);
    CHECK(std::sqrt(norm2(x.coords - want)) < 1e-14);
    CHECK((embed(x, s, m).values - CVec::Ones(9)).cwiseAbs().maxCoeff() < 1e-13);

    for (int l = -4; l <= 4; ++l) {
        EmbeddedVec e;
        e.values.resize(9);
        for (int i = 0; i < 9; ++i) e.values(i) = std::polar(1.0, 2 * kPi * l * (i - 4) / 9);
        CHECK(std::sqrt(norm2(unembed(e, s, m).coords - Vec::unit(9, l + 4).coords)) < 1e-13);
    }
}

TEST_CASE("multiply examples") {
    auto b = build_shift_sampling(9);
    const Sampling& s = b.sampling;
    auto m = atom_measure(s, b.scale);
    EmbeddedVec u = embed(Vec::unit(9, 4), s, m);

    MultiplierFn ones{std::vector<double>(9, 1.0)};
    CHECK((multiply(u, ones).values - u.values).cwiseAbs().maxCoeff() == 0.0);

    EmbeddedVec t = multiply(u, eigenvalue_multiplier(m));
    for (int i = 0; i < 9; ++i) CHECK(std::abs(t.values(i) - std::cos(2 * kPi * (i - 4) / 9)) < 1e-14);
    CVec want = CVec::Zero(9);
    want(3) = want(5) = 0.5;
    CHECK(std::sqrt(norm2(unembed(t, s, m).coords - want)) < 1e-13);

    auto d = build_diff_sampling(12, 6);
    auto dm = atom_measure(d.sampling, d.scale);
    EmbeddedVec du{CVec::Constant(dm.size(), cx(2.5, -1))};
    CHECK(multiply(du, eigenvalue_multiplier(dm)).values(144) == cx(0, 0));
}

TEST_CASE("intertwining examples") {
    auto b = build_shift_sampling(9);
    auto m = atom_measure(b.sampling, b.scale);
    CVec f = b.sampling.basis.column(2);
    CHECK(intertwining_defect(f, CVec(b.sampling.eigenvalues[2] * f), b.sampling, m) <= 1e-10);

    for (int n : {5, 9, 65}) {
        auto bn = build_shift_sampling(n);
        auto mn = atom_measure(bn.sampling, bn.scale);
        const int c = (n - 1) / 2 + 1;  // g_0 in the ambient window
        CVec x = CVec::Zero(n + 2), ax = CVec::Zero(n + 2);
        x(c) = 1;
        ax(c - 1) = ax(c + 1) = 0.5;
        CHECK(intertwining_defect_ambient(x, ax, bn.sampling, mn) <= 1e-10);
    }

    std::vector<double> d;
    for (int n : {12, 24, 48}) {
        auto bn = build_diff_sampling(n, 6);
        auto mn = atom_measure(bn.sampling, bn.scale);
        d.push_back(intertwining_defect_ambient(grid_gaussian(n, false), grid_gaussian(n, true), bn.sampling, mn));
    }
    CHECK(d[1] < d[0]);
    CHECK(d[2] < d[1]);
}

TEST_CASE("measure_of examples") {
    auto b = build_shift_sampling(5);
    auto m = atom_measure(b.sampling, b.scale);
    CHECK(measure_of(m, {}) == 0.0);
    CHECK(std::abs(measure_of(m, {0, 1, 2, 3, 4}) - 1) <= 1e-10);
    CHECK(measure_of(m, {1, 3}) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(measure_of(m, {0, 1}) + measure_of(m, {2, 3, 4}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(measure_of(m, {5}), ValidationError);
}

TEST_CASE("finite Plancherel, linearity, exact intertwining, self-adjoint multiplier") {
    std::mt19937_64 rng(17);
    for (int example = 0; example < 2; ++example) {
        auto b = example == 0 ? build_shift_sampling(65) : build_diff_sampling(6, 3);
        const Sampling& s = b.sampling;
        auto m = atom_measure(s, b.scale);
        auto lam = eigenvalue_multiplier(m);
        for (int t = 0; t < 100; ++t) {
            CVec x = random_cvec(s.dim, rng);
            EmbeddedVec u = embed(x, s, m);
            CHECK(std::abs(norm2_mu(u, m) - norm2(x)) <= 1e-10 * std::max(1.0, norm2(x)));
            if (t % 10) continue;
            CVec y = random_cvec(s.dim, rng);
            cx a(0.7, -0.2);
            EmbeddedVec lhs = embed(CVec(a * x + y), s, m);
            EmbeddedVec rhs{a * u.values + embed(y, s, m).values};
            CHECK((lhs.values - rhs.values).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, u.values.cwiseAbs().maxCoeff()));
            CVec xn = x / std::sqrt(norm2(x));
            CHECK(intertwining_defect(xn, s.op.apply(xn), s, m) <= 1e-10);
            EmbeddedVec v = embed(y, s, m);
            cx l1 = inner_mu(multiply(u, lam), v, m), l2 = inner_mu(u, multiply(v, lam), m);
            CHECK(std::abs(l1 - l2) <= 1e-12 * std::max(1.0, std::abs(l1)));
        }
    }
}
