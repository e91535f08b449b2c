#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "spectral_hull/errors.hpp"
#include "spectral_hull/experiments.hpp"

using namespace spectral_hull;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();


struct Built {
    SamplingAndScale b;
    SpectralAtomMeasure m;
};

Built shift(int n) {
    Built r{build_shift_sampling(n), {}};
    r.m = atom_measure(r.b.sampling, r.b.scale);
    return r;
}

Built diff(int n) {
    Built r{build_diff_sampling(n, 6), {}};
    r.m = atom_measure(r.b.sampling, r.b.scale);
    return r;
}

}  // namespace

TEST_CASE("IntervalSet normalization and set operations") {
    IntervalSet v({{2, 3}, {0, 1}, {0.5, 1.5}});
    REQUIRE(v.intervals().size() == 2);
    CHECK(v.intervals()[0].a == 0);
    CHECK(v.intervals()[0].b == 1.5);
    CHECK(v.contains(0));
    CHECK_FALSE(v.contains(1.5));
    CHECK(v.contains(2.999));
    CHECK_FALSE(v.contains(3));

    // touching intervals merge
    CHECK(IntervalSet({{0, 1}, {1, 2}}).intervals().size() == 1);

    IntervalSet w = IntervalSet::single(1, 2.5);
    auto i = v.intersect(w);
    REQUIRE(i.intervals().size() == 2);
    CHECK(i.intervals()[0].a == 1);
    CHECK(i.intervals()[0].b == 1.5);
    CHECK(i.intervals()[1].a == 2);
    CHECK(i.intervals()[1].b == 2.5);
    CHECK(v.unite(w).intervals().size() == 1);

    auto c = v.complement();
    for (double x : {-5.0, 0.0, 1.0, 1.5, 1.9, 2.0, 3.0, 7.0}) CHECK(c.contains(x) != v.contains(x));
    CHECK(IntervalSet::empty().complement().contains(-1e300));
    CHECK(IntervalSet::real_line().complement().is_empty());

    auto j = c.to_json();
    auto back = IntervalSet::from_json(j);
    REQUIRE(back.intervals().size() == c.intervals().size());
    for (size_t t = 0; t < back.intervals().size(); ++t) {
        CHECK(back.intervals()[t].a == c.intervals()[t].a);
        CHECK(back.intervals()[t].b == c.intervals()[t].b);
    }
    CHECK(back.intervals().front().a == -kInf);

    CHECK_THROWS_AS(IntervalSet({{1, 1}}), ValidationError);
    CHECK_THROWS_AS(IntervalSet({{2, 1}}), ValidationError);
    CHECK_THROWS_AS(IntervalSet::from_json(json::parse(R"([["x", 1]])")), ValidationError);
}

TEST_CASE("pvm_project examples") {
    auto r = shift(5);
    const auto& s = r.b.sampling;
    auto id = pvm_project(IntervalSet::real_line(), s, r.m);
    CHECK(max_abs(id.matrix.entries - CMat::Identity(5, 5)) <= 1e-10);
    auto zero = pvm_project(IntervalSet::empty(), s, r.m);
    CHECK(max_abs(zero.matrix.entries) == 0.0);

    auto p = pvm_project(IntervalSet::single(0.9, 1.1), s, r.m);
    CHECK(std::abs(p.matrix.entries.trace() - 1.0) <= 1e-12);
    CVec f0 = s.basis.to_dense().col(2);
    CHECK(max_abs(p.matrix.entries - f0 * f0.adjoint()) <= 1e-12);
    CHECK(max_abs(p.matrix.entries * p.matrix.entries - p.matrix.entries) <= 1e-10);
    CHECK(max_abs(p.matrix.entries - p.matrix.entries.adjoint()) <= 1e-10);

    Vec x(CVec::Random(5));
    Vec px = pvm_apply(IntervalSet::single(0.9, 1.1), x, s, r.m);
    CHECK(max_abs(px.coords - p.matrix.entries * x.coords) <= 1e-12);
}

TEST_CASE("pvm_algebra_check") {
    auto r = shift(9);
    const auto& s = r.b.sampling;
    SUBCASE("disjoint sets have orthogonal ranges") {
        IntervalSet v1 = IntervalSet::single(-2, 0), v2 = IntervalSet::single(0, 2);
        auto p1 = pvm_project(v1, s, r.m), p2 = pvm_project(v2, s, r.m);
        CHECK(max_abs(p1.matrix.entries * p2.matrix.entries) <= 1e-10);
        CHECK(pvm_algebra_check(v1, v2, s, r.m).max() <= 1e-10);
    }
    SUBCASE("equal sets") {
        IntervalSet v = IntervalSet::single(-0.5, 0.8);
        auto d = pvm_algebra_check(v, v, s, r.m);
        CHECK(d.multiplicativity <= 1e-10);
        CHECK(d.idempotence <= 1e-10);
    }
    SUBCASE("random interval pairs") {
        auto big = shift(33);
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> u(-1.2, 1.2);
        for (int t = 0; t < 20; ++t) {
            double a = u(rng), b = u(rng), c = u(rng), e = u(rng);
            IntervalSet v1 = IntervalSet::single(std::min(a, b), std::max(a, b) + 1e-3);
            IntervalSet v2 = IntervalSet::single(std::min(c, e), std::max(c, e) + 1e-3).unite(IntervalSet::single(1.5, 2));
            auto d = pvm_algebra_check(v1, v2, big.b.sampling, big.m, static_cast<std::uint64_t>(t));
            CHECK(d.max() <= 1e-10);
        }
    }
    SUBCASE("diff example, standard sets") {
        auto dr = diff(6);
        CHECK(standard_pvm_defects(dr.b.sampling, dr.m).max() <= 1e-10);
    }
    CHECK_THROWS_AS(pvm_algebra_check(IntervalSet::real_line(), IntervalSet::real_line(), s, r.m, 1, 0),
                    ValidationError);
}

TEST_CASE("integrate_step_function") {
    auto r = shift(9);
    const auto& s = r.b.sampling;
    StepFunction one{{-3, 3}, {1}};
    CHECK(max_abs(integrate_step_function(one, s, r.m).entries - CMat::Identity(9, 9)) <= 1e-10);

    CHECK(resolution_defect(s, r.m) <= 1e-10);
    auto ep = eigenvalue_partition(s);
    CHECK(max_abs(integrate_step_function(ep, s, r.m).entries - s.op.to_dense()) <= 1e-10);

    StepFunction narrow{{-0.5, 0.5}, {1}};
    CHECK_THROWS_AS(integrate_step_function(narrow, s, r.m), ValidationError);
    StepFunction bad{{-3, 0, 3}, {1}};
    CHECK_THROWS_AS(integrate_step_function(bad, s, r.m), ValidationError);
    StepFunction unsorted{{-3, 1, 0, 3}, {1, 2, 3}};
    CHECK_THROWS_AS(integrate_step_function(unsorted, s, r.m), ValidationError);
}

TEST_CASE("identity staircase on the diff example") {
    auto r = diff(12);
    const auto& s = r.b.sampling;
    CHECK(resolution_defect(s, r.m) <= 1e-10);
    const CMat a = s.op.to_dense();
    double lo = *std::min_element(s.eigenvalues.begin(), s.eigenvalues.end()) - 1;
    double hi = *std::max_element(s.eigenvalues.begin(), s.eigenvalues.end()) + 1;
    std::vector<double> err;
    for (int mesh : {4, 8, 16, 32}) {
        auto st = identity_staircase(mesh, lo, hi);
        double e = max_abs(integrate_step_function(st, s, r.m).entries - a);
        CHECK(e <= 1.0 / mesh + 1e-10);
        err.push_back(e);
    }
    for (size_t i = 1; i < err.size(); ++i) {
        double ratio = err[i] / err[i - 1];
        CHECK(ratio >= 0.4);
        CHECK(ratio <= 0.6);
    }
}

TEST_CASE("signed measure") {
    auto r = shift(9);
    const auto& s = r.b.sampling;
    const CMat f = s.basis.to_dense();
    Vec f2(f.col(2));
    double l2 = s.eigenvalues[2];
    CHECK(std::abs(signed_measure(f2, f2, IntervalSet::single(l2 - 1e-3, l2 + 1e-3), s) - 1.0) <= 1e-12);
    Vec g(f.col(0) + f.col(1));
    CHECK(std::abs(signed_measure(g, g, IntervalSet::single(l2 - 1e-3, l2 + 1e-3), s)) <= 1e-12);

    auto xs = random_unit_vectors(9, 2, 5);
    Vec x(xs[0]), y(xs[1]);
    auto sm = signed_atom_measure(x, x, s);
    for (auto c : sm.contributions) {
        CHECK(c.real() >= 0);
        CHECK(std::abs(c.imag()) <= 1e-15);
    }
    CHECK(std::abs(sm.value(IntervalSet::real_line()) - norm2(x.coords)) <= 1e-10);
    std::vector<double> cuts{-kInf, -0.7, -0.1, 0.3, 0.95, kInf};
    cx total = 0;
    for (size_t i = 0; i + 1 < cuts.size(); ++i) total += sm.value(IntervalSet::single(cuts[i], cuts[i + 1]));
    CHECK(std::abs(total - norm2(x.coords)) <= 1e-10);

    IntervalSet v = IntervalSet::single(-0.5, 0.99);
    auto p = pvm_project(v, s, r.m);
    cx direct = inner(CVec(p.matrix.entries * x.coords), y.coords);
    CHECK(std::abs(signed_measure(x, y, v, s) - direct) <= 1e-12);
}

TEST_CASE("spectral resolution identities") {
    auto r = shift(17);
    const auto& s = r.b.sampling;
    const CMat a = s.op.to_dense();
    const CMat f = s.basis.to_dense();
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.1, 1.1);
    for (int t = 0; t < 10; ++t) {
        double p = u(rng), q = u(rng);
        auto pr = pvm_project(IntervalSet::single(std::min(p, q), std::max(p, q) + 1e-3), s, r.m);
        CHECK(max_abs(pr.matrix.entries * a - a * pr.matrix.entries) <= 1e-10);
    }

    const CMat ia = integrate_step_function(eigenvalue_partition(s), s, r.m).entries;
    for (const auto& x : random_unit_vectors(17, 10, 9)) {
        cx lhs = inner(CVec(ia * x), x);
        CompensatedSum<double> rhs;
        CVec c = f.adjoint() * x;
        for (int k = 0; k < 17; ++k) rhs.add(s.eigenvalues[k] * std::norm(c(k)));
        CHECK(std::abs(lhs - rhs.value()) <= 1e-10);
    }

    // mask multiplication commutes with projection onto the embedded image
    IntervalSet v = IntervalSet::single(0.1, 0.9);
    std::mt19937_64 g(4);
    std::normal_distribution<double> nd;
    for (int t = 0; t < 5; ++t) {
        EmbeddedVec w{CVec(17)};
        for (int k = 0; k < 17; ++k) w.values(k) = cx(nd(g), nd(g));
        auto proj = [&](const EmbeddedVec& e) { return embed(unembed(e, s, r.m), s, r.m); };
        auto mask = [&](EmbeddedVec e) {
            for (int k = 0; k < 17; ++k)
                if (!v.contains(s.eigenvalues[k])) e.values(k) = 0;
            return e;
        };
        CHECK(max_abs(mask(proj(w)).values - proj(mask(w)).values) <= 1e-10);
    }
}

TEST_CASE("staircase residuals closed forms") {
    auto ones = staircase_residuals({1, 1, 1}, {0.2, 0.3, 0.5}, 10);
    for (double v : ones) CHECK(v == 0.0);
    auto half = staircase_residuals({0.5}, {1.0}, 9);
    for (int n = 1; n <= 9; ++n) {
        double want = n % 2 == 0 ? 0.0 : 1.0 - static_cast<double>(n) / (n + 1);
        CHECK(std::abs(half[static_cast<size_t>(n) - 1] - want) <= 1e-15);
    }
    auto zero = staircase_residuals({0.0}, {1.0}, 3);
    for (double v : zero) CHECK(v == 1.0);
    CHECK_THROWS_AS(staircase_residuals({1}, {0.5, 0.5}, 2), ValidationError);
}

TEST_CASE("surjectivity diagnostic on the PVM demo") {
    auto demo = build_pvm_demo(4, 4);
    const auto& s = demo.built.sampling;
    auto m = atom_measure(s, demo.built.scale);
    auto rep = surjectivity_diagnostic(s, m, demo.built.scale, 64);
    REQUIRE(rep.residuals.size() == 64);
    CHECK(rep.residuals[63] <= rep.residuals[0] / 5);
    CHECK(rep.dyadic_nonincreasing);
    CHECK(rep.bound_holds);
    for (size_t n = 1; n < rep.residuals.size(); n *= 2)
        CHECK(rep.residuals[2 * n - 1] <= rep.residuals[n - 1] + 1e-12);
    for (double x : rep.x) {
        CHECK(x >= 0);
        CHECK(x <= 1);
    }
    CHECK(rep.projection_residual <= 1e-10);

    auto d1 = build_pvm_demo(1, 4);
    auto m1 = atom_measure(d1.built.sampling, d1.built.scale);
    CHECK(projection_residual_of_one(d1.built.sampling, m1) <= 1e-12);

    auto r = shift(9);
    CHECK_THROWS_AS(surjectivity_diagnostic(r.b.sampling, r.m, r.b.scale, 8), ValidationError);
    CHECK_THROWS_AS(surjectivity_diagnostic(s, m, demo.built.scale, 0), ValidationError);
}
