#include <cmath>
#include <random>

#include "doctest.h"
#include "spectral_hull/errors.hpp"
#include "spectral_hull/linalg.hpp"

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

DenseOp random_hermitian(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    CMat m(n, n);
    for (int j = 0; j < n; ++j) m.col(j) = random_cvec(n, rng);
    DenseOp a;
    a.entries = (m + m.adjoint()) * 0.5;
    a.symmetric = true;
    return a;
}

}  // namespace

TEST_CASE("inner product examples") {
    Vec e1 = Vec::unit(3, 0), e2 = Vec::unit(3, 1);
    CHECK(inner(e1, e1) == cx(1, 0));
    CHECK(inner(e1, e2) == cx(0, 0));

    CVec x(2), y(2);
    x << cx(1, 0), cx(0, 1);
    y << cx(0, 1), cx(1, 0);
    CHECK(std::abs(inner(Vec(x), Vec(y))) == 0.0);

    // conjugate-linear in the second slot
    cx a(0.3, -1.7);
    CHECK(std::abs(inner(Vec(x), Vec(CVec(a * y))) - std::conj(a) * inner(Vec(x), Vec(y))) < 1e-15);
    CHECK(inner(Vec(x), Vec(x)).imag() == 0.0);
    CHECK(inner(Vec(x), Vec(x)).real() > 0.0);
}

TEST_CASE("inner product rejects mismatched spaces") {
    CHECK_THROWS_AS(inner(Vec::unit(3, 0), Vec::unit(4, 0)), ValidationError);
    CHECK_THROWS_AS(inner(Vec::unit(3, 0, Field::Real), Vec::unit(3, 0, Field::Complex)), ValidationError);
}

TEST_CASE("field names") {
    CHECK(field_from_name(field_name(Field::Real)) == Field::Real);
    CHECK(field_from_name(field_name(Field::Complex)) == Field::Complex);
    CHECK_THROWS_AS(field_from_name("quaternion"), ValidationError);
}

TEST_CASE("eigh: 2x2 off-diagonal") {
    DenseOp a;
    a.entries = CMat::Zero(2, 2);
    a.entries(0, 1) = a.entries(1, 0) = 0.5;
    a.field = Field::Real;
    a.symmetric = true;
    Eigh e = eigh_self_adjoint(a);
    REQUIRE(e.values.size() == 2);
    CHECK(e.values[0] == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(e.values[1] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("eigh: identity") {
    DenseOp a;
    a.entries = CMat::Identity(6, 6);
    a.symmetric = true;
    Eigh e = eigh_self_adjoint(a);
    for (double v : e.values) CHECK(std::abs(v - 1.0) < 1e-14);
    CHECK(orthonormality_defect(e.vectors) < 1e-12);
}

TEST_CASE("eigh: 5x5 circulant (L+R)/2") {
    const int n = 5;
    DenseOp a;
    a.entries = CMat::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        a.entries(i, (i + 1) % n) += 0.5;
        a.entries(i, (i + n - 1) % n) += 0.5;
    }
    a.symmetric = true;
    Eigh e = eigh_self_adjoint(a);
    std::vector<double> want;
    for (int k = -2; k <= 2; ++k) want.push_back(std::cos(2 * kPi * k / n));
    std::sort(want.begin(), want.end());
    for (int k = 0; k < n; ++k) CHECK(std::abs(e.values[k] - want[k]) < 1e-13);
}

TEST_CASE("eigh: postconditions on a random hermitian matrix") {
    DenseOp a = random_hermitian(40, 11);
    Eigh e = eigh_self_adjoint(a);
    double anorm = a.entries.cwiseAbs().maxCoeff() * 40;
    double lmax = 0;
    for (int k = 0; k < 40; ++k) {
        if (k > 0) CHECK(e.values[k - 1] <= e.values[k]);
        CVec v = e.vectors.col(k);
        CHECK(std::sqrt(norm2(a.entries * v - e.values[k] * v)) <= 1e-10 * (1 + std::abs(e.values[k])) * anorm);
        lmax = std::max(lmax, std::abs(e.values[k]));
    }
    CHECK(orthonormality_defect(e.vectors) < 1e-10);

    CMat rec = CMat::Zero(40, 40);
    for (int k = 0; k < 40; ++k) rec += e.values[k] * e.vectors.col(k) * e.vectors.col(k).adjoint();
    CHECK(max_abs(rec - a.entries) <= 1e-9 * (1 + lmax));

    // Parseval in the produced basis
    std::mt19937_64 rng(3);
    for (int t = 0; t < 20; ++t) {
        CVec x = random_cvec(40, rng);
        double s = 0;
        for (int k = 0; k < 40; ++k) s += std::norm(inner(x, CVec(e.vectors.col(k))));
        CHECK(std::abs(s - norm2(x)) <= 1e-10 * norm2(x));
    }
}

TEST_CASE("eigh: non-symmetric input rejected") {
    DenseOp a;
    a.entries = CMat::Zero(3, 3);
    a.entries(0, 1) = 1.0;
    a.symmetric = true;
    CHECK_THROWS_AS(eigh_self_adjoint(a), ValidationError);
    a.symmetric = false;
    CHECK_THROWS_AS(eigh_self_adjoint(a), ValidationError);
}

TEST_CASE("project_onto_span examples") {
    Vec b1 = Vec::unit(3, 0);
    CVec ones = CVec::Ones(3);
    Vec p = project_onto_span(Vec(ones), {b1});
    CHECK(std::abs(p.coords(0) - 1.0) < 1e-15);
    CHECK(std::abs(p.coords(1)) < 1e-15);
    CHECK(std::abs(p.coords(2)) < 1e-15);

    Vec in = Vec(CVec(2.0 * b1.coords));
    CHECK(std::sqrt(norm2(project_onto_span(in, {b1}).coords - in.coords)) < 1e-15);

    Vec orth = Vec::unit(3, 2);
    CHECK(std::sqrt(norm2(project_onto_span(orth, {b1, Vec::unit(3, 1)}).coords)) < 1e-15);
}

TEST_CASE("project_onto_span is idempotent, nonexpanding and nearest") {
    std::mt19937_64 rng(5);
    const int n = 8;
    // orthonormal pair from a QR of random columns
    CMat m(n, 3);
    for (int j = 0; j < 3; ++j) m.col(j) = random_cvec(n, rng);
    Eigen::HouseholderQR<CMat> qr(m);
    CMat q = qr.householderQ() * CMat::Identity(n, 3);
    std::vector<Vec> basis;
    for (int j = 0; j < 3; ++j) basis.emplace_back(q.col(j));
    for (int t = 0; t < 100; ++t) {
        Vec x(random_cvec(n, rng));
        Vec p = project_onto_span(x, basis);
        Vec pp = project_onto_span(p, basis);
        CHECK(std::sqrt(norm2(pp.coords - p.coords)) < 1e-12);
        CHECK(norm2(p.coords) <= norm2(x.coords) * (1 + 1e-12));
        CVec y = q * random_cvec(3, rng);
        CHECK(norm2(x.coords - p.coords) <= norm2(x.coords - y) * (1 + 1e-12));
    }
}

TEST_CASE("project_onto_span rejects a non-orthonormal basis") {
    CVec v = CVec::Ones(3);
    CHECK_THROWS_AS(project_onto_span(Vec::unit(3, 0), {Vec(v)}), ValidationError);
}

TEST_CASE("compensated sum recovers cancelled small terms") {
    CompensatedSum<double> s;
    s.add(1e16);
    for (int i = 0; i < 1000; ++i) s.add(1.0);
    s.add(-1e16);
    CHECK(s.value() == 1000.0);
}
