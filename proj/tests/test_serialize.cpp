#include <cmath>
#include <cstring>
#include <limits>

#include "doctest.h"
#include "spectral_hull/errors.hpp"
#include "spectral_hull/experiments.hpp"
#include "spectral_hull/serialize.hpp"

using namespace spectral_hull;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }
bool same_bits(cx a, cx b) { return same_bits(a.real(), b.real()) && same_bits(a.imag(), b.imag()); }

bool same_bits(const CMat& a, const CMat& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (Eigen::Index i = 0; i < a.size(); ++i)
        if (!same_bits(a.data()[i], b.data()[i])) return false;
    return true;
}

void check_round_trip(const SamplingAndScale& in) {
    json j = sampling_to_json(in.sampling, in.scale);
    auto out = sampling_from_json(json::parse(j.dump()));
    const auto& a = in.sampling;
    const auto& b = out.sampling;
    CHECK(a.field == b.field);
    CHECK(a.dim == b.dim);
    REQUIRE(a.eigenvalues.size() == b.eigenvalues.size());
    for (size_t k = 0; k < a.eigenvalues.size(); ++k) CHECK(same_bits(a.eigenvalues[k], b.eigenvalues[k]));
    CHECK(a.basis.kind() == b.basis.kind());
    CHECK(same_bits(a.basis.to_dense(), b.basis.to_dense()));
    CHECK(a.op.kind() == b.op.kind());
    CHECK(same_bits(a.op.to_dense(), b.op.to_dense()));
    CHECK(a.ambient.kind == b.ambient.kind);
    CHECK(a.ambient.ambient_dim == b.ambient.ambient_dim);
    CHECK(a.ambient.offset == b.ambient.offset);
    CHECK(same_bits(a.ambient.q, b.ambient.q));
    CHECK(a.provenance.builder == b.provenance.builder);
    CHECK(a.provenance.params == b.provenance.params);

    REQUIRE(in.scale.count() == out.scale.count());
    CHECK(in.scale.prefix == out.scale.prefix);
    CHECK(in.scale.bias == out.scale.bias);
    for (int t = 0; t < in.scale.count(); ++t) {
        CHECK(same_bits(in.scale.weights[t], out.scale.weights[t]));
        CHECK(in.scale.vectors[t].idx == out.scale.vectors[t].idx);
        for (size_t i = 0; i < in.scale.vectors[t].val.size(); ++i)
            CHECK(same_bits(in.scale.vectors[t].val[i], out.scale.vectors[t].val[i]));
    }
    // downstream quantities agree bit for bit
    auto ma = atom_measure(a, in.scale), mb = atom_measure(b, out.scale);
    for (int k = 0; k < a.dim; ++k) CHECK(same_bits(ma.mu[k], mb.mu[k]));
    CHECK(sampling_to_json(b, out.scale).dump() == j.dump());
}

}  // namespace

TEST_CASE("hexfloat and fmt17 round trips") {
    const double inf = std::numeric_limits<double>::infinity();
    for (double x : {0.0, -0.0, 1.0, 1.0 / 3, -2.5e-310, 1.7976931348623157e308, 0.1, inf, -inf}) {
        CHECK(same_bits(parse_hexfloat(hexfloat(x)), x));
        CHECK(same_bits(std::strtod(fmt17(x).c_str(), nullptr), x));
    }
    CHECK(hexfloat(1.0) == "0x1p+0");
    CHECK(fmt17(0.1) == "0.10000000000000001");
    CHECK(std::isnan(parse_hexfloat(hexfloat(std::nan("")))));
    CHECK_THROWS_AS(parse_hexfloat("0x1p+0junk"), ValidationError);
    CHECK_THROWS_AS(parse_hexfloat(""), ValidationError);
}

TEST_CASE("base64 doubles") {
    std::vector<double> v{0.0, -1.5, 3.141592653589793, 1e-300, 2.0 / 3};
    auto s = base64_encode_doubles(v);
    CHECK(s.size() % 4 == 0);
    auto back = base64_decode_doubles(s);
    REQUIRE(back.size() == v.size());
    for (size_t i = 0; i < v.size(); ++i) CHECK(same_bits(back[i], v[i]));
    CHECK(base64_encode_doubles({}).empty());
    CHECK(base64_decode_doubles("").empty());
    // 1.0 little-endian: 00 00 00 00 00 00 f0 3f
    CHECK(base64_encode_doubles({1.0}) == "AAAAAAAA8D8=");
    CHECK_THROWS_AS(base64_decode_doubles("abc"), ValidationError);
    CHECK_THROWS_AS(base64_decode_doubles("ab!d"), ValidationError);
    CHECK_THROWS_AS(base64_decode_doubles("AAAA"), ValidationError);
}

TEST_CASE("sampling JSON round trip: shift") { check_round_trip(build_shift_sampling(17)); }

TEST_CASE("sampling JSON round trip: diff") { check_round_trip(build_diff_sampling(6, 6)); }

TEST_CASE("sampling JSON round trip: PVM demo") { check_round_trip(build_pvm_demo(4, 4).built); }

TEST_CASE("sampling JSON round trip: projection sampling") {
    CMat a = CMat::Zero(3, 3);
    a(0, 0) = 1;
    a(1, 1) = 2;
    a(2, 2) = 3;
    a(0, 1) = a(1, 0) = 0.5;
    OpAction op = [a](const CVec& x) { return CVec(a * x); };
    Sampling s = build_projection_sampling(op, {Vec::unit(3, 0), Vec::unit(3, 1)});
    Scale sc = dyadic_scale(s, {Vec::unit(2, 0), Vec::unit(2, 1)});
    check_round_trip({s, sc});
}

TEST_CASE("sampling JSON rejects malformed input") {
    auto b = build_shift_sampling(5);
    json j = sampling_to_json(b.sampling, b.scale);

    json missing = j;
    missing.erase("eigenvalues");
    CHECK_THROWS_AS(sampling_from_json(missing), json::exception);

    json badkind = j;
    badkind["operator"]["kind"] = "sparse";
    CHECK_THROWS_AS(sampling_from_json(badkind), ValidationError);

    json badfloat = j;
    badfloat["eigenvalues"][0] = "one";
    CHECK_THROWS_AS(sampling_from_json(badfloat), ValidationError);

    json wrongsize = j;
    wrongsize["eigenvalues"].erase(0);
    CHECK_THROWS_AS(sampling_from_json(wrongsize), ValidationError);

    json badweights = j;
    badweights["scale"]["weights"][0] = hexfloat(10.0);
    CHECK_THROWS_AS(sampling_from_json(badweights), ValidationError);
}

TEST_CASE("grid function JSON") {
    auto g = GridFunction::sample(4, 4, [](double x) { return cx(std::exp(-x * x), x); });
    json j = g.to_json();
    CHECK(j.at("N") == 4);
    auto back = GridFunction::from_json(json::parse(j.dump()));
    CHECK(back.n == 4);
    CHECK(back.n1 == 4);
    REQUIRE(back.values.size() == g.values.size());
    for (size_t i = 0; i < g.values.size(); ++i) CHECK(same_bits(back.values[i], g.values[i]));
    j["values"] = base64_encode_doubles({1.0, 2.0});
    CHECK_THROWS_AS(GridFunction::from_json(j), ValidationError);
}

TEST_CASE("hull and measure JSON") {
    auto b = build_shift_sampling(9);
    auto m = atom_measure(b.sampling, b.scale);
    PseudoMetric d(b.scale, m);
    auto h = build_hull(d, m, eigenvalue_multiplier(m), 1e-6);
    auto chart = chart_circle(h, b.sampling);
    json j = hull_to_json(h, chart);
    CHECK(j.at("epsilon") == 1e-6);
    REQUIRE(j.at("clusters").size() == 9);
    double w = 0;
    for (const auto& c : j.at("clusters")) {
        w += c.at("weight").get<double>();
        CHECK(c.at("chart").at("label") == "circle");
        CHECK(c.at("chart").contains("t"));
    }
    CHECK(w == doctest::Approx(1.0));

    json mj = measure_to_json(m, {{"g0", embed(b.scale.vectors[0].dense(), b.sampling, m)}});
    CHECK(mj.at("mu").size() == 9);
    CHECK(mj.at("vectors").at("g0").size() == 9);
}
