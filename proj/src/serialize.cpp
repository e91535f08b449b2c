#include "spectral_hull/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "spectral_hull/errors.hpp"

namespace spectral_hull {

std::string hexfloat(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", x);
    return buf;
}

double parse_hexfloat(const std::string& s) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw ValidationError("not a floating-point literal: " + s);
    return v;
}

std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

const char* kB64 = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

json cx_json(cx v) { return json::array({hexfloat(v.real()), hexfloat(v.imag())}); }
cx cx_from(const json& j) { return {parse_hexfloat(j.at(0).get<std::string>()), parse_hexfloat(j.at(1).get<std::string>())}; }

json mat_json(const CMat& m) {
    json cols = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        json col = json::array();
        for (Eigen::Index r = 0; r < m.rows(); ++r) col.push_back(cx_json(m(r, c)));
        cols.push_back(col);
    }
    return cols;
}

CMat mat_from(const json& j, Eigen::Index rows) {
    CMat m(rows, static_cast<Eigen::Index>(j.size()));
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        const auto& col = j.at(static_cast<size_t>(c));
        if (static_cast<Eigen::Index>(col.size()) != rows) throw ValidationError("matrix column has wrong length");
        for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = cx_from(col.at(static_cast<size_t>(r)));
    }
    return m;
}

json reals_json(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(hexfloat(x));
    return a;
}

std::vector<double> reals_from(const json& j) {
    std::vector<double> v;
    for (const auto& x : j) v.push_back(parse_hexfloat(x.get<std::string>()));
    return v;
}

}  // namespace

std::string base64_encode_doubles(const std::vector<double>& v) {
    std::vector<unsigned char> bytes(v.size() * sizeof(double));
    if (!v.empty()) std::memcpy(bytes.data(), v.data(), bytes.size());
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    for (size_t i = 0; i < bytes.size(); i += 3) {
        unsigned n = bytes[i] << 16;
        if (i + 1 < bytes.size()) n |= bytes[i + 1] << 8;
        if (i + 2 < bytes.size()) n |= bytes[i + 2];
        out += kB64[(n >> 18) & 63];
        out += kB64[(n >> 12) & 63];
        out += i + 1 < bytes.size() ? kB64[(n >> 6) & 63] : '=';
        out += i + 2 < bytes.size() ? kB64[n & 63] : '=';
    }
    return out;
}

std::vector<double> base64_decode_doubles(const std::string& s) {
    auto val = [](char c) -> int {
        const char* p = std::strchr(kB64, c);
        return (c && p) ? static_cast<int>(p - kB64) : -1;
    };
    if (s.size() % 4 != 0) throw ValidationError("base64 length must be a multiple of 4");
    std::vector<unsigned char> bytes;
    for (size_t i = 0; i < s.size(); i += 4) {
        int q[4];
        int pad = 0;
        for (int t = 0; t < 4; ++t) {
            if (s[i + t] == '=') {
                q[t] = 0;
                ++pad;
            } else if ((q[t] = val(s[i + t])) < 0) {
                throw ValidationError("invalid base64 character");
            }
        }
        unsigned n = (q[0] << 18) | (q[1] << 12) | (q[2] << 6) | q[3];
        bytes.push_back(static_cast<unsigned char>(n >> 16));
        if (pad < 2) bytes.push_back(static_cast<unsigned char>((n >> 8) & 255));
        if (pad < 1) bytes.push_back(static_cast<unsigned char>(n & 255));
    }
    if (bytes.size() % sizeof(double) != 0) throw ValidationError("base64 payload is not a whole number of doubles");
    std::vector<double> v(bytes.size() / sizeof(double));
    if (!v.empty()) std::memcpy(v.data(), bytes.data(), bytes.size());
    return v;
}

json sampling_to_json(const Sampling& s, const Scale& sc) {
    json j;
    j["field"] = field_name(s.field);
    j["dim"] = s.dim;
    j["eigenvalues"] = reals_json(s.eigenvalues);
    if (s.basis.kind() == AtomBasis::Kind::Dense)
        j["eigenvectors"] = mat_json(s.basis.columns());
    else
        j["eigenvectors"] = s.basis.describe();

    json op = s.op.describe();
    switch (s.op.kind()) {
        case SamplingOp::Kind::Dense: op["entries"] = mat_json(s.op.to_dense()); break;
        case SamplingOp::Kind::Diagonal: {
            std::vector<double> d(static_cast<size_t>(s.dim));
            CMat m = s.op.to_dense();
            for (int i = 0; i < s.dim; ++i) d[i] = m(i, i).real();
            op["diagonal"] = reals_json(d);
            break;
        }
        case SamplingOp::Kind::Circulant: {
            json st = json::array();
            for (const auto& [off, a] : s.op.stencil()) st.push_back({off, cx_json(a)});
            op["stencil"] = st;
            break;
        }
    }
    j["operator"] = op;

    json amb = s.ambient.describe();
    if (s.ambient.kind == AmbientMap::Kind::Isometry) amb["q"] = mat_json(s.ambient.q);
    j["ambient_basis_map"] = amb;

    json vecs = json::array();
    for (const auto& v : sc.vectors) {
        json e = json::array();
        for (size_t t = 0; t < v.idx.size(); ++t) e.push_back({v.idx[t], cx_json(v.val[t])});
        vecs.push_back(e);
    }
    j["scale"] = {{"weights", reals_json(sc.weights)},
                  {"vectors", vecs},
                  {"prefix", sc.prefix},
                  {"bias", sc.bias == Scale::Bias::Mass ? "mass" : "weight"}};
    j["provenance"] = {{"builder", s.provenance.builder}, {"params", s.provenance.params}};
    return j;
}

SamplingAndScale sampling_from_json(const json& j) {
    SamplingAndScale out;
    Sampling& s = out.sampling;
    s.field = field_from_name(j.at("field").get<std::string>());
    s.dim = j.at("dim").get<int>();
    s.eigenvalues = reals_from(j.at("eigenvalues"));
    const auto& ev = j.at("eigenvectors");
    if (ev.is_array())
        s.basis = AtomBasis::dense(mat_from(ev, s.dim));
    else
        s.basis = AtomBasis::fourier(ev.at("size").get<int>(), ev.at("offset").get<int>(), ev.at("sign").get<int>());

    const auto& op = j.at("operator");
    const std::string kind = op.at("kind").get<std::string>();
    if (kind == "dense") {
        s.op = SamplingOp::dense(mat_from(op.at("entries"), s.dim));
    } else if (kind == "diagonal") {
        s.op = SamplingOp::diagonal(reals_from(op.at("diagonal")));
    } else if (kind == "circulant") {
        std::vector<std::pair<int, cx>> st;
        for (const auto& e : op.at("stencil")) st.emplace_back(e.at(0).get<int>(), cx_from(e.at(1)));
        s.op = SamplingOp::circulant(op.at("dim").get<int>(), st);
    } else {
        throw ValidationError("unknown operator kind: " + kind);
    }

    const auto& amb = j.at("ambient_basis_map");
    const std::string ak = amb.at("kind").get<std::string>();
    s.ambient.dim = s.dim;
    s.ambient.ambient_dim = amb.at("ambient_dim").get<int>();
    if (ak == "identity") {
        s.ambient.kind = AmbientMap::Kind::Identity;
    } else if (ak == "offset") {
        s.ambient.kind = AmbientMap::Kind::Offset;
        s.ambient.offset = amb.at("offset").get<int>();
    } else if (ak == "isometry") {
        s.ambient.kind = AmbientMap::Kind::Isometry;
        s.ambient.q = mat_from(amb.at("q"), s.ambient.ambient_dim);
    } else {
        throw ValidationError("unknown ambient map kind: " + ak);
    }

    const auto& sc = j.at("scale");
    out.scale.weights = reals_from(sc.at("weights"));
    for (const auto& v : sc.at("vectors")) {
        SparseVec sv;
        sv.dim = s.dim;
        for (const auto& e : v) {
            sv.idx.push_back(e.at(0).get<int>());
            sv.val.push_back(cx_from(e.at(1)));
        }
        out.scale.vectors.push_back(std::move(sv));
    }
    out.scale.prefix = sc.at("prefix").get<int>();
    out.scale.bias = sc.at("bias").get<std::string>() == "mass" ? Scale::Bias::Mass : Scale::Bias::Weight;
    s.provenance.builder = j.at("provenance").at("builder").get<std::string>();
    s.provenance.params = j.at("provenance").at("params");
    try {
        validate_sampling(s);
        validate_scale(s, out.scale);
    } catch (const NumericalError& e) {
        throw ValidationError(std::string("sampling JSON: ") + e.what());
    }
    return out;
}

json measure_to_json(const SpectralAtomMeasure& m, const std::map<std::string, EmbeddedVec>& vectors) {
    json j;
    j["mu"] = m.mu;
    j["m"] = m.lambda;
    json v = json::object();
    for (const auto& [label, u] : vectors) {
        json vals = json::array();
        for (Eigen::Index k = 0; k < u.values.size(); ++k) vals.push_back({u.values(k).real(), u.values(k).imag()});
        v[label] = vals;
    }
    j["vectors"] = v;
    return j;
}

json hull_to_json(const HullSpace& h, const std::vector<ChartPoint>& chart) {
    json j;
    j["epsilon"] = h.epsilon;
    json cl = json::array();
    for (size_t i = 0; i < h.clusters.size(); ++i) {
        const auto& c = h.clusters[i];
        json e;
        e["members"] = c.members;
        e["weight"] = c.weight;
        e["m"] = c.m;
        json co = json::array();
        for (const auto& v : c.coords) co.push_back({v.real(), v.imag()});
        e["coords"] = co;
        e["degenerate"] = c.degenerate;
        if (i < chart.size()) {
            const auto& p = chart[i];
            json ch;
            ch["label"] = p.label == ChartPoint::Label::Circle ? "circle" : "line";
            ch[p.label == ChartPoint::Label::Circle ? "t" : "omega"] = p.coordinate;
            ch["valid"] = p.valid;
            if (p.label == ChartPoint::Label::Circle) ch["coherent"] = p.coherent;
            e["chart"] = ch;
        }
        cl.push_back(e);
    }
    j["clusters"] = cl;
    return j;
}

}  // namespace spectral_hull
