#include "spectral_hull/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "spectral_hull/errors.hpp"
#include "spectral_hull/experiments.hpp"
#include "spectral_hull/serialize.hpp"

namespace spectral_hull {

namespace {

namespace fs = std::filesystem;

std::vector<int> default_n_list(const std::string& example) {
    if (example == "shift") return {65, 257, 1025};
    if (example == "diff") return {12, 24, 48};
    return {1, 2, 4, 8, 16, 32, 64};
}

fs::path prepare(const std::string& out_dir) {
    fs::path p(out_dir);
    fs::create_directories(p);
    return p;
}

void write_text(const fs::path& p, const std::string& s) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << s;
}

void write_json(const fs::path& p, const json& j) { write_text(p, j.dump(2) + "\n"); }

json defects_json(const PVMDefects& d, double resolution) {
    return {{"multiplicativity", d.multiplicativity}, {"idempotence", d.idempotence},
            {"self_adjointness", d.self_adjointness}, {"additivity", d.additivity},
            {"commutation", d.commutation},           {"resolution_of_operator", resolution},
            {"max", std::max(d.max(), resolution)}};
}

double pvm_defect(const Sampling& s, const SpectralAtomMeasure& m) {
    return std::max(standard_pvm_defects(s, m).max(), resolution_defect(s, m));
}

struct HullRun {
    HullSpace hull;
    std::vector<ChartPoint> chart;
};

std::string hull_csv(const HullRun& r) {
    std::ostringstream o;
    o << "cluster,coordinate,m,weight,size,valid\n";
    for (const auto& p : r.chart) {
        const auto& c = r.hull.clusters[p.cluster];
        o << p.cluster << ',' << fmt17(p.coordinate) << ',' << fmt17(c.m) << ',' << fmt17(c.weight) << ','
          << c.members.size() << ',' << (p.valid ? 1 : 0) << '\n';
    }
    return o.str();
}

}  // namespace

// ------------------------------------------------------------- SweepConfig

SweepConfig SweepConfig::from_json(const json& j) {
    SweepConfig c;
    if (!j.is_object()) throw ValidationError("config must be a JSON object");
    static const std::vector<std::string> keys{"example", "n_list", "epsilon", "j0",     "seed",
                                               "out_dir", "j",      "dim",     "mesh", "vectors"};
    for (const auto& [k, v] : j.items())
        if (std::find(keys.begin(), keys.end(), k) == keys.end())
            throw ValidationError("unknown config key '" + k + "'");
    c.example = j.value("example", c.example);
    if (j.contains("n_list")) c.n_list = j.at("n_list").get<std::vector<int>>();
    if (j.contains("epsilon")) {
        const auto& e = j.at("epsilon");
        c.epsilons = e.is_array() ? e.get<std::vector<double>>() : std::vector<double>{e.get<double>()};
    }
    c.j0 = j.value("j0", c.j0);
    c.seed = j.value("seed", c.seed);
    c.out_dir = j.value("out_dir", c.out_dir);
    c.j = j.value("j", c.j);
    c.dim = j.value("dim", c.dim);
    c.mesh = j.value("mesh", c.mesh);
    c.vectors = j.value("vectors", c.vectors);
    return c;
}

json SweepConfig::to_json() const {
    return {{"example", example}, {"n_list", n_list}, {"epsilon", epsilons}, {"j0", j0},
            {"seed", seed},       {"out_dir", out_dir}, {"j", j},          {"dim", dim},
            {"mesh", mesh},       {"vectors", vectors}};
}

void SweepConfig::validate() const {
    if (example != "shift" && example != "diff" && example != "pvm-demo")
        throw ValidationError("unknown example '" + example + "' (expected shift, diff or pvm-demo)");
    if (epsilons.empty()) throw ValidationError("epsilon list is empty");
    for (double e : epsilons)
        if (!(e > 0)) throw ValidationError("epsilon must be positive");
    if (j0 < 1) throw ValidationError("j0 must be at least 1");
    if (vectors < 1) throw ValidationError("vectors must be at least 1");
    for (int n : n_list) {
        if (example == "shift") {
            if (n % 2 == 0) throw ValidationError("N must be odd (got " + std::to_string(n) + ")");
            if (n < 3) throw ValidationError("N must be at least 3");
        } else if (example == "diff") {
            // the builder checks divisibility of N by the rational denominators
            auto r = rational_enumeration(j);
            for (const auto& q : r)
                if (n % q.den != 0)
                    throw ValidationError("N must be divisible by " + std::to_string(q.den) + " (got " +
                                          std::to_string(n) + ")");
        } else if (n < 1) {
            throw ValidationError("n must be positive for the X_n series");
        }
    }
    if (example == "pvm-demo" && (dim < 1 || dim > 64)) throw ValidationError("dim must be in [1, 64]");
    if (example == "pvm-demo" && mesh < 1) throw ValidationError("mesh must be positive");
}

const std::vector<std::string>& metric_registry() {
    static const std::vector<std::string> r = {"isometry_defect", "intertwine_defect", "arc_measure_err",
                                               "g0_measure_err",  "ft_rel_err",        "plancherel_err",
                                               "pvm_defect",      "xn_residual",       "covering_number",
                                               "staircase_lp_err"};
    return r;
}

// ------------------------------------------------------------------ sweeps

std::vector<ConvergenceRecord> sweep_point(const SweepConfig& c, int n, double epsilon) {
    std::vector<ConvergenceRecord> out;
    auto rec = [&](const std::string& metric, double v) { out.push_back({n, metric, v}); };

    if (c.example == "pvm-demo") {
        auto demo = build_pvm_demo(c.dim, c.mesh);
        auto m = atom_measure(demo.built.sampling, demo.built.scale);
        auto r = surjectivity_diagnostic(demo.built.sampling, m, demo.built.scale, n, c.j0);
        rec("xn_residual", r.residuals.back());
        return out;
    }

    SamplingAndScale b = c.example == "shift" ? build_shift_sampling(n) : build_diff_sampling(n, c.j);
    const Sampling& s = b.sampling;
    auto m = atom_measure(s, b.scale);
    auto vd = vector_defects(s, m, c.vectors, c.seed);
    rec("isometry_defect", vd.isometry);
    rec("intertwine_defect", vd.intertwine);
    PseudoMetric d(b.scale, m);
    rec("covering_number", covering_number(d, epsilon));
    if (s.dim <= kPvmDimLimit / 2) rec("pvm_defect", pvm_defect(s, m));

    if (c.example == "shift") {
        HullSpace h = build_hull(d, m, eigenvalue_multiplier(m), epsilon, c.j0);
        auto chart = chart_circle(h, s);
        double worst = 0;
        for (const auto& a : default_arcs()) worst = std::max(worst, std::abs(arc_measure(h, chart, a) - (a.b - a.a)));
        rec("arc_measure_err", worst);
    } else {
        double worst = 0;
        for (auto [a, bb] : {std::pair{-1.0, 1.0}, std::pair{0.0, 2.0}})
            worst = std::max(worst, std::abs(g0_atom_mass(s, m, a, bb) - g0_integral(a, bb)));
        rec("g0_measure_err", worst);
        GridFunction h = gaussian_grid_function(s);
        auto table = fourier_transform(h, s, m);
        rec("ft_rel_err", recovery_error(table, [](double om) { return cx(gaussian_reference(om), 0); }, 2.0)
                              .pointwise_rel);
        rec("plancherel_err", plancherel_check(h, s, m).quadrature_rel);
        const long long n1 = s.provenance.params.at("N1").get<long long>();
        rec("staircase_lp_err", staircase_lp_error(reference_gaussian, 2, n, n1).total);
    }
    return out;
}

std::string convergence_csv(std::vector<ConvergenceRecord> rows) {
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        return a.metric != b.metric ? a.metric < b.metric : a.n < b.n;
    });
    std::ostringstream o;
    o << "N,metric,value\n";
    for (const auto& r : rows) o << r.n << ',' << r.metric << ',' << fmt17(r.value) << '\n';
    return o.str();
}

std::vector<std::string> cmd_converge(const SweepConfig& cfg) {
    SweepConfig c = cfg;
    if (c.n_list.empty()) c.n_list = default_n_list(c.example);
    c.validate();
    fs::path dir = prepare(c.out_dir);
    std::vector<std::string> paths;
    for (size_t e = 0; e < c.epsilons.size(); ++e) {
        std::vector<ConvergenceRecord> rows;
        for (int n : c.n_list) {
            auto r = sweep_point(c, n, c.epsilons[e]);
            rows.insert(rows.end(), r.begin(), r.end());
        }
        std::string name = "converge_" + c.example;
        if (c.epsilons.size() > 1) name += "_eps" + std::to_string(e);
        fs::path p = dir / (name + ".csv");
        write_text(p, convergence_csv(rows));
        paths.push_back(p.string());
    }
    return paths;
}

// ---------------------------------------------------------------- commands

json cmd_shift(int n, double epsilon, const std::string& out_dir, int j0, std::uint64_t seed) {
    if (!(epsilon > 0)) throw ValidationError("epsilon must be positive");
    auto b = build_shift_sampling(n);
    const Sampling& s = b.sampling;
    auto m = atom_measure(s, b.scale);
    fs::path dir = prepare(out_dir);

    write_json(dir / "shift_sampling.json", sampling_to_json(s, b.scale));
    {
        std::ostringstream o;
        o << "k,mu,m\n";
        for (int k = 0; k < m.size(); ++k) o << k << ',' << fmt17(m.mu[k]) << ',' << fmt17(m.lambda[k]) << '\n';
        write_text(dir / "shift_measure.csv", o.str());
    }

    PseudoMetric d(b.scale, m);
    HullRun hr{build_hull(d, m, eigenvalue_multiplier(m), epsilon, j0), {}};
    hr.chart = chart_circle(hr.hull, s);
    write_json(dir / "shift_hull.json", hull_to_json(hr.hull, hr.chart));
    write_text(dir / "shift_hull.csv", hull_csv(hr));

    json arcs = json::array();
    std::ostringstream ao;
    ao << "a,b,measure,length,error\n";
    for (const auto& a : default_arcs()) {
        double v = arc_measure(hr.hull, hr.chart, a);
        arcs.push_back({{"a", a.a}, {"b", a.b}, {"measure", v}, {"error", std::abs(v - (a.b - a.a))}});
        ao << fmt17(a.a) << ',' << fmt17(a.b) << ',' << fmt17(v) << ',' << fmt17(a.b - a.a) << ','
           << fmt17(std::abs(v - (a.b - a.a))) << '\n';
    }
    write_text(dir / "shift_arcs.csv", ao.str());

    int incoherent = 0;
    for (const auto& p : hr.chart) incoherent += p.coherent ? 0 : 1;
    auto vd = vector_defects(s, m, 100, seed);
    json rep;
    rep["example"] = "shift";
    rep["N"] = n;
    rep["epsilon"] = epsilon;
    rep["total_measure"] = measure_of(m, [&] {
        std::vector<int> all(static_cast<size_t>(m.size()));
        for (int k = 0; k < m.size(); ++k) all[k] = k;
        return all;
    }());
    rep["mu"] = m.mu;
    rep["isometry_defect"] = vd.isometry;
    rep["intertwine_defect"] = vd.intertwine;
    rep["fourier_series_defect"] = fourier_series_check(s, m);
    rep["hull"] = {{"clusters", hr.hull.clusters.size()},
                   {"incoherent_clusters", incoherent},
                   {"circle_chart_defect", circle_chart_defect(hr.hull, hr.chart, m)},
                   {"metric_terms", d.terms()},
                   {"metric_tail_bound", d.tail_bound()}};
    rep["arcs"] = arcs;
    if (s.dim <= kPvmDimLimit)
        rep["pvm"] = defects_json(standard_pvm_defects(s, m), resolution_defect(s, m));
    else
        rep["pvm"] = {{"skipped", "dimension above " + std::to_string(kPvmDimLimit)}};
    write_json(dir / "shift_report.json", rep);
    return rep;
}

json cmd_diff(int n, int j, double epsilon, const std::string& out_dir, int j0, std::uint64_t seed) {
    if (!(epsilon > 0)) throw ValidationError("epsilon must be positive");
    auto b = build_diff_sampling(n, j);
    const Sampling& s = b.sampling;
    auto m = atom_measure(s, b.scale);
    fs::path dir = prepare(out_dir);
    write_json(dir / "diff_sampling.json", sampling_to_json(s, b.scale));

    json rep;
    rep["example"] = "diff";
    rep["N"] = n;
    rep["J"] = j;
    rep["N1"] = s.provenance.params.at("N1");
    rep["epsilon"] = epsilon;
    CompensatedSum<double> total;
    for (double v : m.mu) total.add(v);
    rep["total_measure"] = total.value();

    json g0t = json::array();
    std::ostringstream go;
    go << "a,b,measure,integral,error\n";
    for (auto [a, bb] : {std::pair{-1.0, 1.0}, std::pair{0.0, 2.0}, std::pair{-0.5, 0.5}, std::pair{1.0, 3.0}}) {
        double v = g0_atom_mass(s, m, a, bb), ref = g0_integral(a, bb);
        g0t.push_back({{"a", a}, {"b", bb}, {"measure", v}, {"integral", ref}, {"error", std::abs(v - ref)}});
        go << fmt17(a) << ',' << fmt17(bb) << ',' << fmt17(v) << ',' << fmt17(ref) << ',' << fmt17(std::abs(v - ref))
           << '\n';
    }
    write_text(dir / "diff_g0.csv", go.str());
    rep["g0"] = g0t;

    auto lc = line_chart_defect(s, m, 2.0);
    const double pi = 3.14159265358979323846;
    double m1 = multiplier_at(s, m, 1.0);
    rep["line_chart"] = {{"max_defect", lc.max_defect},
                         {"max_excess_over_bound", lc.max_excess},
                         {"m_at_1", m1},
                         {"m_at_1_defect", std::abs(m1 - pi)},
                         {"bound_at_1", std::pow(pi, 3) / (6.0 * n * n)}};

    PseudoMetric d(b.scale, m);
    HullRun hr{build_hull(d, m, eigenvalue_multiplier(m), epsilon, j0), {}};
    try {
        hr.chart = chart_line(hr.hull, s, m);
        write_text(dir / "diff_hull.csv", hull_csv(hr));
    } catch (const ValidationError& e) {
        rep["chart_error"] = e.what();
    }
    write_json(dir / "diff_hull.json", hull_to_json(hr.hull, hr.chart));
    rep["hull"] = {{"clusters", hr.hull.clusters.size()}, {"metric_terms", d.terms()}};

    GridFunction h = gaussian_grid_function(s);
    auto table = fourier_transform(h, s, m);
    std::ostringstream to;
    to << "omega,re_U,im_U,re_F,im_F,reliable_flag\n";
    for (const auto& r : table.rows)
        to << fmt17(r.omega) << ',' << fmt17(r.u.real()) << ',' << fmt17(r.u.imag()) << ',' << fmt17(r.f.real()) << ','
           << fmt17(r.f.imag()) << ',' << (r.reliable ? 1 : 0) << '\n';
    write_text(dir / "diff_transform.csv", to.str());
    auto ref = [](double om) { return cx(gaussian_reference(om), 0); };
    auto e2 = recovery_error(table, ref, 2.0);
    auto e1 = recovery_error(table, ref, 1.0);
    rep["transform"] = {{"pointwise_rel_omega2", e2.pointwise_rel}, {"sup_rel_omega2", e2.sup_rel},
                        {"pointwise_rel_omega1", e1.pointwise_rel}, {"phase_omega2", e2.phase},
                        {"scale_phase_defect", scale_phase_defect(s, b.scale, 2.0)}};
    auto pl = plancherel_check(h, s, m);
    rep["plancherel"] = {{"exact_defect", pl.exact_defect}, {"norm2", pl.norm2}, {"quadrature", pl.quadrature},
                         {"quadrature_rel", pl.quadrature_rel}};
    auto dr = differentiation_check(h, central_difference(h), s, m);
    rep["differentiation"] = {{"max_defect", dr.max_defect}, {"constant", dr.constant}};
    auto vd = vector_defects(s, m, 100, seed);
    rep["isometry_defect"] = vd.isometry;
    rep["intertwine_defect"] = vd.intertwine;
    if (s.dim <= kPvmDimLimit)
        rep["pvm"] = defects_json(standard_pvm_defects(s, m), resolution_defect(s, m));
    else
        rep["pvm"] = {{"skipped", "dimension above " + std::to_string(kPvmDimLimit)}};
    write_json(dir / "diff_report.json", rep);
    return rep;
}

json cmd_pvm_demo(int dim, int mesh, const std::string& out_dir, int n_max) {
    auto demo = build_pvm_demo(dim, mesh);
    const Sampling& s = demo.built.sampling;
    auto m = atom_measure(s, demo.built.scale);
    auto r = surjectivity_diagnostic(s, m, demo.built.scale, n_max);
    fs::path dir = prepare(out_dir);
    write_json(dir / "pvm_demo_sampling.json", sampling_to_json(s, demo.built.scale));
    std::ostringstream o;
    o << "n,residual,bound,restricted\n";
    for (size_t i = 0; i < r.residuals.size(); ++i)
        o << i + 1 << ',' << fmt17(r.residuals[i]) << ',' << fmt17(r.bounds[i]) << ',' << fmt17(r.restricted[i])
          << '\n';
    write_text(dir / "pvm_demo_xn.csv", o.str());
    json rep;
    rep["example"] = "pvm-demo";
    rep["dim"] = dim;
    rep["mesh"] = mesh;
    rep["atoms"] = s.dim;
    rep["probes"] = s.provenance.params.at("probes");
    rep["xn_residual"] = r.residuals;
    rep["dyadic_nonincreasing"] = r.dyadic_nonincreasing;
    rep["bound_holds"] = r.bound_holds;
    rep["projection_residual"] = r.projection_residual;
    rep["pvm"] = defects_json(standard_pvm_defects(s, m), resolution_defect(s, m));
    write_json(dir / "pvm_demo_report.json", rep);
    return rep;
}

// --------------------------------------------------------------------- CLI

int run_cli(int argc, char** argv) {
    CLI::App app{"spectral hull experiments"};
    app.require_subcommand(1);

    int n = 0, j = 6, j0 = 16, dim = 4, mesh = 4;
    double epsilon = 0;
    std::uint64_t seed = 1;
    std::string out_dir = "out", config, example;
    std::vector<int> n_list;
    std::vector<double> eps_list;

    auto* shift = app.add_subcommand("shift", "circle example from the cyclic shift");
    shift->add_option("--n", n, "odd N >= 3")->required();
    shift->add_option("--epsilon", epsilon, "hull radius")->default_val(1e-5);
    shift->add_option("--j0", j0)->default_val(16);
    shift->add_option("--seed", seed)->default_val(1);
    shift->add_option("--out-dir", out_dir)->default_val("out");

    auto* diff = app.add_subcommand("diff", "line example from the central difference");
    diff->add_option("--n", n, "grid resolution N")->required();
    diff->add_option("--j", j, "number of shifted scale vectors")->default_val(6);
    diff->add_option("--epsilon", epsilon, "hull radius")->default_val(1e-3);
    diff->add_option("--j0", j0)->default_val(16);
    diff->add_option("--seed", seed)->default_val(1);
    diff->add_option("--out-dir", out_dir)->default_val("out");

    auto* pvm = app.add_subcommand("pvm-demo", "sampling built from a projection-valued measure");
    pvm->add_option("--dim", dim, "operator dimension (<= 64)")->default_val(4);
    pvm->add_option("--mesh", mesh, "cell mesh M")->default_val(4);
    pvm->add_option("--out-dir", out_dir)->default_val("out");

    auto* conv = app.add_subcommand("converge", "N-sweep to CSV");
    conv->add_option("--config", config, "JSON config file");
    auto* o_ex = conv->add_option("--example", example, "shift | diff | pvm-demo");
    auto* o_nl = conv->add_option("--n-list", n_list)->delimiter(',');
    auto* o_ep = conv->add_option("--epsilon", eps_list)->delimiter(',');
    auto* o_j0 = conv->add_option("--j0", j0);
    auto* o_sd = conv->add_option("--seed", seed);
    auto* o_od = conv->add_option("--out-dir", out_dir);
    auto* o_j = conv->add_option("--j", j);
    auto* o_dim = conv->add_option("--dim", dim);
    auto* o_mesh = conv->add_option("--mesh", mesh);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (shift->parsed()) {
            cmd_shift(n, epsilon, out_dir, j0, seed);
        } else if (diff->parsed()) {
            cmd_diff(n, j, epsilon, out_dir, j0, seed);
        } else if (pvm->parsed()) {
            cmd_pvm_demo(dim, mesh, out_dir);
        } else {
            SweepConfig c;
            if (!config.empty()) {
                std::ifstream f(config);
                if (!f) throw ValidationError("cannot read config " + config);
                json j;
                try {
                    j = json::parse(f);
                } catch (const json::exception& e) {
                    throw ValidationError(std::string("config parse error: ") + e.what());
                }
                c = SweepConfig::from_json(j);
            }
            if (o_ex->count()) c.example = example;
            if (o_nl->count()) c.n_list = n_list;
            if (o_ep->count()) c.epsilons = eps_list;
            if (o_j0->count()) c.j0 = j0;
            if (o_sd->count()) c.seed = seed;
            if (o_od->count()) c.out_dir = out_dir;
            if (o_j->count()) c.j = j;
            if (o_dim->count()) c.dim = dim;
            if (o_mesh->count()) c.mesh = mesh;
            for (const auto& p : cmd_converge(c)) std::cout << p << '\n';
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace spectral_hull
