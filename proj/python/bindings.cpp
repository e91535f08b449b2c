#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "spectral_hull/cli.hpp"
#include "spectral_hull/errors.hpp"
#include "spectral_hull/experiments.hpp"
#include "spectral_hull/parallel.hpp"
#include "spectral_hull/serialize.hpp"

namespace py = pybind11;
using namespace spectral_hull;

namespace {

// nlohmann::json -> Python object through the json module
py::object to_py(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

struct Example {
    SamplingAndScale built;
    SpectralAtomMeasure measure;

    explicit Example(SamplingAndScale b) : built(std::move(b)) { measure = atom_measure(built.sampling, built.scale); }
    const Sampling& s() const { return built.sampling; }
};

IntervalSet intervals_from(const std::vector<std::pair<double, double>>& v) {
    std::vector<Interval> iv;
    for (auto [a, b] : v) iv.push_back({a, b});
    return IntervalSet(iv);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "spectral measures, hulls and charts for finite samplings";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    py::class_<Example>(m, "Example")
        .def_property_readonly("dim", [](const Example& e) { return e.s().dim; })
        .def_property_readonly("builder", [](const Example& e) { return e.s().provenance.builder; })
        .def_property_readonly("params", [](const Example& e) { return to_py(e.s().provenance.params); })
        .def_property_readonly("eigenvalues", [](const Example& e) { return e.s().eigenvalues; })
        .def_property_readonly("mu", [](const Example& e) { return e.measure.mu; })
        .def_property_readonly("scale_count", [](const Example& e) { return e.built.scale.count(); })
        .def("to_json", [](const Example& e) { return sampling_to_json(e.s(), e.built.scale).dump(); })
        .def("operator_matrix", [](const Example& e) { return e.s().op.to_dense(); })
        .def("basis_matrix", [](const Example& e) { return e.s().basis.to_dense(); })
        .def(
            "embed", [](const Example& e, const CVec& x) { return embed(x, e.s(), e.measure).values; }, py::arg("x"))
        .def(
            "unembed",
            [](const Example& e, const CVec& u) { return unembed(EmbeddedVec{u}, e.s(), e.measure).coords; },
            py::arg("u"))
        .def(
            "apply", [](const Example& e, const CVec& x) { return e.s().op.apply(x); }, py::arg("x"))
        .def(
            "vector_defects",
            [](const Example& e, int count, std::uint64_t seed) {
                auto d = vector_defects(e.s(), e.measure, count, seed);
                return py::dict(py::arg("isometry") = d.isometry, py::arg("intertwine") = d.intertwine);
            },
            py::arg("count") = 100, py::arg("seed") = 1)
        .def(
            "distance",
            [](const Example& e, int a, int b) {
                if (a < 0 || b < 0 || a >= e.s().dim || b >= e.s().dim) throw ValidationError("atom index out of range");
                return PseudoMetric(e.built.scale, e.measure)(a, b);
            },
            py::arg("a"), py::arg("b"))
        .def(
            "covering_number",
            [](const Example& e, double eps) { return covering_number(PseudoMetric(e.built.scale, e.measure), eps); },
            py::arg("epsilon"))
        .def(
            "hull",
            [](const Example& e, double eps, int j0) {
                PseudoMetric d(e.built.scale, e.measure);
                HullSpace h = build_hull(d, e.measure, eigenvalue_multiplier(e.measure), eps, j0);
                std::vector<ChartPoint> chart;
                if (e.s().provenance.builder == "shift") chart = chart_circle(h, e.s());
                if (e.s().provenance.builder == "diff") {
                    try {
                        chart = chart_line(h, e.s(), e.measure);
                    } catch (const ValidationError&) {
                        chart.clear();
                    }
                }
                return to_py(hull_to_json(h, chart));
            },
            py::arg("epsilon"), py::arg("j0") = 16)
        .def(
            "pvm_project",
            [](const Example& e, const std::vector<std::pair<double, double>>& v) {
                return pvm_project(intervals_from(v), e.s(), e.measure).matrix.entries;
            },
            py::arg("intervals"))
        .def(
            "pvm_defects",
            [](const Example& e, const std::vector<std::pair<double, double>>& v1,
               const std::vector<std::pair<double, double>>& v2) {
                auto d = pvm_algebra_check(intervals_from(v1), intervals_from(v2), e.s(), e.measure);
                return py::dict(py::arg("multiplicativity") = d.multiplicativity,
                                py::arg("idempotence") = d.idempotence,
                                py::arg("self_adjointness") = d.self_adjointness,
                                py::arg("additivity") = d.additivity, py::arg("commutation") = d.commutation);
            },
            py::arg("v1"), py::arg("v2"))
        .def("resolution_defect", [](const Example& e) { return resolution_defect(e.s(), e.measure); })
        .def(
            "surjectivity",
            [](const Example& e, int n_max) {
                auto r = surjectivity_diagnostic(e.s(), e.measure, e.built.scale, n_max);
                return py::dict(py::arg("x") = r.x, py::arg("residuals") = r.residuals, py::arg("bounds") = r.bounds,
                                py::arg("dyadic_nonincreasing") = r.dyadic_nonincreasing,
                                py::arg("bound_holds") = r.bound_holds,
                                py::arg("projection_residual") = r.projection_residual);
            },
            py::arg("n_max") = 64)
        .def(
            "gaussian_transform",
            [](const Example& e, double omega_max) {
                auto t = fourier_transform(gaussian_grid_function(e.s()), e.s(), e.measure, omega_max, omega_max);
                std::vector<double> om;
                std::vector<cx> u, f;
                for (const auto& r : t.rows) {
                    om.push_back(r.omega);
                    u.push_back(r.u);
                    f.push_back(r.f);
                }
                return py::dict(py::arg("omega") = om, py::arg("u") = u, py::arg("f") = f);
            },
            py::arg("omega_max") = 3.0)
        .def("plancherel", [](const Example& e) {
            auto p = plancherel_check(gaussian_grid_function(e.s()), e.s(), e.measure);
            return py::dict(py::arg("exact_defect") = p.exact_defect, py::arg("norm2") = p.norm2,
                            py::arg("quadrature") = p.quadrature, py::arg("quadrature_rel") = p.quadrature_rel);
        });

    m.def(
        "shift", [](int n) { return Example(build_shift_sampling(n)); }, py::arg("n"));
    m.def(
        "diff", [](int n, int j) { return Example(build_diff_sampling(n, j)); }, py::arg("n"), py::arg("j") = 6);
    m.def(
        "pvm_demo", [](int dim, int mesh) { return Example(build_pvm_demo(dim, mesh).built); }, py::arg("dim") = 4,
        py::arg("mesh") = 4);
    m.def(
        "from_json", [](const std::string& s) { return Example(sampling_from_json(json::parse(s))); },
        py::arg("text"));

    m.def("fourier_series_check", py::overload_cast<int>(&fourier_series_check), py::arg("n"));
    m.def("gaussian_reference", &gaussian_reference, py::arg("omega"));
    m.def("g0", &g0, py::arg("omega"));
    m.def(
        "staircase_lp_error",
        [](const std::function<double(double)>& f, int p, int n, long long n1, int r) {
            auto e = staircase_lp_error(f, p, n, n1, r);
            return py::dict(py::arg("total") = e.total, py::arg("inside") = e.inside, py::arg("tail") = e.tail);
        },
        py::arg("f"), py::arg("p"), py::arg("n"), py::arg("n1"), py::arg("r") = 0);

    m.def(
        "cmd_shift",
        [](int n, double eps, const std::string& out, int j0, std::uint64_t seed) {
            return to_py(cmd_shift(n, eps, out, j0, seed));
        },
        py::arg("n"), py::arg("epsilon") = 1e-5, py::arg("out_dir") = "out", py::arg("j0") = 16, py::arg("seed") = 1);
    m.def(
        "cmd_diff",
        [](int n, int j, double eps, const std::string& out, int j0, std::uint64_t seed) {
            return to_py(cmd_diff(n, j, eps, out, j0, seed));
        },
        py::arg("n"), py::arg("j") = 6, py::arg("epsilon") = 1e-3, py::arg("out_dir") = "out", py::arg("j0") = 16,
        py::arg("seed") = 1);
    m.def(
        "cmd_pvm_demo",
        [](int dim, int mesh, const std::string& out) { return to_py(cmd_pvm_demo(dim, mesh, out)); },
        py::arg("dim") = 4, py::arg("mesh") = 4, py::arg("out_dir") = "out");
    m.def(
        "cmd_converge",
        [](const std::string& config) {
            return cmd_converge(SweepConfig::from_json(json::parse(config)));
        },
        py::arg("config_json"));
    m.def("metric_registry", &metric_registry);
    m.def("set_thread_count", &set_thread_count, py::arg("n"));
}
