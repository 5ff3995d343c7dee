// Python bindings for the main operations: builtin tableaus, certification,
// integration of the named benchmark problems, stability scans, and the
// coefficient search.

#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "peer/experiments.hpp"
#include "peer/integrator.hpp"
#include "peer/methods.hpp"
#include "peer/search.hpp"
#include "peer/stability.hpp"

namespace py = pybind11;
using namespace peer;

namespace {

py::list matrix_to_list(const RealMatrix& m) {
    py::list rows;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        py::list row;
        for (std::size_t j = 0; j < m.cols(); ++j) row.append(m(i, j));
        rows.append(row);
    }
    return rows;
}

SplitOdeProblem problem_by_name(const std::string& name, std::size_t ar_m) {
    if (name == "prothero-robinson") return prothero_robinson();
    if (name == "advection-reaction") return advection_reaction(ar_m);
    throw Error("unknown problem '" + name + "'");
}

StepMode mode_by_name(const std::string& name) {
    if (name == "imex") return StepMode::Imex;
    if (name == "implicit") return StepMode::Implicit;
    if (name == "explicit") return StepMode::Explicit;
    throw Error("unknown mode '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(imexpeer, m) {
    m.doc() = "Super-convergent IMEX-Peer time integration methods";

    py::register_exception<Error>(m, "PeerError");

    py::class_<MethodTableau>(m, "MethodTableau")
        .def_readonly("s", &MethodTableau::s)
        .def_readonly("c", &MethodTableau::c)
        .def_readonly("gamma", &MethodTableau::gamma)
        .def_readonly("v", &MethodTableau::v)
        .def_readonly("label", &MethodTableau::label)
        .def_readonly("warnings", &MethodTableau::warnings)
        .def_property_readonly("P", [](const MethodTableau& t) { return matrix_to_list(t.P); })
        .def_property_readonly("Q", [](const MethodTableau& t) { return matrix_to_list(t.Q); })
        .def_property_readonly("R", [](const MethodTableau& t) { return matrix_to_list(t.R); })
        .def_property_readonly("S1", [](const MethodTableau& t) { return matrix_to_list(t.S1); })
        .def_property_readonly("S2", [](const MethodTableau& t) { return matrix_to_list(t.S2); })
        .def_property_readonly("Qhat",
                               [](const MethodTableau& t) { return matrix_to_list(t.Qhat); })
        .def_property_readonly("Rhat",
                               [](const MethodTableau& t) { return matrix_to_list(t.Rhat); })
        .def("__repr__", [](const MethodTableau& t) {
            return "<MethodTableau " + t.label + " s=" + std::to_string(t.s) + ">";
        });

    py::class_<CertificationReport>(m, "CertificationReport")
        .def_readonly("stage_order_defects", &CertificationReport::stage_order_defects)
        .def_readonly("superconv_implicit", &CertificationReport::superconv_implicit)
        .def_readonly("superconv_explicit", &CertificationReport::superconv_explicit)
        .def_readonly("pre_consistent", &CertificationReport::pre_consistent)
        .def_readonly("zero_stable", &CertificationReport::zero_stable)
        .def_readonly("optimally_zero_stable", &CertificationReport::optimally_zero_stable)
        .def_readonly("p_eigenvalues", &CertificationReport::p_eigenvalues)
        .def_readonly("a_stable", &CertificationReport::a_stable)
        .def_readonly("worst_rho", &CertificationReport::worst_rho)
        .def_readonly("rho_r_inv_q", &CertificationReport::rho_r_inv_q)
        .def_readonly("c_im", &CertificationReport::c_im)
        .def_readonly("c_ex", &CertificationReport::c_ex)
        .def_readonly("p_power_defect", &CertificationReport::p_power_defect)
        .def_readonly("p_power_zero", &CertificationReport::p_power_zero)
        .def("passed", &CertificationReport::passed);

    m.def("builtin_names", &builtin_names);
    m.def("builtin", &builtin, py::arg("name"));
    m.def("parse_tableau", &parse_tableau, py::arg("text"));
    m.def("load_tableau_file", &load_tableau_file, py::arg("path"));
    m.def("serialize_tableau", &serialize_tableau, py::arg("tableau"));
    m.def(
        "certify", [](const MethodTableau& t) { return certify(t); }, py::arg("tableau"));
    m.def(
        "report_summary",
        [](const MethodTableau& t) { return report_summary(t, certify(t)); },
        py::arg("tableau"));

    m.def(
        "rho_implicit",
        [](const MethodTableau& t, Complex z) { return rho_implicit(t, z); },
        py::arg("tableau"), py::arg("z"));
    m.def(
        "rho_imex",
        [](const MethodTableau& t, Complex z0, Complex z1) { return rho_imex(t, z0, z1); },
        py::arg("tableau"), py::arg("z0"), py::arg("z1"));
    m.def(
        "is_a_stable",
        [](const MethodTableau& t) {
            const auto r = is_a_stable(t);
            return py::make_tuple(r.a_stable, r.worst_rho);
        },
        py::arg("tableau"));

    m.def(
        "stability_scan",
        [](const MethodTableau& t, const std::string& kind, double alpha, std::size_t nx,
           std::size_t ny, unsigned threads) {
            StabilityScan scan;
            scan.alpha_deg = alpha;
            scan.nx = nx;
            scan.ny = ny;
            scan.threads = threads;
            scan_region(t, scan, kind == "alpha" ? RegionKind::Alpha : RegionKind::Explicit);
            py::dict out;
            out["area"] = scan.area;
            out["x_max"] = scan.x_max;
            out["y_max"] = scan.y_max;
            out["nx"] = scan.nx;
            out["ny"] = scan.ny;
            return out;
        },
        py::arg("tableau"), py::arg("kind") = "explicit", py::arg("alpha") = 90.0,
        py::arg("nx") = 200, py::arg("ny") = 200, py::arg("threads") = 0);

    m.def(
        "integrate",
        [](const MethodTableau& t, const std::string& problem, double dt, const std::string& mode,
           std::size_t ar_m) {
            const SplitOdeProblem p = problem_by_name(problem, ar_m);
            const IntegrationResult r = integrate(t, p, dt, mode_by_name(mode));
            py::dict out;
            out["t_end"] = p.t_end;
            out["u_end"] = r.u_end;
            out["steps"] = r.diagnostics.steps;
            out["newton_iterations"] = r.diagnostics.newton_iterations;
            if (p.exact) {
                RealVector ref(p.dimension);
                p.exact(p.t_end, ref);
                out["scaled_max_error"] = scaled_max_error(r.u_end, ref);
            }
            return out;
        },
        py::arg("tableau"), py::arg("problem") = "prothero-robinson", py::arg("dt") = 0.05,
        py::arg("mode") = "imex", py::arg("m") = 400);

    m.def(
        "run_convergence",
        [](const std::string& experiment, const std::vector<std::string>& names,
           const std::vector<double>& dts, std::size_t ar_m, unsigned threads) {
            std::vector<MethodTableau> methods;
            for (const auto& n : names) methods.push_back(resolve_method(n));
            ExperimentOptions opt;
            opt.ar_m = ar_m;
            opt.threads = threads;
            py::list out;
            for (const auto& r : run_experiment(experiment, methods, dts, opt)) {
                py::dict d;
                d["method"] = r.method;
                d["dts"] = r.dts;
                d["errors"] = r.errors;
                d["fitted_order"] = r.fitted_order;
                out.append(d);
            }
            return out;
        },
        py::arg("experiment"), py::arg("methods"), py::arg("dts"), py::arg("m") = 400,
        py::arg("threads") = 0);

    m.def("pr_step_ladder", &pr_step_ladder);
    m.def("ar_step_ladder", &ar_step_ladder);
    m.def("convergence_order", &convergence_order, py::arg("dts"), py::arg("errors"));

    m.def(
        "run_search",
        [](std::size_t stages, std::uint64_t seed, int multistart, unsigned threads) {
            SearchSpec spec = default_search_spec(stages);
            spec.seed = seed;
            if (multistart > 0) spec.multistart = multistart;
            spec.threads = threads;
            const SearchOutput out = run_search(spec);
            py::list results;
            for (const auto& c : out.candidates)
                results.append(py::make_tuple(c.tableau, c.report));
            py::dict d;
            d["candidates"] = results;
            d["total_evals"] = out.diagnostics.total_evals;
            return d;
        },
        py::arg("stages") = 2, py::arg("seed") = 0, py::arg("multistart") = 0,
        py::arg("threads") = 0);

#ifdef VERSION_INFO
#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)
    m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
    m.attr("__version__") = "dev";
#endif
}
