// Command-line front end: tableau verification, integration, stability
// scans, convergence experiments, and coefficient search. All numeric
// output is CSV at 17 significant digits; exit codes are 0 success,
// 1 domain failure, 2 usage/IO error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "peer/experiments.hpp"
#include "peer/integrator.hpp"
#include "peer/methods.hpp"
#include "peer/search.hpp"
#include "peer/stability.hpp"

namespace {

using namespace peer;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string out_path(const std::string& dir, const std::string& name) {
    if (dir.empty()) return name;
    std::filesystem::create_directories(dir);
    return (std::filesystem::path(dir) / name).string();
}

std::string default_out_dir() {
    const char* env = std::getenv("IMEXPEER_OUTDIR");
    return env ? env : "";
}

SplitOdeProblem named_problem(const std::string& name, std::size_t ar_m) {
    if (name == "prothero-robinson") return prothero_robinson();
    if (name == "advection-reaction") return advection_reaction(ar_m);
    throw Error("unknown problem '" + name +
                "' (available: prothero-robinson, advection-reaction)");
}

int cmd_verify(const std::string& method, const std::string& norm_name) {
    const MethodTableau t = resolve_method(method);
    CertificationReport rep;
    if (norm_name == "l2")
        rep = certify(t, ErrorNorm::Euclid);
    else if (norm_name == "max")
        rep = certify(t, ErrorNorm::MaxAbs);
    else
        rep = certify(t);
    std::cout << report_summary(t, rep);
    return rep.passed() ? 0 : 1;
}

int cmd_integrate(const std::string& method, const std::string& problem_name, double dt,
                  const std::string& mode_name, std::size_t ar_m, const std::string& trace_path,
                  const std::string& final_path) {
    const MethodTableau t = resolve_method(method);
    const SplitOdeProblem p = named_problem(problem_name, ar_m);
    StepMode mode = StepMode::Imex;
    if (mode_name == "implicit")
        mode = StepMode::Implicit;
    else if (mode_name == "explicit")
        mode = StepMode::Explicit;
    else if (mode_name != "imex")
        throw Error("unknown mode '" + mode_name + "'");

    std::ofstream trace;
    if (!trace_path.empty()) {
        trace.open(trace_path);
        if (!trace) throw Error("cannot open trace file '" + trace_path + "'");
    }
    const IntegrationResult r =
        integrate(t, p, dt, mode, NewtonOptions{}, trace.is_open() ? &trace : nullptr);
    std::cout << "method," << t.label << "\nproblem," << problem_name << "\ndt," << fmt17(dt)
              << "\nsteps," << r.diagnostics.steps << "\nnewton_iterations,"
              << r.diagnostics.newton_iterations << "\n";
    if (p.exact) {
        RealVector ref(p.dimension);
        p.exact(p.t_end, ref);
        std::cout << "scaled_max_error," << fmt17(scaled_max_error(r.u_end, ref)) << "\n";
    }
    if (!final_path.empty()) {
        std::ofstream fs(final_path);
        if (!fs) throw Error("cannot open output file '" + final_path + "'");
        fs << "index,value\n";
        for (std::size_t i = 0; i < r.u_end.size(); ++i)
            fs << i << ',' << fmt17(r.u_end[i]) << "\n";
    }
    return 0;
}

int cmd_stability(const std::string& method, const std::string& kind_name, double alpha,
                  std::size_t nx, std::size_t ny, const std::string& grid_path,
                  unsigned threads) {
    const MethodTableau t = resolve_method(method);
    StabilityScan scan;
    scan.alpha_deg = alpha;
    scan.nx = nx;
    scan.ny = ny;
    scan.threads = threads;
    RegionKind kind;
    if (kind_name == "alpha")
        kind = RegionKind::Alpha;
    else if (kind_name == "explicit")
        kind = RegionKind::Explicit;
    else
        throw Error("unknown region kind '" + kind_name + "' (alpha|explicit)");
    scan_region(t, scan, kind);
    double rho_limit;
    try {
        rho_limit = spectral_radius(lu_solve(t.R, t.Q));
    } catch (const SingularMatrixError&) {
        rho_limit = std::numeric_limits<double>::infinity();
    }
    std::cout << "method,kind,alpha,area,x_max,y_max,rho_rinvq\n"
              << t.label << ',' << kind_name << ',' << fmt17(alpha) << ',' << fmt17(scan.area)
              << ',' << fmt17(scan.x_max) << ',' << fmt17(scan.y_max) << ',' << fmt17(rho_limit)
              << "\n";
    if (!grid_path.empty()) {
        std::ofstream gs(grid_path);
        if (!gs) throw Error("cannot open grid output '" + grid_path + "'");
        write_scan_csv(gs, scan);
    }
    return 0;
}

int cmd_convergence(const std::string& experiment, const std::vector<std::string>& method_names,
                    const std::string& ladder, std::size_t ar_m, const std::string& quantity,
                    const std::string& out_dir, unsigned threads) {
    std::vector<MethodTableau> methods;
    for (const auto& name : method_names) methods.push_back(resolve_method(name));
    std::vector<double> dts;
    if (experiment == "prothero-robinson") {
        dts = pr_step_ladder();
    } else if (ladder == "mid") {
        dts = ar_mid_step_ladder();
    } else {
        dts = ar_step_ladder();
    }
    ExperimentOptions opt;
    opt.ar_m = ar_m;
    opt.threads = threads;
    opt.ar_quantity = (quantity == "full") ? ArErrorQuantity::FullState
                                           : ArErrorQuantity::TotalConcentration;
    const auto results = run_experiment(experiment, methods, dts, opt);
    const std::string path = out_path(out_dir, experiment + ".csv");
    std::ofstream os(path);
    if (!os) throw Error("cannot open output file '" + path + "'");
    write_experiment_csv(os, results);
    bool any_fail = false;
    for (const auto& r : results) {
        std::cout << r.method << ": fitted order " << fmt17(r.fitted_order) << "\n";
        for (char f : r.failed) any_fail |= f != 0;
    }
    std::cout << "wrote " << path << "\n";
    return any_fail ? 1 : 0;
}

int cmd_search(std::size_t stages, std::uint64_t seed, int multistart, long max_evals,
               const std::string& out_dir, unsigned threads) {
    SearchSpec spec = default_search_spec(stages);
    spec.seed = seed;
    if (multistart > 0) spec.multistart = multistart;
    if (max_evals > 0) spec.simplex.max_evals = max_evals;
    spec.threads = threads;
    const SearchOutput out = run_search(spec);
    std::cout << "objective evaluations," << out.diagnostics.total_evals << "\n";
    std::cout << "implicit feasible," << out.diagnostics.implicit_feasible << "\n";
    std::cout << "candidates," << out.candidates.size() << "\n";
    if (out.candidates.empty()) return 1;
    const std::string cert_path = out_path(out_dir, "search_certification.csv");
    std::ofstream cs(cert_path);
    if (!cs) throw Error("cannot open output file '" + cert_path + "'");
    cs << "label,s,superconv_implicit,superconv_explicit,rho_rinvq,c_im,c_ex,a_stable,"
          "zero_stable\n";
    for (std::size_t i = 0; i < out.candidates.size(); ++i) {
        const auto& c = out.candidates[i];
        const std::string tab_path = out_path(out_dir, c.tableau.label + ".tab");
        std::ofstream ts(tab_path);
        if (!ts) throw Error("cannot open output file '" + tab_path + "'");
        ts << serialize_tableau(c.tableau);
        cs << c.tableau.label << ',' << c.tableau.s << ',' << fmt17(c.report.superconv_implicit)
           << ',' << fmt17(c.report.superconv_explicit) << ',' << fmt17(c.report.rho_r_inv_q)
           << ',' << fmt17(c.report.c_im) << ',' << fmt17(c.report.c_ex) << ','
           << (c.report.a_stable ? 1 : 0) << ',' << (c.report.zero_stable ? 1 : 0) << "\n";
        std::cout << c.tableau.label << ": wrote " << tab_path << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Super-convergent IMEX-Peer time integration toolkit"};
    app.require_subcommand(1);

    std::string method = "imex-peer2s";
    std::string norm = "auto";
    auto* verify = app.add_subcommand("verify", "Certify a tableau (builtin name or file)");
    verify->add_option("--method", method, "builtin name or tableau file")->required();
    verify->add_option("--norm", norm, "error-constant norm: auto|l2|max");

    std::string problem = "prothero-robinson";
    double dt = 0.05;
    std::string mode = "imex";
    std::size_t ar_m = 400;
    std::string trace_path, final_path;
    auto* integ = app.add_subcommand("integrate", "Integrate a named problem");
    integ->add_option("--method", method)->required();
    integ->add_option("--problem", problem, "prothero-robinson|advection-reaction");
    integ->add_option("--dt", dt, "step size")->required();
    integ->add_option("--mode", mode, "imex|implicit|explicit");
    integ->add_option("--m", ar_m, "advection-reaction mesh nodes");
    integ->add_option("--trace", trace_path, "per-step diagnostics CSV");
    integ->add_option("--final-state", final_path, "final state CSV");

    std::string kind = "alpha";
    double alpha = 90.0;
    std::size_t nx = 400, ny = 400;
    std::string grid_path;
    unsigned threads = 0;
    auto* stab = app.add_subcommand("stability", "Scan a stability region");
    stab->add_option("--method", method)->required();
    stab->add_option("--kind", kind, "alpha|explicit");
    stab->add_option("--alpha", alpha, "sector angle in degrees");
    stab->add_option("--nx", nx);
    stab->add_option("--ny", ny);
    stab->add_option("--grid-out", grid_path, "membership grid CSV");
    stab->add_option("--threads", threads);

    std::string experiment = "prothero-robinson";
    std::vector<std::string> methods_arg;
    std::string ladder = "full";
    std::string quantity = "total";
    std::string out_dir = default_out_dir();
    auto* conv = app.add_subcommand("convergence", "Convergence-order experiment");
    conv->add_option("--experiment", experiment, "prothero-robinson|advection-reaction");
    conv->add_option("--method", methods_arg, "methods (repeatable)")->required();
    conv->add_option("--ladder", ladder, "full|mid (advection-reaction only)");
    conv->add_option("--m", ar_m, "advection-reaction mesh nodes");
    conv->add_option("--quantity", quantity, "total|full (advection-reaction error)");
    conv->add_option("--out", out_dir, "output directory");
    conv->add_option("--threads", threads);

    std::size_t stages = 2;
    std::uint64_t seed = 0;
    int multistart = 0;
    long max_evals = 0;
    auto* search = app.add_subcommand("search", "Derivative-free coefficient search");
    search->add_option("--stages", stages, "2|3|4");
    search->add_option("--seed", seed);
    search->add_option("--multistart", multistart);
    search->add_option("--max-evals", max_evals, "simplex budget per start");
    search->add_option("--out", out_dir, "output directory");
    search->add_option("--threads", threads);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (verify->parsed()) return cmd_verify(method, norm);
        if (integ->parsed())
            return cmd_integrate(method, problem, dt, mode, ar_m, trace_path, final_path);
        if (stab->parsed()) return cmd_stability(method, kind, alpha, nx, ny, grid_path, threads);
        if (conv->parsed())
            return cmd_convergence(experiment, methods_arg, ladder, ar_m, quantity, out_dir,
                                   threads);
        if (search->parsed())
            return cmd_search(stages, seed, multistart, max_evals, out_dir, threads);
    } catch (const TableauFormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
