// Acceptance suite: reproduces the published certification, stability and
// convergence results at desk scale. One pass/fail line per criterion;
// exit code is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "peer/experiments.hpp"
#include "peer/integrator.hpp"
#include "peer/methods.hpp"
#include "peer/search.hpp"
#include "peer/stability.hpp"
#include "peer/tableau.hpp"

using namespace peer;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;
std::vector<std::string> notes;

void report(int id, const char* label, bool ok, const std::string& detail = "") {
    std::printf("[%s] criterion %2d: %s%s%s\n", ok ? "PASS" : "FAIL", id, label,
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

bool within(double value, double target, double rel) {
    return std::abs(value - target) <= rel * std::abs(target);
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ---- 1. tableau certification -------------------------------------------

void criterion_1() {
    const auto t0 = Clock::now();
    bool ok = true;
    std::string detail;
    for (const auto& name : builtin_names()) {
        const MethodTableau t = builtin(name);
        const CertificationReport r = certify(t);
        for (std::size_t j = 0; j + 1 < r.stage_order_defects.size(); ++j)
            ok &= r.stage_order_defects[j] < 1e-10;
        ok &= r.superconv_implicit < 1e-9;
        ok &= r.superconv_explicit < 1e-9;
        ok &= r.pre_consistency_defect <= 1e-12;
        ok &= r.zero_stable;
        if (t.s < 4) ok &= r.optimally_zero_stable;
        if (t.s == 4) ok &= !r.optimally_zero_stable;
    }
    const double el = seconds_since(t0);
    ok &= el < 1.0;
    report(1, "tableau certification (stage order, super-convergence, zero-stability)", ok,
           fmt("%.2f s", el));
}

// ---- 2. spectral radii ----------------------------------------------------

void criterion_2() {
    const auto t0 = Clock::now();
    const double expected[3] = {0.128, 0.552, 0.542};
    bool ok = true;
    std::string detail;
    int i = 0;
    for (const auto& name : builtin_names()) {
        const MethodTableau t = builtin(name);
        const double rho = spectral_radius(lu_solve(t.R, t.Q));
        ok &= within(rho, expected[i], 0.005);
        detail += fmt("%.4f ", rho);
        ++i;
    }
    ok &= seconds_since(t0) < 1.0;
    report(2, "spectral radii of R^-1 Q = 0.128/0.552/0.542 (0.5%)", ok, detail);
}

// ---- 3. error constants ----------------------------------------------------

void criterion_3() {
    const auto t0 = Clock::now();
    const double cim[3] = {0.237, 0.124, 0.0642};
    const double cex[3] = {0.323, 0.168, 0.117};
    bool ok = true;
    std::string detail;
    int i = 0;
    for (const auto& name : builtin_names()) {
        const CertificationReport r = certify(builtin(name));
        ok &= within(r.c_im, cim[i], 0.01);
        ok &= within(r.c_ex, cex[i], 0.01);
        detail += fmt("(%.4f, %.4f) ", r.c_im, r.c_ex);
        ++i;
    }
    ok &= seconds_since(t0) < 1.0;
    report(3, "error constants c_im, c_ex (1%)", ok, detail);
}

// ---- 4. A-stability ---------------------------------------------------------

void criterion_4() {
    const auto t0 = Clock::now();
    bool ok = true;
    for (const auto& name : builtin_names()) {
        const AStabilityResult r = is_a_stable(builtin(name));
        ok &= r.a_stable && r.rho_limit <= 1.0;
    }
    const MethodTableau t2 = builtin("imex-peer2s");
    const MethodTableau flipped = make_tableau("flipped-gamma", t2.c, -t2.gamma, {t2.R(1, 0)},
                                               t2.P, {t2.S2(1, 0)}, false);
    ok &= !is_a_stable(flipped).a_stable;
    const double el = seconds_since(t0);
    ok &= el < 5.0;
    report(4, "A-stability sampling (three builtins pass, flipped gamma fails)", ok,
           fmt("%.2f s", el));
}

// ---- 5. stability regions ---------------------------------------------------

void criterion_5() {
    const auto t0 = Clock::now();
    const double se_expected[3] = {4.47, 6.11, 4.39};
    const double sa_expected[3] = {2.15, 2.67, 1.07};
    const double xmax_expected[3] = {-1.41, -1.58, -1.45};
    const double ymax_expected[3] = {1.21, 1.69, 1.00};
    bool ok = true;
    std::string detail;
    int i = 0;
    for (const auto& name : builtin_names()) {
        const MethodTableau t = builtin(name);
        StabilityScan se;
        se.threads = 0;
        scan_region(t, se, RegionKind::Explicit);
        StabilityScan sa;
        sa.threads = 0;
        scan_region(t, sa, RegionKind::Alpha);
        ok &= within(se.area, se_expected[i], 0.05);
        ok &= within(sa.area, sa_expected[i], 0.05);
        ok &= std::abs(sa.x_max - xmax_expected[i]) <= 0.05;
        ok &= std::abs(se.y_max - ymax_expected[i]) <= 0.03;
        detail += fmt("[%.2f %.2f ", se.area, sa.area) + fmt("%.3f %.3f] ", sa.x_max, se.y_max);
        ++i;
    }
    const double el = seconds_since(t0);
    ok &= el < 120.0;
    report(5, "stability regions |S_E|, |S_90|, x_max, y_max at 400x400", ok,
           detail + fmt("(%.0f s)", el));
}

// ---- 6. Prothero-Robinson convergence --------------------------------------

void criterion_6() {
    const auto t0 = Clock::now();
    std::vector<MethodTableau> methods;
    for (const auto& name : builtin_names()) methods.push_back(builtin(name));
    const auto results = run_experiment("prothero-robinson", methods, pr_step_ladder());
    const double lo[3] = {2.9, 3.7, 4.8};
    const double hi[3] = {3.2, 4.2, 5.5};
    bool ok = true;
    std::string detail;
    for (int i = 0; i < 3; ++i) {
        ok &= results[i].fitted_order >= lo[i] && results[i].fitted_order <= hi[i];
        detail += fmt("%.3f ", results[i].fitted_order);
    }
    const double el = seconds_since(t0);
    ok &= el < 30.0;
    report(6, "Prothero-Robinson orders in [2.9,3.2]/[3.7,4.2]/[4.8,5.5]", ok,
           detail + fmt("(%.1f s)", el));
}

// ---- 7. advection-reaction convergence --------------------------------------

void criterion_7() {
    const auto t0 = Clock::now();
    std::vector<MethodTableau> methods;
    for (const auto& name : builtin_names()) methods.push_back(builtin(name));
    ExperimentOptions opt;
    opt.ar_m = 400;
    const auto results = run_experiment("advection-reaction", methods, ar_mid_step_ladder(), opt);
    bool ok = true;
    std::string detail;
    for (int i = 0; i < 3; ++i) {
        const double nominal = static_cast<double>(methods[i].s) + 1.0;
        const bool band = std::abs(results[i].fitted_order - nominal) <= 0.4;
        ok &= band;
        detail += fmt("%.3f ", results[i].fitted_order);
    }
    // stagnation level of the four-stage method at the smallest step
    const auto stag =
        run_experiment("advection-reaction", {builtin("imex-peer4s")}, {2.5e-5}, opt);
    const double err = stag[0].errors[0];
    ok &= std::isfinite(err) && err <= 1e-8;
    detail += fmt("| 4s@2.5e-5: %.2e ", err);
    const double el = seconds_since(t0);
    ok &= el < 600.0;
    report(7, "advection-reaction m=400 orders s+1 (+-0.4) and 4s stagnation <= 1e-8", ok,
           detail + fmt("(%.0f s)", el));
}

// ---- 8. scheme/stability cross-oracle ---------------------------------------

void criterion_8() {
    std::mt19937_64 rng(2026);
    std::uniform_real_distribution<double> u(0, 1);
    bool ok = true;
    double worst = 0;
    for (const auto& name : builtin_names()) {
        const MethodTableau t = builtin(name);
        for (int trial = 0; trial < 50; ++trial) {
            const Complex z0(-3.0 * u(rng), 4.0 * (u(rng) - 0.5));
            const Complex z1(-5.0 * u(rng), 6.0 * (u(rng) - 0.5));
            SplitOdeProblem p = dahlquist_split(z0, z1);
            StageBlock b;
            b.t = 0;
            b.dt = 1.0;
            b.w.assign(t.s, RealVector(2));
            ComplexVector w0(t.s);
            for (std::size_t i = 0; i < t.s; ++i) {
                w0[i] = Complex(2 * u(rng) - 1, 2 * u(rng) - 1);
                b.w[i] = {w0[i].real(), w0[i].imag()};
            }
            b.f0.assign(t.s, RealVector(2));
            b.f1.assign(t.s, RealVector(2));
            for (std::size_t i = 0; i < t.s; ++i) {
                p.f0(0, b.w[i], b.f0[i]);
                p.f1(0, b.w[i], b.f1[i]);
            }
            const int n = 20;
            for (int k = 0; k < n; ++k) imex_step(t, p, b);
            ComplexMatrix mn = ComplexMatrix::identity(t.s);
            const ComplexMatrix mm = m_imex(t, z0, z1);
            for (int k = 0; k < n; ++k) mn = mm * mn;
            const ComplexVector wn = mn * w0;
            double num = 0, den = 0;
            for (std::size_t i = 0; i < t.s; ++i) {
                num = std::max(num, std::abs(wn[i] - Complex(b.w[i][0], b.w[i][1])));
                den = std::max(den, std::abs(wn[i]));
            }
            const double rel = num / std::max(den, 1e-300);
            worst = std::max(worst, rel);
            ok &= rel <= 1e-10;
        }
    }
    report(8, "20 integrator steps match M(z0,z1)^n on split Dahlquist (1e-10)", ok,
           fmt("worst %.2e", worst));
}

// ---- 9. search feasibility ---------------------------------------------------

void criterion_9() {
    const auto t0 = Clock::now();
    SearchSpec spec = default_search_spec(2);
    spec.seed = 12345;
    const SearchOutput out = run_search(spec);
    bool ok = !out.candidates.empty();
    for (const auto& c : out.candidates) {
        ok &= c.report.a_stable;
        ok &= c.report.superconv_implicit < 1e-7;
        ok &= c.report.superconv_explicit < 1e-7;
    }
    ok &= out.diagnostics.total_evals <= 100000;
    const double el = seconds_since(t0);
    ok &= el < 300.0;
    char buf[96];
    std::snprintf(buf, sizeof buf, "%zu candidates, %ld evals, %.0f s", out.candidates.size(),
                  out.diagnostics.total_evals, el);
    report(9, "seeded s=2 search finds certified A-stable methods within budget", ok, buf);
}

// ---- 10. Newton solver --------------------------------------------------------

void criterion_10() {
    bool ok = true;
    // quadratic contraction on the cubic stage equation
    SplitOdeProblem p;
    p.dimension = 1;
    p.f1 = [](double, const RealVector& u, RealVector& o) { o[0] = -u[0] * u[0] * u[0]; };
    p.jac_f1 = [](double, const RealVector& u, RealMatrix& j) {
        j = RealMatrix(1, 1);
        j(0, 0) = -3.0 * u[0] * u[0];
    };
    std::vector<double> history;
    const RealVector w =
        newton_solve_stage(1.0, 1.0, {1.0}, p, 0, {0.5}, NewtonOptions{}, nullptr, &history);
    ok &= std::abs(w[0] - 0.682327803828019) < 1e-10;
    for (std::size_t k = 0; k + 1 < history.size(); ++k)
        if (history[k] < 0.2 && history[k] > 1e-8)
            ok &= history[k + 1] <= 10.0 * history[k] * history[k];

    // stiff linear scalar against the closed form
    const double lambda = -1e6;
    SplitOdeProblem ps;
    ps.dimension = 1;
    ps.f1 = [lambda](double, const RealVector& u, RealVector& o) { o[0] = lambda * u[0]; };
    ps.jac_f1 = [lambda](double, const RealVector&, RealMatrix& j) {
        j = RealMatrix(1, 1);
        j(0, 0) = lambda;
    };
    const double dt = 0.02, gamma = 0.9, rhs = 0.7;
    const RealVector ws = newton_solve_stage(gamma, dt, {rhs}, ps, 0, {0.0}, NewtonOptions{});
    const double closed = rhs / (1.0 - dt * gamma * lambda);
    ok &= std::abs(ws[0] - closed) <= 1e-13 * std::abs(closed);
    report(10, "Newton: quadratic contraction and stiff linear closed form", ok);
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    std::printf("%d of 10 criteria passed\n", 10 - failures);
    return failures;
}
