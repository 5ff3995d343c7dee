#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "peer/experiments.hpp"
#include "peer/methods.hpp"

using namespace peer;

TEST_CASE("prothero-robinson is consistent with its analytic solution") {
    SplitOdeProblem p = prothero_robinson();
    RealVector y(2), f0(2), f1(2);
    p.exact(0.0, y);
    CHECK(y[0] == 1.0);
    CHECK(y[1] == 0.0);
    for (double t : {0.0, 0.37, 1.0, 2.5, 4.99}) {
        p.exact(t, y);
        p.f0(t, y, f0);
        p.f1(t, y, f1);
        // F0 + F1 must equal (cos, sin)' = (-sin, cos)
        CHECK(std::abs(f0[0] + f1[0] + std::sin(t)) < 1e-12);
        CHECK(std::abs(f0[1] + f1[1] - std::cos(t)) < 1e-12);
    }
    // residual of the analytic solution under the full right-hand side
    p.exact(1.0, y);
    p.f0(1.0, y, f0);
    p.f1(1.0, y, f1);
    CHECK(std::hypot(f0[0] + f1[0] + std::sin(1.0), f0[1] + f1[1] - std::cos(1.0)) < 1e-12);
}

TEST_CASE("advection-reaction initial data sits on the reaction balance") {
    const std::size_t m = 16;
    SplitOdeProblem p = advection_reaction(m);
    CHECK(p.dimension == 2 * m);
    const double h = 1.0 / static_cast<double>(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double x = static_cast<double>(i + 1) * h;
        CHECK(p.u0[i] == doctest::Approx(1.0 + x));
        CHECK(p.u0[m + i] == doctest::Approx((1e6 * (1.0 + x) + 1.0) / 2e6));
    }
    // the initial state is a steady point of the semi-discrete system
    RealVector f0(2 * m), f1(2 * m);
    p.f0(0.0, p.u0, f0);
    p.f1(0.0, p.u0, f1);
    for (std::size_t i = 0; i < 2 * m; ++i) CHECK(std::abs(f0[i] + f1[i]) < 1e-9);

    CHECK_THROWS_AS(advection_reaction(4), Error);
}

TEST_CASE("advection operator annihilates constants") {
    const std::size_t m = 24;
    RealVector u(m, 3.75), du(m, 1.0);
    ar_apply_advection(m, 3.75, u, du);
    for (double v : du) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("interior stencil is fourth order, boundary stencils third order") {
    // phase chosen so no derivative vanishes at the boundary nodes
    auto stencil_errors = [](std::size_t m, double phase) {
        const double h = 1.0 / static_cast<double>(m);
        const double w = 2 * 3.14159265358979323846;
        RealVector u(m), du(m);
        for (std::size_t i = 0; i < m; ++i)
            u[i] = std::sin(w * static_cast<double>(i + 1) * h + phase);
        ar_apply_advection(m, std::sin(phase), u, du);
        double interior = 0, boundary = 0;
        for (std::size_t i = 0; i < m; ++i) {
            const double exact = w * std::cos(w * static_cast<double>(i + 1) * h + phase);
            const double err = std::abs(du[i] - exact);
            if (i >= 2 && i + 2 < m)
                interior = std::max(interior, err);
            else
                boundary = std::max(boundary, err);
        }
        return std::pair{interior, boundary};
    };
    auto [i48, unused48] = stencil_errors(48, 0.0);
    auto [i96, unused96] = stencil_errors(96, 0.0);
    CHECK(i48 / i96 == doctest::Approx(16.0).epsilon(0.2));  // fourth order
    (void)unused48;
    (void)unused96;
    auto [is48, b48] = stencil_errors(48, 0.7);
    auto [is96, b96] = stencil_errors(96, 0.7);
    CHECK(is48 / is96 == doctest::Approx(16.0).epsilon(0.2));
    CHECK(b48 / b96 == doctest::Approx(8.0).epsilon(0.25));  // third order
}

TEST_CASE("error norms") {
    CHECK(scaled_max_error({1.0, 2.0}, {1.0, 2.0}) == 0.0);
    CHECK(scaled_max_error({2.0, 0.0}, {1.0, 0.0}) == doctest::Approx(0.5));
    CHECK(scaled_max_error({0.0, 3.0}, {0.0, 1.0}) == doctest::Approx(1.0));
    CHECK(l2_error({0.0, 0.0}, {0.0, 0.0}) == 0.0);
    CHECK(l2_error({3.0, 0.0}, {0.0, 4.0}) == doctest::Approx(5.0));
    CHECK_THROWS_AS(l2_error({1.0}, {1.0, 2.0}), Error);

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1, 1);
    RealVector a(64), b(64);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = u(rng);
        b[i] = u(rng);
    }
    double naive = 0;
    for (std::size_t i = 0; i < a.size(); ++i) naive += (a[i] - b[i]) * (a[i] - b[i]);
    CHECK(l2_error(a, b) == doctest::Approx(std::sqrt(naive)).epsilon(1e-15));
}

TEST_CASE("convergence_order on exact power laws") {
    std::vector<double> dts = {0.1, 0.05, 0.025, 0.0125};
    std::vector<double> errs;
    for (double dt : dts) errs.push_back(7.3 * dt * dt * dt);
    CHECK(convergence_order(dts, errs) == doctest::Approx(3.0).epsilon(1e-12));
    // invariant under uniform error scaling
    for (auto& e : errs) e *= 1e4;
    CHECK(convergence_order(dts, errs) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK_THROWS_AS(convergence_order({0.1, 0.05}, {1.0, 0.5}), Error);
}

TEST_CASE("prothero-robinson ladder errors decrease monotonically") {
    std::vector<MethodTableau> methods;
    for (const auto& name : builtin_names()) methods.push_back(builtin(name));
    auto results = run_experiment("prothero-robinson", methods, pr_step_ladder());
    for (const auto& r : results) {
        int violations = 0;
        for (std::size_t i = 0; i + 1 < r.errors.size(); ++i)
            if (!(r.errors[i + 1] < r.errors[i])) ++violations;
        CHECK(violations <= 1);  // pre-asymptotic slack at the largest step only
        CHECK_FALSE(std::isnan(r.fitted_order));
    }
    CHECK(results[0].fitted_order == doctest::Approx(3.0).epsilon(0.1));
}

TEST_CASE("advection-reaction errors are reference-consistent at desk scale") {
    ExperimentOptions opt;
    opt.ar_m = 48;
    opt.threads = 2;
    std::vector<double> dts = {2e-3, 1e-3, 5e-4};
    std::vector<MethodTableau> methods = {builtin("imex-peer2s")};
    auto base = run_experiment("advection-reaction", methods, dts, opt);
    ExperimentOptions opt2 = opt;
    opt2.reference_divisor = 16.0;
    auto finer = run_experiment("advection-reaction", methods, dts, opt2);
    for (std::size_t i = 0; i < 2; ++i) {  // the two largest steps
        CHECK(std::abs(base[0].errors[i] - finer[0].errors[i]) < 0.01 * base[0].errors[i]);
    }
    CHECK(base[0].fitted_order == doctest::Approx(3.0).epsilon(0.15));
}

TEST_CASE("experiment CSV format") {
    std::vector<MethodTableau> methods = {builtin("imex-peer2s")};
    auto results = run_experiment("prothero-robinson", methods, {0.05, 0.025, 0.0125});
    std::ostringstream os;
    write_experiment_csv(os, results);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "method,dt,error,failed,fitted_order");
    int rows = 0;
    while (std::getline(in, line)) {
        CHECK(line.find("imex-peer2s,") == 0);
        ++rows;
    }
    CHECK(rows == 3);

    CHECK_THROWS_AS(run_experiment("gravity-waves", methods, {0.1}), Error);
}
