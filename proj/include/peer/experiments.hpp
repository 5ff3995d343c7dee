#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "peer/integrator.hpp"
#include "peer/tableau.hpp"

namespace peer {

/// Stiff Prothero-Robinson pair on [0, 5] with stiffness 1e6 and analytic
/// solution (cos t, sin t); the coupling term is explicit, the stiff
/// relaxation implicit.
SplitOdeProblem prothero_robinson();

/// Linear advection-reaction system on x in (0, 1), t in (0, 1]:
///   u_t + u_x = -k1 u + k2 v,          k1 = 1e6, k2 = 2e6,
///   v_t       =  k1 u - k2 v + 1,
/// inflow u(0, t) = 1 - sin(12 t)^4, initial data on the reaction
/// quasi-equilibrium. Interior advection uses fourth-order central
/// differences on m nodes; nodes 1, 2 and the outflow pair use third-order
/// upwind-biased one-sided stencils. State layout: [u_1..u_m, v_1..v_m].
/// The reaction (implicit part) installs a per-node shifted solver.
SplitOdeProblem advection_reaction(std::size_t m);

/// Advection operator alone (exposed for stencil order tests):
/// du_i ~ u_x(x_i) given the inflow boundary value.
void ar_apply_advection(std::size_t m, double boundary_value, const RealVector& u,
                        RealVector& du);

/// max_i |y_i - ref_i| / (1 + |ref_i|)
double scaled_max_error(const RealVector& y, const RealVector& ref);

/// sqrt(sum_i (y_i - ref_i)^2)
double l2_error(const RealVector& y, const RealVector& ref);

/// Least-squares slope of log(err) against log(dt); needs at least three
/// positive pairs.
double convergence_order(const std::vector<double>& dts, const std::vector<double>& errors);

enum class ArErrorQuantity { TotalConcentration, FullState };

struct ExperimentOptions {
    std::size_t ar_m = 400;
    ArErrorQuantity ar_quantity = ArErrorQuantity::TotalConcentration;
    std::string reference_method = "imex-peer3s";
    double reference_divisor = 8.0;  // reference step = min(dts) / divisor
    // Stage tolerances; unset picks per-problem defaults tight enough that
    // Newton slop stays below the discretization error.
    std::optional<NewtonOptions> newton;
    unsigned threads = 0;
};

struct ExperimentResult {
    std::string method;
    std::vector<double> dts;
    std::vector<double> errors;       // NaN where failed
    std::vector<char> failed;
    double fitted_order = 0;          // NaN with fewer than three successes
};

/// Error ladders behind the published convergence figures.
std::vector<double> pr_step_ladder();       // 5/(100+60i), i = 0..8
std::vector<double> ar_step_ladder();       // (4,2,1,0.5,0.25,0.1,0.05,0.025)e-3
std::vector<double> ar_mid_step_ladder();   // (2,1,0.5,0.25,0.1)e-3

/// Run one experiment ("prothero-robinson" or "advection-reaction") over a
/// step-size ladder. Errors are measured at the final time against the
/// analytic solution (PR) or a reference run (AR). Individual run failures
/// are recorded, not fatal; a failed AR reference aborts the experiment.
std::vector<ExperimentResult> run_experiment(const std::string& name,
                                             const std::vector<MethodTableau>& methods,
                                             const std::vector<double>& dts,
                                             const ExperimentOptions& opt = {});

/// CSV rows: method,dt,error,failed,fitted_order (17 significant digits).
void write_experiment_csv(std::ostream& os, const std::vector<ExperimentResult>& results);

}  // namespace peer
