#pragma once

#include <functional>
#include <iosfwd>
#include <optional>

#include "peer/tableau.hpp"

namespace peer {

/// Newton failed to reach its residual target within the iteration budget.
class NewtonConvergenceError : public Error {
public:
    NewtonConvergenceError(const std::string& what, int iterations, double residual)
        : Error(what), iterations(iterations), residual(residual) {}
    int iterations = 0;
    double residual = 0;
};

/// Split right-hand side u' = f0(t, u) + f1(t, u); f0 is advanced by
/// extrapolation (explicitly), f1 implicitly. `jac_f1` supplies the dense
/// Jacobian of f1 for the Newton matrix. Problems whose shifted system
/// (I - a J1) x = b has cheap structure (block reactions, say) can install
/// `solve_shifted` instead; the dense path is the fallback.
struct SplitOdeProblem {
    std::size_t dimension = 0;
    std::function<void(double, const RealVector&, RealVector&)> f0;
    std::function<void(double, const RealVector&, RealVector&)> f1;
    std::function<void(double, const RealVector&, RealMatrix&)> jac_f1;
    std::function<void(double, const RealVector&, double, const RealVector&, RealVector&)>
        solve_shifted;
    std::function<void(double, RealVector&)> exact;  // optional analytic solution
    double t0 = 0;
    double t_end = 0;
    RealVector u0;
    double stiffness_bound = 0;  // Jacobian norm estimate for starting-stage substeps
};

/// The s stage vectors carried between steps, w[i] ~ u(t + c_i dt),
/// with the right-hand side evaluations at those stages cached.
struct StageBlock {
    double t = 0;
    double dt = 0;
    std::vector<RealVector> w;
    std::vector<RealVector> f0;
    std::vector<RealVector> f1;
    std::size_t stages() const noexcept { return w.size(); }
};

struct NewtonOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_iters = 25;
    bool reuse_jacobian = false;  // refresh every iteration by default
    // The stage residual cannot be evaluated below roundoff of the
    // dt*gamma*f1 term; the convergence target is widened by
    // factor * eps * |dt*gamma| * stiffness_bound * (1 + |w|). Set to zero
    // for right-hand sides evaluated in extended precision.
    double residual_noise_factor = 4.0;
};

enum class StepMode { Imex, Implicit, Explicit };

struct StepDiagnostics {
    long newton_iterations = 0;
    std::vector<double> stage_residuals;
};

struct IntegrationDiagnostics {
    long steps = 0;
    long newton_iterations = 0;
    double max_residual = 0;
};

/// Solve w - dt*gamma*f1(t, w) = rhs by Newton iteration:
/// (I - dt*gamma*J1) delta = -residual, w += delta.
RealVector newton_solve_stage(double gamma, double dt, const RealVector& rhs,
                              const SplitOdeProblem& p, double t_stage, const RealVector& guess,
                              const NewtonOptions& opt, int* iterations = nullptr,
                              std::vector<double>* residual_history = nullptr);

/// One step of the IMEX scheme
///   w_n = P w_{n-1} + dt Qhat f0(w_{n-1}) + dt Rhat f0(w_n)
///       + dt Q f1(w_{n-1}) + dt R f1(w_n).
/// Rhat is strictly lower triangular and R has diagonal gamma, so stage i
/// couples implicitly only to itself and is solved sequentially.
void imex_step(const MethodTableau& t, const SplitOdeProblem& p, StageBlock& block,
               const NewtonOptions& opt = {}, StepDiagnostics* diag = nullptr);

/// One step of the implicit method with the full right-hand side f0 + f1
/// treated implicitly (the Newton matrix still uses jac_f1 only; the
/// residual test keeps the iteration honest for mildly stiff f0).
void implicit_step(const MethodTableau& t, const SplitOdeProblem& p, StageBlock& block,
                   const NewtonOptions& opt = {}, StepDiagnostics* diag = nullptr);

/// One step of the explicit companion method on the full right-hand side;
/// no nonlinear solves.
void explicit_step(const MethodTableau& t, const SplitOdeProblem& p, StageBlock& block,
                   StepDiagnostics* diag = nullptr);

/// Starting stages of order >= s+1: the analytic solution when available,
/// otherwise Runge-Kutta sub-stepping of the unsplit system from t0 (with a
/// Richardson pass for s = 4). Stages left of t0 (negative nodes) are taken
/// from the polynomial extension of the forward samples, which follows the
/// smooth solution branch even when the problem is stiff.
StageBlock generate_starting_stages(const MethodTableau& t, const SplitOdeProblem& p, double dt);

struct IntegrationResult {
    StageBlock block;
    RealVector u_end;  // last stage of the final block, at t_end
    IntegrationDiagnostics diagnostics;
};

/// March from t0 to t_end at constant step size; (t_end - t0)/dt must be an
/// integer (checked to 1e-8 relative). A CSV row per step is written to
/// `trace` when given: step,time,newton_iterations,stage residuals.
IntegrationResult integrate(const MethodTableau& t, const SplitOdeProblem& p, double dt,
                            StepMode mode = StepMode::Imex, const NewtonOptions& opt = {},
                            std::ostream* trace = nullptr);

/// Split scalar test equation y' = lambda0 y + lambda1 y over R^2
/// (real and imaginary parts), for stability cross-checks.
SplitOdeProblem dahlquist_split(Complex lambda0, Complex lambda1);

}  // namespace peer
