#include "peer/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace peer {

namespace {

bool all_finite(const RealVector& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

void check_finite(const RealVector& v, const char* what) {
    if (!all_finite(v)) throw Error(std::string(what) + ": non-finite value encountered");
}

// rhs_i of stage i before the implicit correction: previous-step terms plus
// the strictly lower triangular coupling to already computed stages.
//
// The P-combination is assembled in deviation form around the last previous
// stage, w_ref + sum_j P(i,j) (w_j - w_ref), which is exact for constant
// states: stored coefficients satisfy P e = e only to roundoff, and that
// leak, amplified over many steps, otherwise floors high-order ladders.
// Accumulation runs in extended precision with a single rounding at the
// store for the same reason.
void assemble_rhs(const MethodTableau& t, const StageBlock& prev,
                  const std::vector<RealVector>& f0_new, const std::vector<RealVector>& f1_new,
                  std::size_t i, bool imex, std::vector<long double>& acc, RealVector& rhs) {
    const std::size_t s = t.s;
    const std::size_t m = prev.w[0].size();
    const long double dt = prev.dt;
    const RealVector& wref = prev.w[s - 1];
    for (std::size_t k = 0; k < m; ++k) acc[k] = wref[k];
    for (std::size_t j = 0; j < s; ++j) {
        const long double pij = t.P(i, j);
        const long double q0 = imex ? t.Qhat(i, j) : 0.0L;
        const long double q1 = t.Q(i, j);
        const RealVector& wj = prev.w[j];
        const RealVector& f0j = prev.f0[j];
        const RealVector& f1j = prev.f1[j];
        if (imex) {
            for (std::size_t k = 0; k < m; ++k)
                acc[k] += pij * (static_cast<long double>(wj[k]) - wref[k]) +
                          dt * (q0 * f0j[k] + q1 * f1j[k]);
        } else {
            // implicit path: f0 is folded into the f1 cache by the adapter.
            for (std::size_t k = 0; k < m; ++k)
                acc[k] += pij * (static_cast<long double>(wj[k]) - wref[k]) + dt * q1 * f1j[k];
        }
    }
    for (std::size_t j = 0; j < i; ++j) {
        const long double rh = imex ? t.Rhat(i, j) : 0.0L;
        const long double r = t.R(i, j);
        const RealVector& f0j = f0_new[j];
        const RealVector& f1j = f1_new[j];
        if (imex) {
            for (std::size_t k = 0; k < m; ++k) acc[k] += dt * (rh * f0j[k] + r * f1j[k]);
        } else {
            for (std::size_t k = 0; k < m; ++k) acc[k] += dt * r * f1j[k];
        }
    }
    rhs.resize(m);
    for (std::size_t k = 0; k < m; ++k) rhs[k] = static_cast<double>(acc[k]);
}

void step_core(const MethodTableau& t, const SplitOdeProblem& p, StageBlock& block,
               const NewtonOptions& opt, StepDiagnostics* diag, bool imex) {
    const std::size_t s = t.s;
    const std::size_t m = p.dimension;
    const double dt = block.dt;
    const double tn = block.t + dt;
    std::vector<RealVector> wn(s), f0n(s), f1n(s);
    RealVector rhs(m);
    std::vector<long double> acc(m);
    if (diag) {
        diag->newton_iterations = 0;
        diag->stage_residuals.assign(s, 0.0);
    }
    for (std::size_t i = 0; i < s; ++i) {
        assemble_rhs(t, block, f0n, f1n, i, imex, acc, rhs);
        check_finite(rhs, "step");
        const double t_stage = tn + t.c[i] * dt;
        int iters = 0;
        std::vector<double> history;
        try {
            wn[i] = newton_solve_stage(t.gamma, dt, rhs, p, t_stage, block.w[i], opt, &iters,
                                       diag ? &history : nullptr);
        } catch (const NewtonConvergenceError& e) {
            throw NewtonConvergenceError("stage " + std::to_string(i + 1) + ": " + e.what(),
                                         e.iterations, e.residual);
        }
        if (diag) {
            diag->newton_iterations += iters;
            diag->stage_residuals[i] = history.empty() ? 0.0 : history.back();
        }
        f0n[i].assign(m, 0.0);
        f1n[i].assign(m, 0.0);
        if (imex) {
            p.f0(t_stage, wn[i], f0n[i]);
            p.f1(t_stage, wn[i], f1n[i]);
        } else {
            p.f1(t_stage, wn[i], f1n[i]);
        }
        check_finite(f1n[i], "step");
    }
    block.t = tn;
    block.w = std::move(wn);
    block.f0 = std::move(f0n);
    block.f1 = std::move(f1n);
}

// Implicit specialization: fold the whole right-hand side into f1. The
// Jacobian and shifted solver of the original problem are reused; missing
// f0-derivative information only slows Newton, never biases the solution.
SplitOdeProblem fold_full_rhs(const SplitOdeProblem& p) {
    SplitOdeProblem full = p;
    auto base_f0 = p.f0;
    auto base_f1 = p.f1;
    full.f0 = {};
    full.f1 = [base_f0, base_f1, scratch = RealVector()](double t, const RealVector& u,
                                                         RealVector& out) mutable {
        base_f1(t, u, out);
        scratch.assign(u.size(), 0.0);
        base_f0(t, u, scratch);
        for (std::size_t k = 0; k < u.size(); ++k) out[k] += scratch[k];
    };
    return full;
}

double cost_substep(const SplitOdeProblem& p, double dt) {
    double h = dt / 50.0;
    if (p.stiffness_bound > 0) h = std::min(h, 0.5 / p.stiffness_bound);
    return h;
}

// Classical fourth-order one-step sweep of u' = f0 + f1 from t0, storing the
// state at each requested offset (sorted, nonnegative).
std::vector<RealVector> rk4_sweep(const SplitOdeProblem& p, const std::vector<double>& offsets,
                                  double h) {
    const std::size_t m = p.dimension;
    RealVector u = p.u0;
    RealVector k1(m), k2(m), k3(m), k4(m), tmp(m), f0buf(m), f1buf(m);
    auto rhs = [&](double t, const RealVector& x, RealVector& out) {
        out.assign(m, 0.0);
        if (p.f0) {
            p.f0(t, x, out);
            p.f1(t, x, f1buf);
            for (std::size_t k = 0; k < m; ++k) out[k] += f1buf[k];
        } else {
            p.f1(t, x, out);
        }
    };
    std::vector<RealVector> states;
    states.reserve(offsets.size());
    double tau = 0;
    for (double target : offsets) {
        while (tau < target - 1e-15 * std::max(1.0, target)) {
            const double step = std::min(h, target - tau);
            const double t = p.t0 + tau;
            rhs(t, u, k1);
            for (std::size_t k = 0; k < m; ++k) tmp[k] = u[k] + 0.5 * step * k1[k];
            rhs(t + 0.5 * step, tmp, k2);
            for (std::size_t k = 0; k < m; ++k) tmp[k] = u[k] + 0.5 * step * k2[k];
            rhs(t + 0.5 * step, tmp, k3);
            for (std::size_t k = 0; k < m; ++k) tmp[k] = u[k] + step * k3[k];
            rhs(t + step, tmp, k4);
            for (std::size_t k = 0; k < m; ++k)
                u[k] += step / 6.0 * (k1[k] + 2.0 * (k2[k] + k3[k]) + k4[k]);
            tau += step;
        }
        states.push_back(u);
    }
    return states;
}

// Vector-valued Neville interpolation through (nodes, values) at x.
// The update form lo + a (hi - lo) reproduces constant data exactly even
// for extrapolation weights.
RealVector neville(const std::vector<double>& nodes, std::vector<RealVector> values, double x) {
    const std::size_t n = nodes.size();
    for (std::size_t level = 1; level < n; ++level)
        for (std::size_t i = 0; i + level < n; ++i) {
            const double a = (x - nodes[i]) / (nodes[i + level] - nodes[i]);
            RealVector& lo = values[i];
            const RealVector& hi = values[i + 1];
            for (std::size_t k = 0; k < lo.size(); ++k) lo[k] += a * (hi[k] - lo[k]);
        }
    return values[0];
}

}  // namespace

RealVector newton_solve_stage(double gamma, double dt, const RealVector& rhs,
                              const SplitOdeProblem& p, double t_stage, const RealVector& guess,
                              const NewtonOptions& opt, int* iterations,
                              std::vector<double>* residual_history) {
    const std::size_t m = rhs.size();
    const double a = dt * gamma;
    const double noise = opt.residual_noise_factor * std::numeric_limits<double>::epsilon() *
                         std::abs(a) * p.stiffness_bound * (1.0 + norm_inf(guess));
    const double target = opt.abs_tol + opt.rel_tol * norm_inf(rhs) + noise;
    RealVector w = guess;
    RealVector g(m), f1buf(m), delta;
    std::optional<LuFactorization<double>> fact;
    RealMatrix jac;
    double res = 0;
    for (int it = 0;; ++it) {
        f1buf.assign(m, 0.0);
        p.f1(t_stage, w, f1buf);
        for (std::size_t k = 0; k < m; ++k) g[k] = w[k] - a * f1buf[k] - rhs[k];
        res = norm_inf(g);
        if (residual_history) residual_history->push_back(res);
        if (!std::isfinite(res))
            throw NewtonConvergenceError("newton: non-finite residual", it, res);
        if (res <= target) {
            if (iterations) *iterations = it;
            return w;
        }
        if (it >= opt.max_iters) break;
        if (p.solve_shifted) {
            delta.assign(m, 0.0);
            p.solve_shifted(t_stage, w, a, g, delta);
        } else {
            if (!fact || !opt.reuse_jacobian) {
                jac = RealMatrix(m, m);
                p.jac_f1(t_stage, w, jac);
                for (auto& x : jac.data()) x = -a * x;
                for (std::size_t k = 0; k < m; ++k) jac(k, k) += 1.0;
                fact.emplace(std::move(jac));
            }
            delta = fact->solve(g);
        }
        for (std::size_t k = 0; k < m; ++k) w[k] -= delta[k];
    }
    throw NewtonConvergenceError("newton: no convergence after " +
                                     std::to_string(opt.max_iters) + " iterations, residual " +
                                     std::to_string(res),
                                 opt.max_iters, res);
}

void imex_step(const MethodTableau& t, const SplitOdeProblem& p, StageBlock& block,
               const NewtonOptions& opt, StepDiagnostics* diag) {
    step_core(t, p, block, opt, diag, true);
}

void implicit_step(const MethodTableau& t, const SplitOdeProblem& p, StageBlock& block,
                   const NewtonOptions& opt, StepDiagnostics* diag) {
    const SplitOdeProblem full = fold_full_rhs(p);
    // Cached f0 entries are unused on this path; fold them into f1 caches.
    for (std::size_t i = 0; i < block.stages(); ++i)
        if (!block.f0[i].empty())
            for (std::size_t k = 0; k < block.f1[i].size(); ++k) {
                block.f1[i][k] += block.f0[i][k];
                block.f0[i][k] = 0.0;
            }
    step_core(t, full, block, opt, diag, false);
}

void explicit_step(const MethodTableau& t, const SplitOdeProblem& p, StageBlock& block,
                   StepDiagnostics* diag) {
    const std::size_t s = t.s;
    const std::size_t m = p.dimension;
    const double dt = block.dt;
    const double tn = block.t + dt;
    std::vector<RealVector> wn(s), f0n(s), f1n(s);
    if (diag) {
        diag->newton_iterations = 0;
        diag->stage_residuals.assign(s, 0.0);
    }
    std::vector<long double> acc(m);
    const RealVector wref = block.w[s - 1];
    for (std::size_t i = 0; i < s; ++i) {
        for (std::size_t k = 0; k < m; ++k) acc[k] = wref[k];
        for (std::size_t j = 0; j < s; ++j) {
            const long double pij = t.P(i, j);
            const long double qh = t.Qhat(i, j);
            for (std::size_t k = 0; k < m; ++k)
                acc[k] += pij * (static_cast<long double>(block.w[j][k]) - wref[k]) +
                          static_cast<long double>(dt) * qh * (block.f0[j][k] + block.f1[j][k]);
        }
        for (std::size_t j = 0; j < i; ++j) {
            const long double rh = t.Rhat(i, j);
            if (rh == 0.0L) continue;
            for (std::size_t k = 0; k < m; ++k)
                acc[k] += static_cast<long double>(dt) * rh * (f0n[j][k] + f1n[j][k]);
        }
        RealVector w(m);
        for (std::size_t k = 0; k < m; ++k) w[k] = static_cast<double>(acc[k]);
        check_finite(w, "explicit_step");
        const double t_stage = tn + t.c[i] * dt;
        f0n[i].assign(m, 0.0);
        f1n[i].assign(m, 0.0);
        if (p.f0) p.f0(t_stage, w, f0n[i]);
        p.f1(t_stage, w, f1n[i]);
        wn[i] = std::move(w);
    }
    block.t = tn;
    block.w = std::move(wn);
    block.f0 = std::move(f0n);
    block.f1 = std::move(f1n);
}

StageBlock generate_starting_stages(const MethodTableau& t, const SplitOdeProblem& p, double dt) {
    const std::size_t s = t.s;
    const std::size_t m = p.dimension;
    StageBlock block;
    block.t = p.t0;
    block.dt = dt;
    block.w.assign(s, RealVector(m, 0.0));
    if (p.exact) {
        for (std::size_t i = 0; i < s; ++i) p.exact(p.t0 + t.c[i] * dt, block.w[i]);
    } else {
        bool any_negative = false;
        for (double ci : t.c) any_negative |= ci < 0;
        std::vector<double> offsets;  // forward sample offsets, sorted unique
        for (double ci : t.c)
            if (ci >= 0) offsets.push_back(ci * dt);
        std::vector<double> cheb;
        if (any_negative) {
            // Chebyshev samples over [0, dt] anchor the backward polynomial
            // extension along the smooth solution branch.
            const std::size_t n = s + 2;
            for (std::size_t j = 0; j < n; ++j) {
                const double theta = 3.14159265358979323846 * (2.0 * j + 1.0) / (2.0 * n);
                cheb.push_back(0.5 * dt * (1.0 - std::cos(theta)));
            }
            offsets.insert(offsets.end(), cheb.begin(), cheb.end());
        }
        std::sort(offsets.begin(), offsets.end());
        offsets.erase(std::unique(offsets.begin(), offsets.end()), offsets.end());
        const double h = cost_substep(p, dt);
        std::vector<RealVector> states = rk4_sweep(p, offsets, h);
        if (s >= 4) {
            // Richardson pass lifts the start above order s+1.
            const std::vector<RealVector> fine = rk4_sweep(p, offsets, 0.5 * h);
            for (std::size_t i = 0; i < states.size(); ++i)
                for (std::size_t k = 0; k < m; ++k)
                    states[i][k] = (16.0 * fine[i][k] - states[i][k]) / 15.0;
        }
        auto state_at = [&](double off) -> const RealVector& {
            const auto it = std::lower_bound(offsets.begin(), offsets.end(), off - 1e-300);
            return states[static_cast<std::size_t>(it - offsets.begin())];
        };
        std::vector<RealVector> cheb_states;
        for (double off : cheb) cheb_states.push_back(state_at(off));
        for (std::size_t i = 0; i < s; ++i) {
            const double off = t.c[i] * dt;
            block.w[i] = (off >= 0) ? state_at(off) : neville(cheb, cheb_states, off);
        }
    }
    block.f0.assign(s, RealVector(m, 0.0));
    block.f1.assign(s, RealVector(m, 0.0));
    for (std::size_t i = 0; i < s; ++i) {
        const double t_stage = p.t0 + t.c[i] * dt;
        if (p.f0) p.f0(t_stage, block.w[i], block.f0[i]);
        p.f1(t_stage, block.w[i], block.f1[i]);
    }
    return block;
}

IntegrationResult integrate(const MethodTableau& t, const SplitOdeProblem& p, double dt,
                            StepMode mode, const NewtonOptions& opt, std::ostream* trace) {
    if (!(dt > 0)) throw Error("integrate: dt must be positive");
    const double x = (p.t_end - p.t0) / dt;
    const long long n = std::llround(x);
    if (n < 0 || std::abs(x - static_cast<double>(n)) > 1e-8 * std::max(1.0, std::abs(x)))
        throw Error("integrate: (t_end - t0)/dt = " + std::to_string(x) +
                    " is not an integer step count");
    IntegrationResult result;
    result.block = generate_starting_stages(t, p, dt);
    if (trace) *trace << "step,time,newton_iterations,stage_residuals\n";
    StepDiagnostics sd;
    char buf[96];
    for (long long step = 1; step < n; ++step) {
        try {
            switch (mode) {
                case StepMode::Imex:
                    imex_step(t, p, result.block, opt, &sd);
                    break;
                case StepMode::Implicit:
                    implicit_step(t, p, result.block, opt, &sd);
                    break;
                case StepMode::Explicit:
                    explicit_step(t, p, result.block, &sd);
                    break;
            }
        } catch (const Error& e) {
            throw Error("step " + std::to_string(step) + ": " + e.what());
        }
        result.diagnostics.steps += 1;
        result.diagnostics.newton_iterations += sd.newton_iterations;
        for (double r : sd.stage_residuals)
            result.diagnostics.max_residual = std::max(result.diagnostics.max_residual, r);
        if (trace) {
            std::snprintf(buf, sizeof buf, "%lld,%.17g,%ld", step, result.block.t,
                          sd.newton_iterations);
            *trace << buf;
            for (double r : sd.stage_residuals) {
                std::snprintf(buf, sizeof buf, ",%.17g", r);
                *trace << buf;
            }
            *trace << "\n";
        }
    }
    result.u_end = result.block.w.back();
    return result;
}

SplitOdeProblem dahlquist_split(Complex lambda0, Complex lambda1) {
    auto apply = [](Complex lambda, const RealVector& u, RealVector& out) {
        const Complex y(u[0], u[1]);
        const Complex r = lambda * y;
        out[0] = r.real();
        out[1] = r.imag();
    };
    SplitOdeProblem p;
    p.dimension = 2;
    p.u0 = {1.0, 0.0};
    p.f0 = [lambda0, apply](double, const RealVector& u, RealVector& out) {
        apply(lambda0, u, out);
    };
    p.f1 = [lambda1, apply](double, const RealVector& u, RealVector& out) {
        apply(lambda1, u, out);
    };
    p.jac_f1 = [lambda1](double, const RealVector&, RealMatrix& j) {
        j = RealMatrix(2, 2);
        j(0, 0) = lambda1.real();
        j(0, 1) = -lambda1.imag();
        j(1, 0) = lambda1.imag();
        j(1, 1) = lambda1.real();
    };
    p.stiffness_bound = std::abs(lambda0) + std::abs(lambda1);
    return p;
}

}  // namespace peer
