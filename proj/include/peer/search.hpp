#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "peer/tableau.hpp"

namespace peer {

struct SimplexOptions {
    double reflection = 1.0;
    double expansion = 2.0;
    double contraction = 0.5;
    double shrink = 0.5;
    double tol = 1e-10;     // simplex diameter
    long max_evals = 4000;  // objective evaluation budget per run
    double init_step = 0.15;
};

struct SimplexResult {
    RealVector x;
    double f = 0;
    long evals = 0;
    bool converged = false;  // false: eval budget exhausted, best-so-far returned
};

/// Nelder-Mead downhill simplex. Deterministic; never returns a point worse
/// than the start.
SimplexResult nelder_mead(const std::function<double(const RealVector&)>& objective,
                          const RealVector& x0, const SimplexOptions& opt = {});

/// Free-coefficient layouts for the implicit phase:
///  - OptimallyZeroStable (s = 2, 3): P = e v^T;
///    params = [c_1..c_{s-1}, gamma, R strict lower, v_1..v_{s-1}],
///    with v_s = 1 - sum(v_i) enforcing v^T e = 1.
///  - GeneralZeroStable (s = 4): free P entries with the last column set to
///    e minus the row sums (pre-consistency by construction), zero-stability
///    penalized through the non-unit eigenvalues of P;
///    params = [c_1..c_{s-1}, gamma, R strict lower, P columns 1..s-1].
enum class Parameterization { OptimallyZeroStable, GeneralZeroStable };

struct SearchWeights {
    double astab = 1e4;            // penalty on sampled rho above one
    double rho_rinvq = 1.0;
    double coeff_frobenius = 0.02;  // ||P||_F + ||Q||_F + ||R||_F
    double defect_norm = 1.0;       // ||d_{s+1}||
    double superconv = 1e4;         // |v^T d_{s+1}| (continuation scales this)
    double area_se = 0.2;           // explicit phase: -|S_E|
    double area_s90 = 0.2;          // explicit phase: -|S_90|
    double extrap_frobenius = 0.02;  // ||S1||_F + ||S2||_F
    double extrap_norm = 1.0;        // ||R l_s||
    double superconv_ex = 1e4;       // |v^T R l_s| (continuation scales this)
};

struct SearchSpec {
    std::size_t s = 2;
    Parameterization parameterization = Parameterization::OptimallyZeroStable;
    SearchWeights weights;
    int multistart = 6;
    std::uint64_t seed = 0;
    SimplexOptions simplex;
    int penalty_rounds = 3;        // penalty continuation restarts per start
    double penalty_growth = 100.0;
    int explicit_multistart = 3;
    int max_candidates = 4;        // implicit candidates carried to phase two
    SimplexOptions explicit_simplex{.tol = 1e-10, .max_evals = 800, .init_step = 0.25};
    RealVector init_center;        // optional: center the start cloud here
    double init_spread = 0.05;
    unsigned threads = 0;
    // Coarse region grid used inside the explicit objective; final reports
    // re-certify with the full stability sampling.
    std::size_t coarse_nx = 40, coarse_ny = 40;
    double coarse_x_lo = -8.0, coarse_x_hi = 0.5, coarse_y_hi = 4.0;
    std::size_t coarse_z1_radii = 8;
};

/// Preset tuned to recover feasibility (A-stable, super-convergent), not to
/// re-derive any published coefficient set.
SearchSpec default_search_spec(std::size_t s);

std::size_t implicit_param_count(const SearchSpec& spec);

/// Parameter vector of an existing tableau under the spec's layout.
RealVector encode_implicit(const MethodTableau& t, const SearchSpec& spec);

/// Decode; throws TableauFormatError when the point is structurally invalid
/// (duplicate nodes, nonpositive gamma, ...).
MethodTableau decode_implicit(const RealVector& x, const SearchSpec& spec);

/// Implicit-phase objective: heavy A-stability and zero-stability penalties
/// plus weighted rho(R^-1 Q), coefficient norms, ||d_{s+1}|| and the
/// super-convergence residual. Invalid decodes score >= 1e6.
double implicit_objective(const RealVector& x, const SearchSpec& spec,
                          double superconv_scale = 1.0);

/// Explicit-phase objective over the strict lower triangle of S2: rewards
/// large coarse-grid |S_E| and |S_90|, penalizes extrapolation norms and the
/// explicit super-convergence residual.
double explicit_objective(const RealVector& s2_params, const MethodTableau& base,
                          const SearchSpec& spec, double superconv_scale = 1.0);

struct SearchDiagnostics {
    long total_evals = 0;
    int implicit_feasible = 0;
    int returned = 0;
};

struct SearchCandidate {
    MethodTableau tableau;
    CertificationReport report;
    double implicit_score = 0;
    double explicit_score = 0;
};

struct SearchOutput {
    std::vector<SearchCandidate> candidates;  // best first
    SearchDiagnostics diagnostics;
};

/// Two-phase multistart search: implicit coefficients first, then the
/// extrapolation matrix per surviving candidate. Every returned tableau
/// passes certification with super-convergence residuals below 1e-7.
/// Deterministic for a fixed spec and seed. Returns an empty candidate list
/// (with diagnostics) when nothing feasible was found.
SearchOutput run_search(const SearchSpec& spec);

}  // namespace peer
