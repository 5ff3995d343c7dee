#include "peer/search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <random>

#include "peer/parallel.hpp"
#include "peer/stability.hpp"

namespace peer {

SimplexResult nelder_mead(const std::function<double(const RealVector&)>& objective,
                          const RealVector& x0, const SimplexOptions& opt) {
    const std::size_t n = x0.size();
    if (n == 0) throw Error("nelder_mead: empty parameter vector");
    long evals = 0;
    auto eval = [&](const RealVector& x) {
        ++evals;
        return objective(x);
    };
    std::vector<RealVector> xs(n + 1, x0);
    std::vector<double> fs(n + 1);
    for (std::size_t i = 0; i < n; ++i)
        xs[i + 1][i] += opt.init_step * std::max(1.0, std::abs(x0[i]));
    for (std::size_t i = 0; i <= n; ++i) fs[i] = eval(xs[i]);

    std::vector<std::size_t> order(n + 1);
    auto sort_simplex = [&] {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
    };
    RealVector centroid(n), xr(n), xe(n), xc(n);
    bool converged = false;
    while (true) {
        sort_simplex();
        double diameter = 0;
        for (std::size_t i = 1; i <= n; ++i)
            for (std::size_t k = 0; k < n; ++k)
                diameter = std::max(diameter, std::abs(xs[order[i]][k] - xs[order[0]][k]));
        if (diameter < opt.tol) {
            converged = true;
            break;
        }
        if (evals >= opt.max_evals) break;

        const std::size_t best = order[0], worst = order[n], second = order[n - 1];
        centroid.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k) centroid[k] += xs[order[i]][k];
        for (double& c : centroid) c /= static_cast<double>(n);

        for (std::size_t k = 0; k < n; ++k)
            xr[k] = centroid[k] + opt.reflection * (centroid[k] - xs[worst][k]);
        const double fr = eval(xr);
        if (fr < fs[best]) {
            for (std::size_t k = 0; k < n; ++k)
                xe[k] = centroid[k] + opt.expansion * (xr[k] - centroid[k]);
            const double fe = eval(xe);
            if (fe < fr) {
                xs[worst] = xe;
                fs[worst] = fe;
            } else {
                xs[worst] = xr;
                fs[worst] = fr;
            }
            continue;
        }
        if (fr < fs[second]) {
            xs[worst] = xr;
            fs[worst] = fr;
            continue;
        }
        if (fr < fs[worst]) {  // outside contraction
            for (std::size_t k = 0; k < n; ++k)
                xc[k] = centroid[k] + opt.contraction * (xr[k] - centroid[k]);
            const double fc = eval(xc);
            if (fc <= fr) {
                xs[worst] = xc;
                fs[worst] = fc;
                continue;
            }
        } else {  // inside contraction
            for (std::size_t k = 0; k < n; ++k)
                xc[k] = centroid[k] - opt.contraction * (centroid[k] - xs[worst][k]);
            const double fc = eval(xc);
            if (fc < fs[worst]) {
                xs[worst] = xc;
                fs[worst] = fc;
                continue;
            }
        }
        // shrink toward the best vertex
        for (std::size_t i = 1; i <= n; ++i) {
            const std::size_t idx = order[i];
            for (std::size_t k = 0; k < n; ++k)
                xs[idx][k] = xs[best][k] + opt.shrink * (xs[idx][k] - xs[best][k]);
            fs[idx] = eval(xs[idx]);
            if (evals >= opt.max_evals) break;
        }
    }
    sort_simplex();
    return {xs[order[0]], fs[order[0]], evals, converged};
}

SearchSpec default_search_spec(std::size_t s) {
    SearchSpec spec;
    spec.s = s;
    spec.parameterization =
        (s == 4) ? Parameterization::GeneralZeroStable : Parameterization::OptimallyZeroStable;
    if (s == 4) {
        spec.multistart = 10;
        spec.simplex.max_evals = 6000;
    }
    return spec;
}

std::size_t implicit_param_count(const SearchSpec& spec) {
    const std::size_t s = spec.s;
    const std::size_t base = (s - 1) + 1 + s * (s - 1) / 2;
    if (spec.parameterization == Parameterization::OptimallyZeroStable) return base + (s - 1);
    return base + s * (s - 1);
}

RealVector encode_implicit(const MethodTableau& t, const SearchSpec& spec) {
    if (t.s != spec.s) throw Error("encode_implicit: stage count mismatch");
    RealVector x;
    for (std::size_t i = 0; i + 1 < t.s; ++i) x.push_back(t.c[i]);
    x.push_back(t.gamma);
    for (std::size_t i = 0; i < t.s; ++i)
        for (std::size_t j = 0; j < i; ++j) x.push_back(t.R(i, j));
    if (spec.parameterization == Parameterization::OptimallyZeroStable) {
        for (std::size_t i = 0; i + 1 < t.s; ++i) x.push_back(t.v[i]);
    } else {
        for (std::size_t i = 0; i < t.s; ++i)
            for (std::size_t j = 0; j + 1 < t.s; ++j) x.push_back(t.P(i, j));
    }
    return x;
}

MethodTableau decode_implicit(const RealVector& x, const SearchSpec& spec) {
    const std::size_t s = spec.s;
    if (x.size() != implicit_param_count(spec))
        throw TableauFormatError("decode_implicit: wrong parameter count");
    std::size_t k = 0;
    std::vector<double> c(s);
    for (std::size_t i = 0; i + 1 < s; ++i) c[i] = x[k++];
    c[s - 1] = 1.0;
    const double gamma = x[k++];
    std::vector<double> r_lower(s * (s - 1) / 2);
    for (auto& r : r_lower) r = x[k++];
    RealMatrix p(s, s);
    if (spec.parameterization == Parameterization::OptimallyZeroStable) {
        RealVector v(s);
        double sum = 0;
        for (std::size_t i = 0; i + 1 < s; ++i) {
            v[i] = x[k++];
            sum += v[i];
        }
        v[s - 1] = 1.0 - sum;
        for (std::size_t i = 0; i < s; ++i)
            for (std::size_t j = 0; j < s; ++j) p(i, j) = v[j];
    } else {
        for (std::size_t i = 0; i < s; ++i) {
            double row = 0;
            for (std::size_t j = 0; j + 1 < s; ++j) {
                p(i, j) = x[k++];
                row += p(i, j);
            }
            p(i, s - 1) = 1.0 - row;  // pre-consistency by construction
        }
    }
    return make_tableau("search", c, gamma, r_lower, p, std::vector<double>(s * (s - 1) / 2, 0.0),
                        /*strict=*/true);
}

namespace {

// Reduced A-stability sampling used inside objectives; candidates are
// re-checked with the full default sampling before they are accepted.
AStabilitySampling search_sampling() {
    AStabilitySampling s;
    s.angles_deg = {90, 120, 150, 180};
    s.radii = 20;
    s.r_lo = 1e-2;
    s.r_hi = 1e4;
    return s;
}

double astability_penalty(const MethodTableau& t) {
    const AStabilityResult a = is_a_stable(t, search_sampling());
    double pen = std::max(0.0, a.worst_rho - 1.0);
    if (std::isfinite(a.rho_limit))
        pen += std::max(0.0, a.rho_limit - 1.0);
    else
        pen += 1e3;
    return std::isfinite(pen) ? pen : 1e3;
}

double zero_stability_penalty(const MethodTableau& t) {
    double pen = 0;
    ComplexVector eig = eigenvalues(t.P);
    std::size_t unit = 0;
    double best = 1e300;
    for (std::size_t i = 0; i < eig.size(); ++i) {
        const double d = std::abs(eig[i] - Complex(1, 0));
        if (d < best) {
            best = d;
            unit = i;
        }
    }
    for (std::size_t i = 0; i < eig.size(); ++i) {
        if (i == unit) continue;
        pen += std::max(0.0, std::abs(eig[i]) - (1.0 - 1e-6));
    }
    return pen;
}

MethodTableau with_s2(const MethodTableau& base, const std::vector<double>& s2_lower) {
    std::vector<double> r_lower;
    for (std::size_t i = 0; i < base.s; ++i)
        for (std::size_t j = 0; j < i; ++j) r_lower.push_back(base.R(i, j));
    MethodTableau t =
        make_tableau(base.label, base.c, base.gamma, r_lower, base.P, s2_lower, false);
    t.warnings = base.warnings;
    return t;
}

double coarse_area(const MethodTableau& t, const SearchSpec& spec, RegionKind kind) {
    StabilityScan scan;
    scan.alpha_deg = 90;
    scan.nx = spec.coarse_nx;
    scan.ny = spec.coarse_ny;
    scan.x_lo = spec.coarse_x_lo;
    scan.x_hi = spec.coarse_x_hi;
    scan.y_lo = 0;
    scan.y_hi = spec.coarse_y_hi;
    scan.z1_radii = spec.coarse_z1_radii;
    scan.threads = 1;  // parallelism lives at the multistart level
    scan_region(t, scan, kind);
    return scan.area;
}

}  // namespace

double implicit_objective(const RealVector& x, const SearchSpec& spec, double superconv_scale) {
    MethodTableau t;
    try {
        t = decode_implicit(x, spec);
    } catch (const Error&) {
        return 1e6 + norm_l2(x);
    }
    const SearchWeights& w = spec.weights;
    double rho_limit;
    try {
        rho_limit = spectral_radius(lu_solve(t.R, t.Q));
    } catch (const Error&) {
        return 1e6 + norm_l2(x);
    }
    const RealVector d = defect_d(t.s + 1, t);
    double vd = 0;
    for (std::size_t i = 0; i < t.s; ++i) vd += t.v[i] * d[i];
    double obj = w.astab * astability_penalty(t) + w.rho_rinvq * rho_limit +
                 w.coeff_frobenius *
                     (norm_frobenius(t.P) + norm_frobenius(t.Q) + norm_frobenius(t.R)) +
                 w.defect_norm * norm_l2(d) + w.superconv * superconv_scale * std::abs(vd);
    if (spec.parameterization == Parameterization::GeneralZeroStable)
        obj += w.astab * zero_stability_penalty(t);
    return std::isfinite(obj) ? obj : 1e6 + norm_l2(x);
}

double explicit_objective(const RealVector& s2_params, const MethodTableau& base,
                          const SearchSpec& spec, double superconv_scale) {
    MethodTableau t;
    try {
        t = with_s2(base, s2_params);
    } catch (const Error&) {
        return 1e6 + norm_l2(s2_params);
    }
    const SearchWeights& w = spec.weights;
    const RealVector ls = extrap_defect_l(t);
    const RealVector rls = t.R * ls;
    double vrl = 0;
    for (std::size_t i = 0; i < t.s; ++i) vrl += t.v[i] * rls[i];
    double obj = -w.area_se * coarse_area(t, spec, RegionKind::Explicit) -
                 w.area_s90 * coarse_area(t, spec, RegionKind::Alpha) +
                 w.extrap_frobenius * (norm_frobenius(t.S1) + norm_frobenius(t.S2)) +
                 w.extrap_norm * norm_l2(rls) + w.superconv_ex * superconv_scale * std::abs(vrl);
    return std::isfinite(obj) ? obj : 1e6 + norm_l2(s2_params);
}

SearchOutput run_search(const SearchSpec& spec) {
    if (spec.multistart < 1) throw Error("run_search: multistart must be at least 1");
    if (spec.s < 2 || spec.s > 4) throw Error("run_search: stage count must be 2, 3 or 4");
    const std::size_t dim = implicit_param_count(spec);

    // All start points are drawn up front so the multistart set is
    // deterministic regardless of thread scheduling.
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<RealVector> starts(spec.multistart, RealVector(dim, 0.0));
    for (auto& x : starts) {
        if (!spec.init_center.empty()) {
            if (spec.init_center.size() != dim)
                throw Error("run_search: init_center has wrong dimension");
            for (std::size_t k = 0; k < dim; ++k)
                x[k] = spec.init_center[k] +
                       spec.init_spread * (2.0 * unit(rng) - 1.0) *
                           std::max(1.0, std::abs(spec.init_center[k]));
            continue;
        }
        std::size_t k = 0;
        const double c_lo = (spec.s == 4) ? -0.9 : 0.05;
        for (std::size_t i = 0; i + 1 < spec.s; ++i)
            x[k++] = c_lo + (0.95 - c_lo) * unit(rng);
        x[k++] = 0.1 + 1.1 * unit(rng);  // gamma
        for (std::size_t i = 0; i < spec.s * (spec.s - 1) / 2; ++i)
            x[k++] = -1.2 + 2.4 * unit(rng);
        while (k < dim) x[k++] = -2.5 + 5.0 * unit(rng);
    }

    struct Phase1 {
        RealVector x;
        double f = 1e300;
        long evals = 0;
        bool feasible = false;
    };
    std::vector<Phase1> phase1(starts.size());
    parallel_for(starts.size(), spec.threads, [&](std::size_t si) {
        Phase1& out = phase1[si];
        RealVector x = starts[si];
        double scale = 1.0;
        SimplexOptions nm = spec.simplex;
        for (int round = 0; round < spec.penalty_rounds; ++round) {
            const SimplexResult r = nelder_mead(
                [&](const RealVector& p) { return implicit_objective(p, spec, scale); }, x, nm);
            out.evals += r.evals;
            x = r.x;
            out.f = r.f;
            scale *= spec.penalty_growth;
            nm.init_step = 0.02;  // re-center tightly after the first round
        }
        out.x = x;
        // Feasibility gate with the full sampling.
        try {
            const MethodTableau t = decode_implicit(x, spec);
            const RealVector d = defect_d(t.s + 1, t);
            double vd = 0;
            for (std::size_t i = 0; i < t.s; ++i) vd += t.v[i] * d[i];
            out.feasible = std::abs(vd) < 1e-7 && is_a_stable(t).a_stable &&
                           (spec.parameterization != Parameterization::GeneralZeroStable ||
                            zero_stability_penalty(t) == 0.0);
        } catch (const Error&) {
            out.feasible = false;
        }
    });

    SearchOutput out;
    for (const auto& p : phase1) {
        out.diagnostics.total_evals += p.evals;
        out.diagnostics.implicit_feasible += p.feasible ? 1 : 0;
    }

    // Rank feasible implicit candidates and keep the best few.
    std::vector<std::size_t> ranked;
    for (std::size_t i = 0; i < phase1.size(); ++i)
        if (phase1[i].feasible) ranked.push_back(i);
    std::stable_sort(ranked.begin(), ranked.end(),
                     [&](std::size_t a, std::size_t b) { return phase1[a].f < phase1[b].f; });
    if (ranked.size() > static_cast<std::size_t>(spec.max_candidates))
        ranked.resize(spec.max_candidates);

    // Phase two: extrapolation search per candidate.
    struct Phase2 {
        bool ok = false;
        MethodTableau tableau;
        CertificationReport report;
        double implicit_score = 0;
        double explicit_score = 1e300;
        long evals = 0;
    };
    const std::size_t s2_dim = spec.s * (spec.s - 1) / 2;
    std::vector<RealVector> s2_starts;
    for (std::size_t ci = 0; ci < ranked.size(); ++ci)
        for (int k = 0; k < spec.explicit_multistart; ++k) {
            RealVector x(s2_dim);
            for (auto& e : x) e = -1.5 + 3.0 * unit(rng);
            s2_starts.push_back(std::move(x));
        }
    std::vector<Phase2> phase2(ranked.size());
    parallel_for(ranked.size(), spec.threads, [&](std::size_t ci) {
        const MethodTableau base = decode_implicit(phase1[ranked[ci]].x, spec);
        Phase2& best = phase2[ci];
        for (int k = 0; k < spec.explicit_multistart; ++k) {
            RealVector x = s2_starts[ci * spec.explicit_multistart + k];
            double scale = 1.0;
            SimplexOptions nm = spec.explicit_simplex;
            double f = 1e300;
            long evals = 0;
            for (int round = 0; round < spec.penalty_rounds; ++round) {
                const SimplexResult r = nelder_mead(
                    [&](const RealVector& p) { return explicit_objective(p, base, spec, scale); },
                    x, nm);
                evals += r.evals;
                x = r.x;
                f = r.f;
                scale *= spec.penalty_growth;
                nm.init_step = 0.02;
            }
            best.evals += evals;
            if (f < best.explicit_score) {
                try {
                    MethodTableau t = with_s2(base, x);
                    t.label = "search-s" + std::to_string(spec.s) + "-" + std::to_string(ci);
                    const CertificationReport rep = certify(t);
                    const bool pass = rep.a_stable && rep.superconv_implicit < 1e-7 &&
                                      rep.superconv_explicit < 1e-7 && rep.zero_stable;
                    if (pass) {
                        best.ok = true;
                        best.tableau = std::move(t);
                        best.report = rep;
                        best.implicit_score = phase1[ranked[ci]].f;
                        best.explicit_score = f;
                    }
                } catch (const Error&) {
                }
            }
        }
    });

    for (auto& p : phase2) out.diagnostics.total_evals += p.evals;
    std::vector<std::size_t> final_order;
    for (std::size_t i = 0; i < phase2.size(); ++i)
        if (phase2[i].ok) final_order.push_back(i);
    std::stable_sort(final_order.begin(), final_order.end(), [&](std::size_t a, std::size_t b) {
        return phase2[a].explicit_score < phase2[b].explicit_score;
    });
    for (std::size_t idx : final_order)
        out.candidates.push_back({phase2[idx].tableau, phase2[idx].report,
                                  phase2[idx].implicit_score, phase2[idx].explicit_score});
    out.diagnostics.returned = static_cast<int>(out.candidates.size());
    return out;
}

}  // namespace peer
