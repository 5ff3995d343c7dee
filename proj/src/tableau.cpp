#include "peer/tableau.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "builtin_tables.hpp"
#include "peer/stability.hpp"

namespace peer {

namespace {

// Component-wise integer power with 0^0 = 1 (needed at c_s = 1 in V1 and
// in (c - e)^0).
RealVector pow_vec(const std::vector<double>& x, std::size_t j) {
    RealVector r(x.size(), 1.0);
    for (std::size_t k = 0; k < j; ++k)
        for (std::size_t i = 0; i < x.size(); ++i) r[i] *= x[i];
    return r;
}

RealVector shifted(const std::vector<double>& c) {
    RealVector r = c;
    for (auto& x : r) x -= 1.0;
    return r;
}

double factorial(std::size_t j) {
    double f = 1;
    for (std::size_t k = 2; k <= j; ++k) f *= static_cast<double>(k);
    return f;
}

RealMatrix unpack_strict_lower(std::size_t s, const std::vector<double>& packed, double diag,
                               const char* what) {
    const std::size_t expect = s * (s - 1) / 2;
    if (packed.size() != expect)
        throw TableauFormatError(std::string(what) + ": expected " + std::to_string(expect) +
                                 " strictly lower entries, got " + std::to_string(packed.size()));
    RealMatrix m(s, s);
    std::size_t k = 0;
    for (std::size_t i = 0; i < s; ++i) {
        for (std::size_t j = 0; j < i; ++j) m(i, j) = packed[k++];
        m(i, i) = diag;
    }
    return m;
}

double vec_norm(const RealVector& x, ErrorNorm n) {
    return n == ErrorNorm::MaxAbs ? norm_inf(x) : norm_l2(x);
}

}  // namespace

std::pair<RealMatrix, RealMatrix> vandermonde_pair(const std::vector<double>& c) {
    const std::size_t s = c.size();
    RealMatrix v0(s, s), v1(s, s);
    for (std::size_t i = 0; i < s; ++i) {
        double p0 = 1.0, p1 = 1.0;
        for (std::size_t j = 0; j < s; ++j) {
            v0(i, j) = p0;
            v1(i, j) = p1;
            p0 *= c[i];
            p1 *= c[i] - 1.0;
        }
    }
    return {v0, v1};
}

RealMatrix compute_q(const RealMatrix& p, const RealMatrix& r, const std::vector<double>& c) {
    const std::size_t s = c.size();
    auto [v0, v1] = vandermonde_pair(c);
    RealMatrix cv0(s, s), pcv1(s, s), rv0d(s, s), v1d(s, s);
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < s; ++j) {
            cv0(i, j) = c[i] * v0(i, j);
            v1d(i, j) = v1(i, j) * static_cast<double>(j + 1);
        }
    // P (C - I) V1
    RealMatrix cmi_v1(s, s);
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < s; ++j) cmi_v1(i, j) = (c[i] - 1.0) * v1(i, j);
    pcv1 = p * cmi_v1;
    // R V0 D
    RealMatrix v0d(s, s);
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < s; ++j) v0d(i, j) = v0(i, j) * static_cast<double>(j + 1);
    rv0d = r * v0d;
    const RealMatrix num = cv0 - pcv1 - rv0d;
    // Q (V1 D) = num  =>  (V1 D)^T Q^T = num^T
    return lu_solve(v1d.transposed(), num.transposed()).transposed();
}

RealVector defect_d(std::size_t j, const MethodTableau& t) {
    const std::size_t s = t.s;
    const RealVector cj = pow_vec(t.c, j);
    const RealVector cm1j = pow_vec(shifted(t.c), j);
    const RealVector cm1jm1 = pow_vec(shifted(t.c), j - 1);
    const RealVector cjm1 = pow_vec(t.c, j - 1);
    const RealVector pa = t.P * cm1j;
    const RealVector qa = t.Q * cm1jm1;
    const RealVector ra = t.R * cjm1;
    RealVector d(s);
    const double jd = static_cast<double>(j);
    const double inv_fact = 1.0 / factorial(j);
    for (std::size_t i = 0; i < s; ++i) d[i] = inv_fact * (cj[i] - pa[i] - jd * (qa[i] + ra[i]));
    return d;
}

RealMatrix compute_s1(const RealMatrix& s2, const std::vector<double>& c) {
    const std::size_t s = c.size();
    auto [v0, v1] = vandermonde_pair(c);
    const RealMatrix ims2 = RealMatrix::identity(s) - s2;
    // S1 = (I - S2) V0 V1^{-1}  =>  S1 V1 = (I - S2) V0
    const RealMatrix rhs = ims2 * v0;
    return lu_solve(v1.transposed(), rhs.transposed()).transposed();
}

RealVector extrap_defect_l(const MethodTableau& t) {
    const std::size_t s = t.s;
    const RealVector cs = pow_vec(t.c, s);
    const RealVector cm1s = pow_vec(shifted(t.c), s);
    const RealVector a = t.S2 * cs;
    const RealVector b = t.S1 * cm1s;
    RealVector l(s);
    const double inv_fact = 1.0 / factorial(s);
    for (std::size_t i = 0; i < s; ++i) l[i] = inv_fact * (cs[i] - a[i] - b[i]);
    return l;
}

RealVector left_eigvec(const RealMatrix& p) {
    const std::size_t s = p.rows();
    const RealMatrix a = RealMatrix::identity(s) - p.transposed();
    RealVector v = null_vector(a, kNullSpaceTol);
    double sum = 0;
    for (double x : v) sum += x;
    if (std::abs(sum) < 1e-12)
        throw Error("left_eigvec: null vector is orthogonal to e, cannot normalize v^T e = 1");
    for (auto& x : v) x /= sum;
    return v;
}

MethodTableau make_tableau(const std::string& label, const std::vector<double>& c, double gamma,
                           const std::vector<double>& r_lower, const RealMatrix& p,
                           const std::vector<double>& s2_lower, bool strict) {
    MethodTableau t;
    t.label = label;
    t.s = c.size();
    t.c = c;
    t.gamma = gamma;
    if (t.s < 2 || t.s > 4)
        throw TableauFormatError("stage count must be between 2 and 4, got " +
                                 std::to_string(t.s));
    if (p.rows() != t.s || p.cols() != t.s)
        throw TableauFormatError("P must be " + std::to_string(t.s) + "x" + std::to_string(t.s));
    for (std::size_t i = 0; i < t.s; ++i)
        for (std::size_t j = i + 1; j < t.s; ++j)
            if (std::abs(c[i] - c[j]) <= 1e-12)
                throw TableauFormatError("nodes must be pairwise distinct, c" +
                                         std::to_string(i + 1) + " == c" + std::to_string(j + 1));
    if (std::abs(c.back() - 1.0) > 1e-12)
        throw TableauFormatError("last node must equal 1, got " + std::to_string(c.back()));
    if (gamma <= 0) {
        if (strict) throw TableauFormatError("gamma must be positive");
        t.warnings.push_back("gamma is not positive; the method is not diagonally implicit");
    }
    // Node-range advice from the published construction; user tableaus may deviate.
    const double lo = (t.s == 4) ? -1.0 : 0.0;
    for (double ci : c)
        if (ci <= lo || ci > 1.0) {
            t.warnings.push_back("node " + std::to_string(ci) + " outside (" +
                                 std::to_string(lo) + ", 1]");
            break;
        }
    t.P = p;
    // Printed coefficient tables round to ~1e-15 and can leave P e != e by a
    // few ulps; a persistent pre-consistency defect of that size is enough to
    // floor high-order convergence ladders. Snap the last column when the
    // defect is at printing-roundoff scale (larger defects are left for
    // certification to flag).
    for (std::size_t i = 0; i < t.s; ++i) {
        double row = 0;
        for (std::size_t j = 0; j < t.s; ++j) row += t.P(i, j);
        if (row != 1.0 && std::abs(row - 1.0) <= 1e-13) t.P(i, t.s - 1) += 1.0 - row;
    }
    t.R = unpack_strict_lower(t.s, r_lower, gamma, "R");
    t.S2 = unpack_strict_lower(t.s, s2_lower, 0.0, "S2");
    t.Q = compute_q(t.P, t.R, t.c);
    t.S1 = compute_s1(t.S2, t.c);
    t.Qhat = t.Q + t.R * t.S1;
    t.Rhat = t.R * t.S2;
    t.v = left_eigvec(t.P);
    return t;
}

CertificationReport certify(const MethodTableau& t) { return certify(t, resolved_error_norm()); }

CertificationReport certify(const MethodTableau& t, ErrorNorm norm) {
    CertificationReport r;
    r.error_norm = norm;
    r.warnings = t.warnings;
    const std::size_t s = t.s;

    r.stage_order_defects.resize(s + 1);
    RealVector d_top;
    for (std::size_t j = 1; j <= s + 1; ++j) {
        RealVector d = defect_d(j, t);
        r.stage_order_defects[j - 1] = norm_inf(d);
        if (j == s + 1) d_top = std::move(d);
    }

    double vd = 0;
    for (std::size_t i = 0; i < s; ++i) vd += t.v[i] * d_top[i];
    r.superconv_implicit = std::abs(vd);

    const RealVector ls = extrap_defect_l(t);
    const RealVector rls = t.R * ls;
    double vrl = 0;
    for (std::size_t i = 0; i < s; ++i) vrl += t.v[i] * rls[i];
    r.superconv_explicit = std::abs(vrl);

    RealVector pe(s, 0.0);
    for (std::size_t i = 0; i < s; ++i) {
        double acc = 0;
        for (std::size_t j = 0; j < s; ++j) acc += t.P(i, j);
        pe[i] = acc - 1.0;
    }
    r.pre_consistency_defect = norm_inf(pe);
    r.pre_consistent = r.pre_consistency_defect <= kPreConsistencyTol;

    r.p_eigenvalues = eigenvalues(t.P);
    std::size_t unit = r.p_eigenvalues.size();
    double best = 1e300;
    for (std::size_t i = 0; i < r.p_eigenvalues.size(); ++i) {
        const double dist = std::abs(r.p_eigenvalues[i] - Complex(1, 0));
        if (dist < best) {
            best = dist;
            unit = i;
        }
    }
    bool others_inside = true, others_zero = true;
    for (std::size_t i = 0; i < r.p_eigenvalues.size(); ++i) {
        if (i == unit) continue;
        const double m = std::abs(r.p_eigenvalues[i]);
        if (m > 1.0 - kZeroStabilityTol) others_inside = false;
        if (m > kZeroStabilityTol) others_zero = false;
    }
    r.zero_stable = best <= kZeroStabilityTol && others_inside;
    r.optimally_zero_stable = r.zero_stable && others_zero;

    try {
        r.rho_r_inv_q = spectral_radius(lu_solve(t.R, t.Q));
    } catch (const SingularMatrixError&) {
        r.rho_r_inv_q = std::numeric_limits<double>::infinity();
    }

    const AStabilityResult a = is_a_stable(t);
    r.a_stable = a.a_stable;
    r.worst_z = a.worst_z;
    r.worst_rho = a.worst_rho;

    r.c_im = vec_norm(d_top, norm);
    r.c_ex = vec_norm(rls, norm);

    // P^{s-1} d_{s+1} = 0 is the alternative super-convergence criterion;
    // it holds for the optimally zero-stable methods but not in general.
    RealVector pd = d_top;
    for (std::size_t k = 0; k + 1 < s; ++k) pd = t.P * pd;
    r.p_power_defect = norm_inf(pd);
    r.p_power_zero = r.p_power_defect <= kSuperconvTol;

    return r;
}

bool CertificationReport::passed() const {
    if (!pre_consistent || !zero_stable || !a_stable) return false;
    for (std::size_t j = 0; j + 1 < stage_order_defects.size(); ++j)
        if (!(stage_order_defects[j] < kStageOrderTol)) return false;
    return superconv_implicit < kSuperconvTol && superconv_explicit < kSuperconvTol;
}

ErrorNorm resolved_error_norm() {
    // The published table leaves the norm in c_im, c_ex unqualified. Both
    // candidates are evaluated on the two-stage method and the one matching
    // the printed constants (0.237, 0.323) wins.
    static const ErrorNorm resolved = [] {
        const auto& raw = detail::kImexPeer2s;
        const MethodTableau t = make_tableau(
            raw.label, {raw.c[0], raw.c[1]}, raw.gamma, {raw.r_lower[0]},
            [&] {
                RealMatrix p(2, 2);
                for (std::size_t i = 0; i < 2; ++i)
                    for (std::size_t j = 0; j < 2; ++j) p(i, j) = raw.p[i * 2 + j];
                return p;
            }(),
            {raw.s2_lower[0]});
        const RealVector d3 = defect_d(3, t);
        const RealVector rl2 = t.R * extrap_defect_l(t);
        auto mismatch = [&](ErrorNorm n) {
            return std::abs(vec_norm(d3, n) - 0.237) / 0.237 +
                   std::abs(vec_norm(rl2, n) - 0.323) / 0.323;
        };
        return mismatch(ErrorNorm::Euclid) <= mismatch(ErrorNorm::MaxAbs) ? ErrorNorm::Euclid
                                                                          : ErrorNorm::MaxAbs;
    }();
    return resolved;
}

const char* error_norm_name(ErrorNorm n) { return n == ErrorNorm::MaxAbs ? "max" : "l2"; }

std::string report_summary(const MethodTableau& t, const CertificationReport& r) {
    std::ostringstream os;
    char buf[64];
    auto num = [&](double x) {
        std::snprintf(buf, sizeof buf, "%.6g", x);
        return std::string(buf);
    };
    auto flag = [](bool ok) { return ok ? "pass" : "FAIL"; };
    os << "method " << t.label << " (s=" << t.s << ")\n";
    double worst_stage = 0;
    for (std::size_t j = 0; j + 1 < r.stage_order_defects.size(); ++j)
        worst_stage = std::max(worst_stage, r.stage_order_defects[j]);
    os << "  stage order " << t.s << "        max ||d_j||_inf = " << num(worst_stage) << "  ["
       << flag(worst_stage < kStageOrderTol) << "]\n";
    os << "  superconvergence imp  |v'd_{s+1}| = " << num(r.superconv_implicit) << "  ["
       << flag(r.superconv_implicit < kSuperconvTol) << "]\n";
    os << "  superconvergence exp  |v'R l_s|   = " << num(r.superconv_explicit) << "  ["
       << flag(r.superconv_explicit < kSuperconvTol) << "]\n";
    os << "  pre-consistency       ||Pe-e||    = " << num(r.pre_consistency_defect) << "  ["
       << flag(r.pre_consistent) << "]\n";
    os << "  zero-stable           " << flag(r.zero_stable)
       << (r.optimally_zero_stable ? " (optimal)" : "") << "\n";
    os << "  A-stable              " << flag(r.a_stable) << "  worst rho = " << num(r.worst_rho)
       << " at z = " << num(r.worst_z.real()) << (r.worst_z.imag() < 0 ? "-" : "+")
       << num(std::abs(r.worst_z.imag())) << "i\n";
    os << "  rho(R^-1 Q)           " << num(r.rho_r_inv_q) << "\n";
    os << "  error constants       c_im = " << num(r.c_im) << ", c_ex = " << num(r.c_ex) << "  ("
       << error_norm_name(r.error_norm) << " norm)\n";
    os << "  P^{s-1} d_{s+1}       " << num(r.p_power_defect)
       << (r.p_power_zero ? "  (vanishes)" : "") << "\n";
    for (const auto& w : r.warnings) os << "  warning: " << w << "\n";
    os << "  overall               " << (r.passed() ? "PASS" : "FAIL") << "\n";
    return os.str();
}

}  // namespace peer
