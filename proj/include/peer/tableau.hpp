#pragma once

#include <string>
#include <utility>
#include <vector>

#include "peer/matrix.hpp"

namespace peer {

/// Thrown on malformed tableau text or violated structural invariants.
class TableauFormatError : public Error {
public:
    using Error::Error;
};

/// Norm used for the error constants c_im = ||d_{s+1}|| and c_ex = ||R l_s||.
enum class ErrorNorm { MaxAbs, Euclid };

/// Coefficient set of one s-stage IMEX-Peer method.
///
/// The free data are the nodes c (distinct, c_s = 1), the lower triangular
/// R with constant diagonal gamma, the two-step matrix P, and the strictly
/// lower triangular extrapolation matrix S2. Everything else is derived:
/// Q carries stage order s, S1 makes the extrapolation order s, and the
/// explicit companion uses Qhat = Q + R*S1 and Rhat = R*S2.
struct MethodTableau {
    std::size_t s = 0;
    std::vector<double> c;
    RealMatrix P, Q, R;
    double gamma = 0;
    RealMatrix S1, S2;
    RealMatrix Qhat, Rhat;
    std::vector<double> v;  // left eigenvector of P, v^T e = 1
    std::string label;
    std::vector<std::string> warnings;
};

/// Numerical certificate for one tableau. Flags summarize the numbers next
/// to them; nothing is recomputed by consumers.
struct CertificationReport {
    std::vector<double> stage_order_defects;  // ||d_j||_inf for j = 1..s+1
    double superconv_implicit = 0;            // |v^T d_{s+1}|
    double superconv_explicit = 0;            // |v^T R l_s|
    double pre_consistency_defect = 0;        // ||P e - e||_inf
    bool pre_consistent = false;
    bool zero_stable = false;
    bool optimally_zero_stable = false;
    ComplexVector p_eigenvalues;
    bool a_stable = false;
    Complex worst_z{};
    double worst_rho = 0;
    double rho_r_inv_q = 0;
    double c_im = 0;
    double c_ex = 0;
    ErrorNorm error_norm = ErrorNorm::Euclid;
    double p_power_defect = 0;  // ||P^{s-1} d_{s+1}||_inf
    bool p_power_zero = false;
    std::vector<std::string> warnings;

    /// True when stage order, super-convergence, pre-consistency,
    /// zero-stability and A-stability all hold at library tolerances.
    bool passed() const;
};

// Certification tolerances (absorb last-digit rounding of printed tables).
inline constexpr double kStageOrderTol = 1e-10;
inline constexpr double kSuperconvTol = 1e-9;
inline constexpr double kPreConsistencyTol = 1e-12;
inline constexpr double kZeroStabilityTol = 1e-9;
inline constexpr double kNullSpaceTol = 1e-8;

/// Vandermonde pair V0[i][j] = c_i^{j-1}, V1[i][j] = (c_i - 1)^{j-1}
/// with the convention 0^0 = 1.
std::pair<RealMatrix, RealMatrix> vandermonde_pair(const std::vector<double>& c);

/// Q = (C V0 - P (C - I) V1 - R V0 D) (V1 D)^{-1}; the resulting method has
/// stage order s for any admissible P, R, c.
RealMatrix compute_q(const RealMatrix& p, const RealMatrix& r, const std::vector<double>& c);

/// Defect vector d_j = (c^j - P(c-e)^j - j Q (c-e)^{j-1} - j R c^{j-1}) / j!.
RealVector defect_d(std::size_t j, const MethodTableau& t);

/// S1 = (I - S2) V0 V1^{-1}: the unique extrapolation of order s for a given
/// strictly lower triangular S2.
RealMatrix compute_s1(const RealMatrix& s2, const std::vector<double>& c);

/// Extrapolation defect l_s = ((I - S2) c^s - S1 (c-e)^s) / s!.
RealVector extrap_defect_l(const MethodTableau& t);

/// Left eigenvector of P for eigenvalue one, normalized so v^T e = 1.
/// Fails when that eigenvalue is not simple at the null-space tolerance.
RealVector left_eigvec(const RealMatrix& p);

/// Assemble and derive a tableau from its free coefficients. `r_lower` and
/// `s2_lower` hold the strict lower triangles row by row. With `strict`
/// set, structural violations (c_s != 1, duplicate nodes, gamma <= 0) are
/// errors; otherwise gamma <= 0 and node-range issues only produce warnings.
MethodTableau make_tableau(const std::string& label, const std::vector<double>& c, double gamma,
                           const std::vector<double>& r_lower, const RealMatrix& p,
                           const std::vector<double>& s2_lower, bool strict = true);

/// Full certification; A-stability is assessed by the sampling in the
/// stability module. Failures are reported as data, never thrown.
CertificationReport certify(const MethodTableau& t);
CertificationReport certify(const MethodTableau& t, ErrorNorm norm);

/// Norm convention for the error constants, resolved once by matching the
/// two-stage method's constants against their published values.
ErrorNorm resolved_error_norm();

const char* error_norm_name(ErrorNorm n);

/// Human-readable certification summary (one line per check).
std::string report_summary(const MethodTableau& t, const CertificationReport& r);

}  // namespace peer
