#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "peer/tableau.hpp"

namespace peer {

/// Transfer matrix of the implicit method on y' = lambda y:
/// M_im(z) = (I - z R)^{-1} (P + z Q).
ComplexMatrix m_implicit(const MethodTableau& t, Complex z);

/// Transfer matrix of the IMEX pair on y' = lambda_0 y + lambda_1 y:
/// M(z0, z1) = (I - z0 R S2 - z1 R)^{-1} (P + z0 Q + z0 R S1 + z1 Q).
ComplexMatrix m_imex(const MethodTableau& t, Complex z0, Complex z1);

/// Spectral radius of M(z0, z1); +inf when the system matrix is singular.
double rho_imex(const MethodTableau& t, Complex z0, Complex z1);
double rho_implicit(const MethodTableau& t, Complex z);

/// Sampling plan for the A-stability check: rays through the left half
/// plane (angles from the positive real axis, upper half only; conjugate
/// symmetry covers the rest) with log-spaced radii, plus the z -> inf
/// limit rho(R^{-1} Q).
struct AStabilitySampling {
    std::vector<double> angles_deg = {90, 105, 120, 135, 150, 165, 180};
    double r_lo = 1e-3;
    double r_hi = 1e6;
    std::size_t radii = 60;
    double tol = 1e-8;
};

struct AStabilityResult {
    bool a_stable = false;
    Complex worst_z{};
    double worst_rho = 0;
    double rho_limit = 0;  // rho(R^{-1} Q)
};

AStabilityResult is_a_stable(const MethodTableau& t, const AStabilitySampling& sampling = {});

enum class RegionKind { Alpha, Explicit };

/// Grid scan of a stability region over a rectangle in the upper half
/// plane (membership is mirrored across the real axis for the area).
/// Membership uses the strict test rho < 1 - 1e-10. For the Alpha kind a
/// grid point belongs to the region only if every sampled z1 in the sector
/// |Im z1| <= -tan(alpha) Re z1 passes, including z1 = 0 and the analytic
/// z1 -> inf limit.
struct StabilityScan {
    double alpha_deg = 90;
    double x_lo = -12, x_hi = 0.5;
    double y_lo = 0, y_hi = 5;
    std::size_t nx = 400, ny = 400;
    // z1 sector sampling: rays at {0, ±alpha/4, ±alpha/2, ±3alpha/4, ±alpha}
    // off the negative real axis, log-spaced radii per ray.
    std::size_t z1_radii = 24;
    double z1_r_lo = 1e-3;
    double z1_r_hi = 1e6;
    unsigned threads = 0;  // 0 = hardware concurrency

    // Filled by scan_region:
    std::vector<std::uint8_t> member;  // ny rows of nx cells, row-major
    double area = 0;
    double x_max = 0;  // most negative real-axis point inside the region
    double y_max = 0;  // largest imaginary extent over the region
};

void scan_region(const MethodTableau& t, StabilityScan& scan, RegionKind kind);

/// Membership grid as CSV rows "x,y,member".
void write_scan_csv(std::ostream& os, const StabilityScan& scan);

/// Sector sample points for a given alpha (exposed for tests).
ComplexVector sector_samples(double alpha_deg, std::size_t radii, double r_lo, double r_hi);

}  // namespace peer
