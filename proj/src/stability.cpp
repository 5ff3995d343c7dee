#include "peer/stability.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "peer/parallel.hpp"

namespace peer {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kMemberTol = 1e-10;  // member iff rho < 1 - kMemberTol

ComplexVector log_radii(double r_lo, double r_hi, std::size_t n) {
    ComplexVector out;
    out.reserve(n);
    if (n == 1) {
        out.push_back(r_lo);
        return out;
    }
    const double step = std::log(r_hi / r_lo) / static_cast<double>(n - 1);
    for (std::size_t k = 0; k < n; ++k) out.push_back(r_lo * std::exp(step * k));
    return out;
}

}  // namespace

ComplexMatrix m_implicit(const MethodTableau& t, Complex z) {
    const std::size_t s = t.s;
    ComplexMatrix lhs(s, s), rhs(s, s);
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < s; ++j) {
            lhs(i, j) = ((i == j) ? Complex(1, 0) : Complex(0, 0)) - z * t.R(i, j);
            rhs(i, j) = Complex(t.P(i, j), 0) + z * t.Q(i, j);
        }
    return lu_solve(lhs, rhs);
}

ComplexMatrix m_imex(const MethodTableau& t, Complex z0, Complex z1) {
    const std::size_t s = t.s;
    ComplexMatrix lhs(s, s), rhs(s, s);
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < s; ++j) {
            lhs(i, j) = ((i == j) ? Complex(1, 0) : Complex(0, 0)) - z0 * t.Rhat(i, j) -
                        z1 * t.R(i, j);
            rhs(i, j) = Complex(t.P(i, j), 0) + z0 * t.Qhat(i, j) + z1 * t.Q(i, j);
        }
    return lu_solve(lhs, rhs);
}

double rho_imex(const MethodTableau& t, Complex z0, Complex z1) {
    try {
        return spectral_radius(m_imex(t, z0, z1));
    } catch (const SingularMatrixError&) {
        return std::numeric_limits<double>::infinity();
    }
}

double rho_implicit(const MethodTableau& t, Complex z) {
    try {
        return spectral_radius(m_implicit(t, z));
    } catch (const SingularMatrixError&) {
        return std::numeric_limits<double>::infinity();
    }
}

AStabilityResult is_a_stable(const MethodTableau& t, const AStabilitySampling& sampling) {
    AStabilityResult res;
    try {
        res.rho_limit = spectral_radius(lu_solve(t.R, t.Q));
    } catch (const SingularMatrixError&) {
        res.rho_limit = std::numeric_limits<double>::infinity();
    }
    res.worst_rho = 0;
    const ComplexVector radii = log_radii(sampling.r_lo, sampling.r_hi, sampling.radii);
    for (double ang : sampling.angles_deg) {
        const double phi = ang * kPi / 180.0;
        const Complex dir(std::cos(phi), std::sin(phi));
        for (const Complex& r : radii) {
            const Complex z = r.real() * dir;
            const double rho = rho_implicit(t, z);
            if (rho > res.worst_rho) {
                res.worst_rho = rho;
                res.worst_z = z;
            }
        }
    }
    res.a_stable = res.worst_rho <= 1.0 + sampling.tol && res.rho_limit <= 1.0 + sampling.tol;
    return res;
}

ComplexVector sector_samples(double alpha_deg, std::size_t radii, double r_lo, double r_hi) {
    const double alpha = alpha_deg * kPi / 180.0;
    std::vector<double> elevations = {0.0};
    for (int k = 1; k <= 4; ++k) {
        const double phi = alpha * k / 4.0;
        elevations.push_back(phi);
        elevations.push_back(-phi);
    }
    ComplexVector out;
    out.push_back(Complex(0, 0));
    const ComplexVector rs = log_radii(r_lo, r_hi, radii);
    for (double phi : elevations) {
        // e^{i(pi - phi)} written as (-cos phi, sin phi) so the boundary ray
        // at phi = pi/2 stays in the closed left half plane.
        const Complex dir(-std::cos(phi), std::sin(phi));
        for (const Complex& r : rs) out.push_back(r.real() * dir);
    }
    return out;
}

namespace {

// Membership predicate for one z0; `z1s` is empty for the explicit region.
bool region_member(const MethodTableau& t, Complex z0, const ComplexVector& z1s,
                   double rho_limit) {
    if (z1s.empty()) return rho_imex(t, z0, Complex(0, 0)) < 1.0 - kMemberTol;
    if (!(rho_limit < 1.0 - kMemberTol)) return false;
    for (const Complex& z1 : z1s)
        if (!(rho_imex(t, z0, z1) < 1.0 - kMemberTol)) return false;
    return true;
}

}  // namespace

void scan_region(const MethodTableau& t, StabilityScan& scan, RegionKind kind) {
    ComplexVector z1s;
    double rho_limit = 0;
    if (kind == RegionKind::Alpha) {
        z1s = sector_samples(scan.alpha_deg, scan.z1_radii, scan.z1_r_lo, scan.z1_r_hi);
        try {
            rho_limit = spectral_radius(lu_solve(t.R, t.Q));
        } catch (const SingularMatrixError&) {
            rho_limit = std::numeric_limits<double>::infinity();
        }
    }
    const double dx = (scan.x_hi - scan.x_lo) / static_cast<double>(scan.nx);
    const double dy = (scan.y_hi - scan.y_lo) / static_cast<double>(scan.ny);
    scan.member.assign(scan.nx * scan.ny, 0);
    parallel_for(scan.ny, scan.threads, [&](std::size_t iy) {
        const double y = scan.y_lo + (static_cast<double>(iy) + 0.5) * dy;
        for (std::size_t ix = 0; ix < scan.nx; ++ix) {
            const double x = scan.x_lo + (static_cast<double>(ix) + 0.5) * dx;
            scan.member[iy * scan.nx + ix] =
                region_member(t, Complex(x, y), z1s, rho_limit) ? 1 : 0;
        }
    });
    std::size_t count = 0;
    for (auto m : scan.member) count += m;
    // Conjugate symmetry: the lower half plane mirrors the upper half.
    scan.area = 2.0 * static_cast<double>(count) * dx * dy;

    // Axis extents on a finer one-dimensional sampling.
    const double axis_step = dx / 4.0;
    scan.x_max = 0;
    {
        std::size_t n = static_cast<std::size_t>(std::floor(-scan.x_lo / axis_step));
        std::vector<std::uint8_t> hit(n, 0);
        parallel_for(n, scan.threads, [&](std::size_t k) {
            const double x = -(static_cast<double>(k) + 0.5) * axis_step;
            hit[k] = region_member(t, Complex(x, 0.0), z1s, rho_limit) ? 1 : 0;
        });
        for (std::size_t k = 0; k < n; ++k)
            if (hit[k]) scan.x_max = -(static_cast<double>(k) + 0.5) * axis_step;
    }
    // Imaginary extent measured a quarter cell inside the left half plane:
    // some region boundaries run tangent along the axis itself (the strict
    // membership test is degenerate there), so the extent is sampled on the
    // nearest resolved vertical line instead.
    scan.y_max = 0;
    {
        const double x_off = -0.25 * dx;
        const double ay_step = dy / 4.0;
        std::size_t n = static_cast<std::size_t>(std::floor((scan.y_hi - scan.y_lo) / ay_step));
        std::vector<std::uint8_t> hit(n, 0);
        parallel_for(n, scan.threads, [&](std::size_t k) {
            const double y = scan.y_lo + (static_cast<double>(k) + 0.5) * ay_step;
            hit[k] = region_member(t, Complex(x_off, y), z1s, rho_limit) ? 1 : 0;
        });
        for (std::size_t k = 0; k < n; ++k)
            if (hit[k]) scan.y_max = scan.y_lo + (static_cast<double>(k) + 0.5) * ay_step;
    }
}

void write_scan_csv(std::ostream& os, const StabilityScan& scan) {
    const double dx = (scan.x_hi - scan.x_lo) / static_cast<double>(scan.nx);
    const double dy = (scan.y_hi - scan.y_lo) / static_cast<double>(scan.ny);
    os << "x,y,member\n";
    char buf[80];
    for (std::size_t iy = 0; iy < scan.ny; ++iy)
        for (std::size_t ix = 0; ix < scan.nx; ++ix) {
            const double x = scan.x_lo + (static_cast<double>(ix) + 0.5) * dx;
            const double y = scan.y_lo + (static_cast<double>(iy) + 0.5) * dy;
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d\n", x, y,
                          static_cast<int>(scan.member[iy * scan.nx + ix]));
            os << buf;
        }
}

}  // namespace peer
