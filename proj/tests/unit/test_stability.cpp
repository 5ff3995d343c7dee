#include <doctest.h>

#include <cmath>
#include <random>

#include "peer/methods.hpp"
#include "peer/stability.hpp"

using namespace peer;

TEST_CASE("implicit transfer matrix limits") {
    MethodTableau t = builtin("imex-peer2s");
    ComplexMatrix m0 = m_implicit(t, Complex(0, 0));
    for (std::size_t i = 0; i < t.s; ++i)
        for (std::size_t j = 0; j < t.s; ++j)
            CHECK(std::abs(m0(i, j) - Complex(t.P(i, j), 0)) < 1e-14);
    CHECK(spectral_radius(m0) == doctest::Approx(1.0).epsilon(1e-9));

    // z -> infinity limit is R^{-1} Q
    const double rho_inf = spectral_radius(lu_solve(t.R, t.Q));
    CHECK(rho_inf == doctest::Approx(0.128).epsilon(0.005));
    CHECK(rho_implicit(t, Complex(-1e9, 0)) == doctest::Approx(rho_inf).epsilon(1e-4));

    CHECK(rho_implicit(t, Complex(-1, 0)) < 1.0);
}

TEST_CASE("IMEX transfer matrix degeneracies") {
    MethodTableau t = builtin("imex-peer3s");
    const Complex z(-0.4, 0.9);
    // (0, 0) -> P
    ComplexMatrix m00 = m_imex(t, Complex(0, 0), Complex(0, 0));
    for (std::size_t i = 0; i < t.s; ++i)
        for (std::size_t j = 0; j < t.s; ++j)
            CHECK(std::abs(m00(i, j) - Complex(t.P(i, j), 0)) < 1e-14);
    // (0, z) -> implicit matrix
    ComplexMatrix a = m_imex(t, Complex(0, 0), z);
    ComplexMatrix b = m_implicit(t, z);
    CHECK(norm_inf(a - b) < 1e-13);
    // (z, 0) -> explicit companion matrix (I - z Rhat)^{-1} (P + z Qhat)
    ComplexMatrix lhs(t.s, t.s), rhs(t.s, t.s);
    for (std::size_t i = 0; i < t.s; ++i)
        for (std::size_t j = 0; j < t.s; ++j) {
            lhs(i, j) = ((i == j) ? Complex(1, 0) : Complex(0, 0)) - z * t.Rhat(i, j);
            rhs(i, j) = Complex(t.P(i, j), 0) + z * t.Qhat(i, j);
        }
    CHECK(norm_inf(m_imex(t, z, Complex(0, 0)) - lu_solve(lhs, rhs)) < 1e-13);
}

TEST_CASE("A-stability holds for the builtins and fails for a flipped gamma") {
    for (const auto& name : builtin_names()) {
        AStabilityResult r = is_a_stable(builtin(name));
        CHECK(r.a_stable);
        CHECK(r.rho_limit <= 1.0);
    }
    MethodTableau t2 = builtin("imex-peer2s");
    MethodTableau flipped = make_tableau("flipped", t2.c, -t2.gamma, {t2.R(1, 0)}, t2.P,
                                         {t2.S2(1, 0)}, false);
    AStabilityResult r = is_a_stable(flipped);
    CHECK_FALSE(r.a_stable);
    CHECK(r.worst_rho > 1.0 + 1e-6);
}

TEST_CASE("conjugate symmetry of the spectral radius") {
    MethodTableau t = builtin("imex-peer4s");
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 20; ++trial) {
        const Complex z0(-2.0 * std::abs(u(rng)), 2.0 * u(rng));
        const Complex z1(-3.0 * std::abs(u(rng)), 3.0 * u(rng));
        const double a = rho_imex(t, z0, z1);
        const double b = rho_imex(t, std::conj(z0), std::conj(z1));
        CHECK(a == doctest::Approx(b).epsilon(1e-12));
    }
}

TEST_CASE("sector samples stay inside the sector") {
    for (double alpha : {30.0, 60.0, 90.0}) {
        const ComplexVector zs = sector_samples(alpha, 12, 1e-2, 1e4);
        const double tan_a = std::tan(alpha * 3.14159265358979323846 / 180.0);
        for (const Complex& z : zs) {
            if (std::abs(z) == 0) continue;
            CHECK(z.real() <= 0);
            if (alpha < 90.0)
                CHECK(std::abs(z.imag()) <= tan_a * (-z.real()) * (1.0 + 1e-10));
        }
    }
}

TEST_CASE("sector monotonicity on a sampled grid") {
    MethodTableau t = builtin("imex-peer2s");
    auto scan_with = [&](double alpha, RegionKind kind) {
        StabilityScan s;
        s.alpha_deg = alpha;
        s.nx = 40;
        s.ny = 40;
        s.x_lo = -6;
        s.x_hi = 0.5;
        s.y_hi = 3;
        s.z1_radii = 10;
        s.threads = 2;
        scan_region(t, s, kind);
        return s;
    };
    StabilityScan se = scan_with(90, RegionKind::Explicit);
    StabilityScan s90 = scan_with(90, RegionKind::Alpha);
    StabilityScan s45 = scan_with(45, RegionKind::Alpha);
    for (std::size_t k = 0; k < se.member.size(); ++k) {
        if (s90.member[k]) CHECK(s45.member[k]);  // S_90 subset of S_45
        if (s90.member[k]) CHECK(se.member[k]);   // S_alpha subset of S_E
    }
    CHECK(s90.area <= s45.area);
    CHECK(s90.area <= se.area);
}

TEST_CASE("area estimates converge under grid refinement") {
    MethodTableau t = builtin("imex-peer2s");
    auto area_at = [&](std::size_t n) {
        StabilityScan s;
        s.nx = n;
        s.ny = n;
        s.threads = 2;
        scan_region(t, s, RegionKind::Explicit);
        return s.area;
    };
    const double coarse = area_at(100);
    const double fine = area_at(200);
    CHECK(std::abs(fine - coarse) / fine < 0.02);
}

TEST_CASE("explicit region membership predicts bounded explicit iterates") {
    // a point on the negative real axis inside S_E keeps Dahlquist bounded
    MethodTableau t = builtin("imex-peer2s");
    const Complex z0(-0.8, 0.0);
    REQUIRE(rho_imex(t, z0, Complex(0, 0)) < 1.0 - 1e-10);
    ComplexMatrix m = m_imex(t, z0, Complex(0, 0));
    ComplexMatrix power = ComplexMatrix::identity(t.s);
    for (int k = 0; k < 2000; ++k) power = m * power;
    CHECK(norm_inf(power) < 10.0);
}
