#include <cmath>
#include <random>

#include "doctest.h"
#include "maxgas/constants.hpp"
#include "maxgas/kinetic.hpp"
#include "maxgas/quadrature.hpp"
#include "maxgas/thermo.hpp"
#include "maxgas/transport.hpp"
#include "test_helpers.hpp"

using namespace maxgas;

TEST_CASE("special function values against the oracle") {
    CHECK(bessel_like_In(0, 0.0) ==
          doctest::Approx(testutil::golden("I0_zero")).epsilon(1e-12));
    CHECK(bessel_like_In(1, 0.0) ==
          doctest::Approx(testutil::golden("I1_zero")).epsilon(1e-12));
    CHECK(bessel_like_In(3, 0.0) ==
          doctest::Approx(testutil::golden("I3_zero")).epsilon(1e-12));
    CHECK(collision_F(0.0) == doctest::Approx(testutil::golden("F_zero")).epsilon(1e-10));
    CHECK_THROWS_AS(bessel_like_In(4, 0.0), std::domain_error);
    CHECK_THROWS_AS(bessel_like_In(-1, 0.0), std::domain_error);
}

TEST_CASE("collision function against direct-definition samples") {
    const auto& samples = testutil::goldens().at("F_samples");
    for (auto it = samples.begin(); it != samples.end(); ++it) {
        const double kappa = std::stod(it.key());
        const double tol = kappa >= 0.5 ? 1e-9 : 1e-10;
        CHECK(collision_F(kappa) == doctest::Approx(it.value().get<double>()).epsilon(tol));
    }
}

TEST_CASE("collision function shape") {
    double prev = collision_F(0.0);
    double peak = prev;
    double peak_kappa = 0.0;
    bool past_peak = false;
    for (double kappa = 0.05; kappa <= 12.0; kappa += 0.05) {
        const double f = collision_F(kappa);
        CHECK(f > 0.0);
        CHECK(f <= 0.25 * (1.0 + kappa * kappa) * (1.0 + 1e-12));
        if (past_peak) {
            CHECK(f <= prev * (1.0 + 1e-12));
        } else if (f < prev) {
            past_peak = true;
            peak = prev;
            peak_kappa = kappa - 0.05;
        }
        prev = f;
    }
    CHECK(past_peak);
    CHECK(peak >= 0.25);
    CHECK(peak_kappa < 1.0);
}

TEST_CASE("moment table against the frozen oracle") {
    const KineticConstants kc = nondimensional_constants();
    const TransportTable tab = lambda_moments(kc);
    CHECK(tab.mu1 == doctest::Approx(testutil::golden("mu1")).epsilon(1e-10));
    CHECK(tab.mu2 == doctest::Approx(testutil::golden("mu2")).epsilon(1e-10));
    CHECK(tab.mu3 == doctest::Approx(testutil::golden("mu3")).epsilon(1e-10));
    CHECK(tab.lambda_shear ==
          doctest::Approx(testutil::golden("lambda_shear")).epsilon(1e-10));
    CHECK(tab.lambda_fourier ==
          doctest::Approx(testutil::golden("lambda_fourier")).epsilon(1e-10));
    CHECK(tab.lambda_dufour ==
          doctest::Approx(testutil::golden("lambda_dufour")).epsilon(1e-10));

    CHECK(tab.mu1 > 0.0);
    CHECK(tab.mu2 > 0.0);
    CHECK(tab.mu3 > 0.0);
    CHECK(tab.lambda1 > 0.0);
    CHECK(tab.lambda2 > 0.0);
    CHECK(tab.lambda3 > 0.0);
    CHECK(tab.lambda_shear > 0.0);
    CHECK(tab.lambda_fourier > 0.0);
    CHECK(tab.lambda_dufour > 0.0);
}

TEST_CASE("moment table determinism and cross-section scaling") {
    const KineticConstants kc1 = nondimensional_constants();
    const TransportTable a = lambda_moments(kc1);
    const TransportTable b = lambda_moments(kc1);
    CHECK(a.lambda2 == b.lambda2);  // bit-equal: pure function of constants

    const KineticConstants kc2 = nondimensional_constants(2.0);
    const TransportTable c = lambda_moments(kc2);
    CHECK(2.0 * c.lambda1 == a.lambda1);  // lambda_n proportional to 1/sigma
    CHECK(2.0 * c.lambda2 == a.lambda2);
    CHECK(2.0 * c.lambda3 == a.lambda3);
    CHECK(c.mu1 == a.mu1);  // mu_n carry no units at all
}

TEST_CASE("moment truncation is converged at kappa_max 12") {
    const KineticConstants kc = nondimensional_constants();
    const TransportTable t12 = lambda_moments(kc, 1e-12, 12.0);
    const TransportTable t16 = lambda_moments(kc, 1e-12, 16.0);
    CHECK(std::fabs(t12.mu1 - t16.mu1) < 1e-10);
    CHECK(std::fabs(t12.mu2 - t16.mu2) < 1e-10);
    CHECK(std::fabs(t12.mu3 - t16.mu3) < 1e-10);
}

TEST_CASE("unreachable tolerance raises the quadrature error") {
    const KineticConstants kc = nondimensional_constants();
    CHECK_THROWS_AS(lambda_moments(kc, 1e-30, 12.0), QuadratureError);
}

TEST_CASE("positivity certificate") {
    const PositivityCertificate cert = fourier_positivity_certificate();
    CHECK(cert.positive);
    CHECK(cert.minimum == doctest::Approx(15.0 / 16.0).epsilon(1e-15));
    CHECK(cert.argmin_kappa == doctest::Approx(std::sqrt(2.5)).epsilon(1e-15));
    // quartic endpoints: 5/2 at zero, dominated by kappa^4/4 at infinity
    auto quartic = [](double k) { return 2.5 - 1.25 * k * k + 0.25 * k * k * k * k; };
    CHECK(quartic(0.0) == 2.5);
    CHECK(quartic(100.0) > 1e6);
    CHECK(quartic(cert.argmin_kappa) == doctest::Approx(cert.minimum).epsilon(1e-14));
}

TEST_CASE("mean free time reference value and density scaling") {
    const KineticConstants kc = nondimensional_constants();
    const FieldPoint f = make_field_point(0.5, Vec3{}, 1.0, kc);
    const double t = mean_free_time(f, Vec3{}, kc);
    CHECK(t == doctest::Approx(testutil::golden("t_ell_rho_half_kappa0")).epsilon(1e-11));
    CHECK(t == doctest::Approx(std::sqrt(2.0 * M_PI) / 2.0).epsilon(1e-12));

    const FieldPoint dense = make_field_point(0.25, Vec3{}, 1.0, kc);
    CHECK(mean_free_time(dense, Vec3{}, kc) == doctest::Approx(2.0 * t).epsilon(1e-12));

    CHECK_THROWS_AS(mean_free_time(FieldPoint{0.0, Vec3{}, 1.0}, Vec3{}, kc),
                    std::domain_error);
}

TEST_CASE("mean free time is boost invariant") {
    const KineticConstants kc = nondimensional_constants();
    auto gen = testutil::rng(3);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const Vec3 u{d(gen), d(gen), d(gen)};
        const Vec3 k{2.0 * d(gen), 2.0 * d(gen), 2.0 * d(gen)};
        const Vec3 v{d(gen), d(gen), d(gen)};
        const double th = 0.5 + 0.4 * (d(gen) + 1.0);
        const FieldPoint f = make_field_point(0.3, u, th, kc);
        const FieldPoint g =
            make_field_point(0.3, Vec3{u[0] + v[0], u[1] + v[1], u[2] + v[2]}, th, kc);
        const Vec3 kb{k[0] + kc.m * v[0], k[1] + kc.m * v[1], k[2] + kc.m * v[2]};
        CHECK(mean_free_time(g, kb, kc) ==
              doctest::Approx(mean_free_time(f, k, kc)).epsilon(1e-12));
    }
}

TEST_CASE("mean free time agrees with the collision-rate route") {
    // closed-form F route vs the erf-based Gaussian mean in collision_rate:
    // genuinely different evaluation paths for 1/t
    const KineticConstants kc = nondimensional_constants();
    auto gen = testutil::rng(17);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const Vec3 u{d(gen), d(gen), d(gen)};
        const Vec3 k{3.0 * d(gen), 3.0 * d(gen), 3.0 * d(gen)};
        const double th = 0.4 + 0.8 * (d(gen) + 1.0);
        const double rho = 0.2 + 0.3 * (d(gen) + 1.0);
        const FieldPoint f = make_field_point(rho, u, th, kc);
        TrajPoint tp;
        tp.rho = f.rho;
        tp.u = f.u;
        tp.theta = f.theta;
        const double product = mean_free_time(f, k, kc) * collision_rate(tp, k, kc);
        CHECK(product == doctest::Approx(1.0).epsilon(1e-6));
    }
}
