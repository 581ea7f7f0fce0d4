#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "maxgas/constants.hpp"
#include "maxgas/quadrature.hpp"
#include "maxgas/thermo.hpp"
#include "test_helpers.hpp"

using namespace maxgas;

TEST_CASE("field point validation") {
    const KineticConstants kc = nondimensional_constants();
    CHECK_THROWS_AS(make_field_point(-1.0, Vec3{}, 1.0, kc), std::domain_error);
    CHECK_THROWS_AS(make_field_point(0.0, Vec3{}, 1.0, kc), std::domain_error);
    CHECK_THROWS_AS(make_field_point(0.5, Vec3{}, -2.0, kc), std::domain_error);
    // occupation = rho a^3 / m hits 1
    CHECK_THROWS_AS(make_field_point(1.0, Vec3{}, 1.0, kc), std::domain_error);
    CHECK_NOTHROW(make_field_point(0.999, Vec3{}, 1.0, kc));
}

TEST_CASE("canonical parameters for the reference state") {
    // N = 0.1, Theta = 1, u = (0.3, 0, 0): beta and zeta are closed-form;
    // xi is found here by an independent bisection on the occupation relation
    // N = (Xi - 1)/Xi with Xi = 1 + exp(-xi) Z.
    const KineticConstants kc = nondimensional_constants();
    const FieldPoint f = make_field_point(0.1, Vec3{0.3, 0.0, 0.0}, 1.0, kc);
    const LteParams p = lte_from_fields(f, kc);

    CHECK(p.beta == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(p.zeta[0] == doctest::Approx(-0.3).epsilon(1e-15));
    CHECK(p.zeta[1] == 0.0);
    CHECK(p.zeta[2] == 0.0);

    const double Z = std::pow(2.0 * M_PI, 1.5) * std::exp(0.5 * 0.09);
    CHECK(p.Z == doctest::Approx(Z).epsilon(1e-14));

    auto occupation = [&](double xi) {
        const double Xi = 1.0 + std::exp(-xi) * Z;
        return (Xi - 1.0) / Xi;
    };
    double lo = -50.0, hi = 50.0;  // occupation is decreasing in xi
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (occupation(mid) > 0.1 ? lo : hi) = mid;
    }
    CHECK(p.xi == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-12));
    CHECK(occupation(p.xi) == doctest::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("parameter map round-trips") {
    const KineticConstants kc = nondimensional_constants();
    auto gen = testutil::rng(11);
    std::uniform_real_distribution<double> rho_d(0.05, 0.9), th_d(0.3, 4.0), u_d(-1.5, 1.5);
    for (int trial = 0; trial < 50; ++trial) {
        const double rho = rho_d(gen), th = th_d(gen);
        const Vec3 u{u_d(gen), u_d(gen), u_d(gen)};
        const FieldPoint f = make_field_point(rho, u, th, kc);
        const FieldPoint back = fields_from_lte(lte_from_fields(f, kc), kc);
        CHECK(back.rho == doctest::Approx(rho).epsilon(1e-13));
        CHECK(back.theta == doctest::Approx(th).epsilon(1e-13));
        for (int i = 0; i < 3; ++i) CHECK(back.u[i] == doctest::Approx(u[i]).epsilon(1e-12));
    }
}

TEST_CASE("derived moments of a field point") {
    const KineticConstants kc = nondimensional_constants();
    const double rho = 0.4, th = 1.7;
    const Vec3 u{0.5, -0.2, 0.1};
    const FieldPoint f = make_field_point(rho, u, th, kc);
    CHECK(f.N == doctest::Approx(rho * kc.a * kc.a * kc.a / kc.m).epsilon(1e-15));
    for (int i = 0; i < 3; ++i) CHECK(f.pi[i] == doctest::Approx(rho * u[i]).epsilon(1e-15));
    const double u2 = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
    CHECK(f.E ==
          doctest::Approx(f.N * (1.5 * kc.k_B * th + 0.5 * kc.m * u2)).epsilon(1e-14));
}

TEST_CASE("maxwell pdf normalization mean and covariance") {
    const KineticConstants kc = nondimensional_constants();
    const Vec3 u{0.4, -0.3, 0.2};
    const double th = 1.3;
    const FieldPoint f = make_field_point(0.2, u, th, kc);

    QuadControl ctl;
    ctl.abs_tol = 1e-9;
    ctl.rel_tol = 1e-9;
    auto moment = [&](auto&& weight) {
        // thermal spread is sqrt(m k_B Theta) ~ 1.14; +-9 covers the drift too
        return integrate_box3(
            [&](double kx, double ky, double kz) {
                const Vec3 k{kx, ky, kz};
                return weight(k) * maxwell_pdf(f, k, kc);
            },
            -9.0, 9.0, ctl);
    };

    CHECK(moment([](const Vec3&) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(moment([](const Vec3& k) { return k[0]; }) ==
          doctest::Approx(kc.m * u[0]).epsilon(1e-6));
    const double var = moment([&](const Vec3& k) {
        const double d = k[1] - kc.m * u[1];
        return d * d;
    });
    CHECK(var == doctest::Approx(kc.m * kc.k_B * th).epsilon(1e-6));
}

TEST_CASE("equation of state domain errors") {
    const KineticConstants kc = nondimensional_constants();
    CHECK_THROWS_AS(equation_of_state(1.0, 1.0, 1.0, 1.0, kc), std::domain_error);
    CHECK_THROWS_AS(equation_of_state(1.0, 1.0, 0.5, 1.0, kc), std::domain_error);
    CHECK_THROWS_AS(equation_of_state(1.0, 1.0, 1.0, 0.0, kc), std::domain_error);
}

TEST_CASE("equation of state dilute correction is bracketed") {
    // relative deviation from the ideal law: err = -log(1-z)/z - 1, z = V0/V.
    // Series gives z/2 <= err <= z/(2(1-z)); the literal z/2 is only the limit.
    const KineticConstants kc = nondimensional_constants();
    const double N = 2.0, th = 1.5;
    for (double z : {1e-6, 1e-4, 1e-2, 0.1, 0.3, 0.6}) {
        const double V0 = 1.0, V = V0 / z;
        const double P = equation_of_state(N, th, V, V0, kc);
        const double ideal = N * kc.k_B * th / V;
        const double err = P / ideal - 1.0;
        CHECK(err >= 0.5 * z * (1.0 - 1e-12));
        CHECK(err <= 0.5 * z / (1.0 - z) * (1.0 + 1e-12));
    }
    // the dilute limit approaches z/2 from above
    const double z = 1e-8;
    const double err = equation_of_state(N, th, 1.0 / z, 1.0, kc) / (N * kc.k_B * th * z) - 1.0;
    CHECK(err / (0.5 * z) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("entropy basics") {
    const std::vector<double> uniform{0.25, 0.25, 0.25, 0.25};
    CHECK(entropy(uniform, 1.0) == doctest::Approx(std::log(4.0)).epsilon(1e-15));
    const std::vector<double> pure{1.0, 0.0, 0.0};
    CHECK(entropy(pure, 1.0) == 0.0);
    const std::vector<double> bad{0.5, -0.1};
    CHECK_THROWS_AS(entropy(bad, 1.0), std::domain_error);
    const std::vector<double> two{0.3, 0.7};
    CHECK(entropy(two, 2.5) == doctest::Approx(2.5 * (-0.3 * std::log(0.3) -
                                                      0.7 * std::log(0.7))).epsilon(1e-15));
}

TEST_CASE("entropy grows under doubly stochastic mixing") {
    // mixture of permutations applied to a random distribution
    auto gen = testutil::rng(5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 6;
        std::vector<double> mu(n);
        double tot = 0.0;
        for (double& v : mu) tot += (v = unit(gen) + 1e-3);
        for (double& v : mu) v /= tot;

        std::vector<double> mixed(n, 0.0);
        std::vector<int> perm(n);
        double wsum = 0.0;
        for (int p = 0; p < 4; ++p) {
            for (int i = 0; i < n; ++i) perm[i] = i;
            std::shuffle(perm.begin(), perm.end(), gen);
            const double w = unit(gen) + 0.1;
            wsum += w;
            for (int i = 0; i < n; ++i) mixed[perm[i]] += w * mu[i];
        }
        for (double& v : mixed) v /= wsum;
        CHECK(entropy(mixed, 1.0) >= entropy(mu, 1.0) - 1e-13);
    }
}
