#include <cmath>

#include "doctest.h"
#include "maxgas/quadrature.hpp"

using namespace maxgas;

TEST_CASE("polynomials integrate exactly") {
    const double v = integrate_or_throw([](double x) { return x * x; }, 0.0, 1.0);
    CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

    const double w = integrate_or_throw([](double x) { return 3.0 * x * x - 2.0 * x + 5.0; },
                                        -2.0, 3.0);
    // antiderivative x^3 - x^2 + 5x
    CHECK(w == doctest::Approx((27.0 - 9.0 + 15.0) - (-8.0 - 4.0 - 10.0)).epsilon(1e-14));
}

TEST_CASE("gaussian tail against erf") {
    const double v = integrate_or_throw([](double x) { return std::exp(-x * x); }, 0.0, 6.0);
    CHECK(v == doctest::Approx(std::sqrt(M_PI) / 2.0 * std::erf(6.0)).epsilon(1e-13));
}

TEST_CASE("adaptive refinement resolves a narrow spike") {
    // mass 1 Gaussian of width 1e-3 in [0, 1]. Splitting at the peak keeps
    // the spike visible to the initial panels; from there the refinement has
    // to dig three orders of magnitude below the panel width.
    const double s = 1e-3;
    auto spike = [&](double x) {
        const double z = (x - 0.37) / s;
        return std::exp(-0.5 * z * z) / (s * std::sqrt(2.0 * M_PI));
    };
    const double v =
        integrate_or_throw(spike, 0.0, 0.37) + integrate_or_throw(spike, 0.37, 1.0);
    CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("error estimate is reported") {
    const QuadResult r = integrate_adaptive([](double x) { return std::sin(x); }, 0.0, M_PI);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(std::fabs(r.value - 2.0) <= 1e-8 + r.error * 10.0 + 1e-13);
}

TEST_CASE("non-convergence throws") {
    // integrable singularity at an interior point: the local estimate cannot
    // pass its share of the tolerance within the depth limit
    auto f = [](double x) { return 1.0 / std::sqrt(std::fabs(x - 0.3) + 1e-300); };
    CHECK_THROWS_AS(integrate_or_throw(f, 0.0, 1.0), QuadratureError);
    const QuadResult r = integrate_adaptive(f, 0.0, 1.0);
    CHECK_FALSE(r.converged);
}

TEST_CASE("3-D box rule on separable integrands") {
    const double v = integrate_box3([](double x, double y, double z) { return x * y * z; },
                                    0.0, 1.0);
    CHECK(v == doctest::Approx(0.125).epsilon(1e-10));

    // full Gaussian: (2 pi)^{3/2}
    QuadControl ctl;
    ctl.abs_tol = 1e-9;
    ctl.rel_tol = 1e-9;
    const double g = integrate_box3(
        [](double x, double y, double z) { return std::exp(-0.5 * (x * x + y * y + z * z)); },
        -8.0, 8.0, ctl);
    CHECK(g == doctest::Approx(std::pow(2.0 * M_PI, 1.5)).epsilon(1e-8));
}
