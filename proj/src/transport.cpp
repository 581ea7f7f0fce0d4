#include "maxgas/transport.hpp"

#include <cmath>
#include <stdexcept>

#include "maxgas/quadrature.hpp"

namespace maxgas {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

QuadControl rel_control(double quad_tol) {
    QuadControl ctl;
    ctl.abs_tol = 1e-300;  // relative-error driven
    ctl.rel_tol = quad_tol;
    return ctl;
}

// exp(-kappa^2/2) * int_0^inf q^2 exp(-q^2/2) sinh(q kappa) dq, written as a
// difference of shifted Gaussians so it neither overflows nor underflows:
//   q^2 (exp(-(q-kappa)^2/2) - exp(-(q+kappa)^2/2)) / 2.
double scaled_sinh_integral(double kappa, double quad_tol) {
    auto integrand = [kappa](double q) {
        const double dm = q - kappa;
        const double dp = q + kappa;
        return 0.5 * q * q * (std::exp(-0.5 * dm * dm) - std::exp(-0.5 * dp * dp));
    };
    return integrate_or_throw(integrand, 0.0, kappa + 12.0, rel_control(quad_tol),
                              "collision_F sinh integral");
}

} // namespace

double bessel_like_In(int n, double kappa, double quad_tol) {
    if (n < 0 || n > 3) throw std::domain_error("bessel_like_In: n must be in 0..3");
    auto integrand = [n, kappa](double q) {
        double p = 1.0;
        for (int i = 0; i < n; ++i) p *= q;
        const double s = q + kappa;
        return p * std::exp(-0.5 * s * s);
    };
    // Support ends where (q + kappa)^2/2 ~ 80; extend below a negative shift.
    const double upper = std::max(0.0, -kappa) + 14.0;
    QuadControl ctl = rel_control(quad_tol);
    ctl.abs_tol = 1e-250;
    return integrate_or_throw(integrand, 0.0, upper, ctl, "bessel_like_In");
}

double collision_F(double kappa, double quad_tol) {
    if (kappa < 0.0) throw std::domain_error("collision_F: kappa must be non-negative");
    if (kappa < 1e-3) {
        const double k2 = kappa * kappa;
        return 0.25 - k2 / 6.0 + (11.0 / 180.0) * k2 * k2;
    }
    return kappa * std::exp(-0.5 * kappa * kappa) / (2.0 * scaled_sinh_integral(kappa, quad_tol));
}

double collision_F_scaled(double kappa, double quad_tol) {
    if (kappa < 0.0) throw std::domain_error("collision_F: kappa must be non-negative");
    if (kappa < 1e-3) {
        return collision_F(kappa, quad_tol) * std::exp(0.5 * kappa * kappa);
    }
    return kappa / (2.0 * scaled_sinh_integral(kappa, quad_tol));
}

TransportTable lambda_moments(const KineticConstants& kc, double quad_tol, double kappa_max) {
    kc.validate();
    if (!(kappa_max > 0.0)) throw std::domain_error("lambda_moments: kappa_max must be positive");
    TransportTable t;
    t.quad_tol = quad_tol;
    t.kappa_max = kappa_max;

    // The moment integrands are smooth and Gaussian-tailed; the inner F
    // evaluations run an order tighter so their noise stays below the outer
    // tolerance.
    const double inner_tol = quad_tol * 0.1;
    double mu[3];
    for (int n = 1; n <= 3; ++n) {
        auto integrand = [n, inner_tol](double kap) {
            double w = 1.0;
            for (int i = 0; i < 2 * n; ++i) w *= kap;
            return w * collision_F(kap, inner_tol);
        };
        QuadControl ctl = rel_control(quad_tol);
        ctl.abs_tol = 1e-14;
        mu[n - 1] = integrate_or_throw(integrand, 0.0, kappa_max, ctl, "lambda_moments mu_n");
    }
    t.mu1 = mu[0];
    t.mu2 = mu[1];
    t.mu3 = mu[2];

    const double unit = kc.m / kc.sigma * std::sqrt(kc.m / kc.k_B);
    t.lambda1 = unit * t.mu1;
    t.lambda2 = unit * t.mu2;
    t.lambda3 = unit * t.mu3;
    t.lambda_shear = kc.k_B * t.lambda2 / (3.0 * kc.m);
    const double kb2_over_m = kc.k_B * kc.k_B / kc.m;
    t.lambda_fourier = kb2_over_m * (0.25 * t.lambda3 - 1.25 * t.lambda2 + 2.5 * t.lambda1);
    t.lambda_dufour = 2.5 * kb2_over_m * (t.lambda1 - t.lambda2 / 3.0);
    return t;
}

PositivityCertificate fourier_positivity_certificate() {
    // P(s) = 5/2 - (5/4) s + (1/4) s^2 in s = kappa^2; vertex at s = 5/2.
    const double a = 0.25, b = -1.25, c = 2.5;
    const double s_min = -b / (2.0 * a);
    PositivityCertificate cert;
    cert.argmin_kappa = std::sqrt(s_min);
    cert.minimum = (a * s_min + b) * s_min + c;
    cert.positive = cert.minimum > 0.0 && s_min >= 0.0;
    return cert;
}

double mean_free_time(const FieldPoint& f, const Vec3& k, const KineticConstants& kc,
                      double quad_tol) {
    kc.validate();
    if (!(f.rho > 0.0) || !(f.theta > 0.0)) {
        throw std::domain_error("mean_free_time: rho and theta must be positive");
    }
    const double c = std::sqrt(kc.k_B * f.theta / kc.m);
    const double kappa = norm(k / kc.m - f.u) / c;
    // beta^2 F / (2 pi sigma rho pbar(k)) with the Maxwellian inserted:
    //   t_ell = sqrt(2 pi) (m / (sigma rho)) sqrt(m / (k_B Theta)) F(kappa) e^{kappa^2/2}.
    return std::sqrt(kTwoPi) * kc.m / (kc.sigma * f.rho) * std::sqrt(kc.m / (kc.k_B * f.theta)) *
           collision_F_scaled(kappa, quad_tol);
}

} // namespace maxgas
