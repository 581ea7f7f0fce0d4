#pragma once

#include "maxgas/constants.hpp"
#include "maxgas/thermo.hpp"
#include "maxgas/vec3.hpp"

namespace maxgas {

/// Momentum-space transport moments and the derived conduction coefficients.
/// mu_n are pure numbers; lambda_n carry (m/sigma) sqrt(m/k_B); the last three
/// are the coefficients that appear in the viscous stress, the temperature
/// gradient term and the density gradient term of the heat flux.
struct TransportTable {
    double mu1 = 0.0;
    double mu2 = 0.0;
    double mu3 = 0.0;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double lambda3 = 0.0;
    double lambda_shear = 0.0;
    double lambda_fourier = 0.0;
    double lambda_dufour = 0.0;
    double quad_tol = 1e-10;
    double kappa_max = 12.0;
};

/// I_n(kappa) = int_0^inf exp(-(q + kappa)^2 / 2) q^n dq by adaptive
/// quadrature. Defined for any real kappa; throws QuadratureError if the
/// rule cannot meet quad_tol.
double bessel_like_In(int n, double kappa, double quad_tol = 1e-10);

/// Collision function F(kappa) = kappa exp(-kappa^2/2) / (I_2(-kappa) - I_2(kappa)),
/// evaluated through the cancellation-free form
///   F(kappa) = kappa / (2 int_0^inf q^2 exp(-q^2/2) sinh(q kappa) dq).
/// Below kappa = 1e-3 the series 1/4 - kappa^2/6 + (11/180) kappa^4 is used;
/// F(0) = 1/4.
double collision_F(double kappa, double quad_tol = 1e-10);

/// F(kappa) exp(kappa^2/2), stable for large kappa (no underflow); this is
/// the combination entering the mean free time.
double collision_F_scaled(double kappa, double quad_tol = 1e-10);

/// Computes mu_n = int_0^kappa_max kappa^{2n} F(kappa) dkappa for n = 1..3
/// and assembles the full coefficient table. Throws QuadratureError when the
/// adaptive rule fails to converge.
TransportTable lambda_moments(const KineticConstants& kc, double quad_tol = 1e-10,
                              double kappa_max = 12.0);

/// Sign certificate for the temperature-gradient heat conduction quartic
/// 5/2 - (5/4) kappa^2 + (1/4) kappa^4. The minimum is found in closed form
/// from the vertex of the quadratic in kappa^2.
struct PositivityCertificate {
    bool positive = false;
    double minimum = 0.0;       ///< 15/16
    double argmin_kappa = 0.0;  ///< sqrt(5/2)
};
PositivityCertificate fourier_positivity_certificate();

/// Mean free time of a particle with momentum k in local fields f:
///   t_ell = beta^2 F(kappa) / (2 pi sigma rho pbar(k)),
/// kappa = |k/m - u| / sqrt(k_B Theta / m). Inversely proportional to rho and
/// invariant under simultaneous boosts of u and k.
double mean_free_time(const FieldPoint& f, const Vec3& k, const KineticConstants& kc,
                      double quad_tol = 1e-10);

} // namespace maxgas
