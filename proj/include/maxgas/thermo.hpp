#pragma once

#include <span>

#include "maxgas/constants.hpp"
#include "maxgas/vec3.hpp"

namespace maxgas {

/// Canonical parameters of a local product equilibrium. beta conjugates
/// energy, zeta momentum, xi occupation. Xi and Z are cached derived values:
///   Z  = eps^-3 (2 pi m / beta)^{3/2} exp(m |zeta|^2 / (2 beta))
///   Xi = 1 + exp(-xi) Z,   N = (Xi - 1)/Xi in (0, 1).
struct LteParams {
    double beta = 1.0;
    Vec3 zeta{};
    double xi = 0.0;
    double Xi = 2.0;
    double Z = 1.0;
};

/// Macroscopic hydrodynamic values at one point. Redundant members keep the
/// unit conventions explicit: rho = m N / a^3, pi = rho u,
/// E = N (3/2 k_B Theta + m u^2 / 2) per site.
struct FieldPoint {
    double rho = 1.0;
    Vec3 u{};
    double theta = 1.0;
    double N = 0.5;
    double E = 0.0;
    Vec3 pi{};
};

/// Builds a validated FieldPoint from primitive values.
/// Throws std::domain_error for rho <= 0, theta <= 0 or occupation >= 1.
FieldPoint make_field_point(double rho, const Vec3& u, double theta, const KineticConstants& kc);

/// Inverts (rho, u, Theta) -> (beta, zeta, xi) in closed form:
/// beta = 1/(k_B Theta), zeta = -beta u, exp(-xi) = Z^-1 N/(1-N).
LteParams lte_from_fields(const FieldPoint& f, const KineticConstants& kc);
LteParams lte_from_fields(double rho, const Vec3& u, double theta, const KineticConstants& kc);

/// Forward map (beta, zeta, xi) -> macroscopic fields.
FieldPoint fields_from_lte(const LteParams& p, const KineticConstants& kc);

/// Continuum single-particle momentum density at momentum k:
/// (beta/(2 pi m))^{3/2} exp(-beta |k - m u|^2 / (2m)).
/// Integrates to 1 over momentum space; mean m u; covariance m k_B Theta I.
double maxwell_pdf(const FieldPoint& f, const Vec3& k, const KineticConstants& kc);

/// Lattice-gas pressure P = (k_B Theta / V0) N log(1 + V0/(V - V0)).
/// Throws std::domain_error when V <= V0 (no free volume) or V0 <= 0.
double equation_of_state(double N, double theta, double V, double V0, const KineticConstants& kc);

/// Gibbs entropy -k_B sum mu_i log mu_i with 0 log 0 = 0.
/// Throws std::domain_error on negative weights.
double entropy(std::span<const double> mu, double k_B);

} // namespace maxgas
