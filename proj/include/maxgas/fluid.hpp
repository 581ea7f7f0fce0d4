#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "maxgas/constants.hpp"
#include "maxgas/transport.hpp"
#include "maxgas/vec3.hpp"

namespace maxgas {

/// A cell dropped below the positivity floor; carries the flat cell index.
class PositivityError : public std::runtime_error {
public:
    PositivityError(const std::string& what, std::size_t cell_index)
        : std::runtime_error(what), cell(cell_index) {}
    std::size_t cell;
};

enum class Boundary { periodic, reflective };

/// Uniform collocated grid, 1-3 dimensions, at least 4 cells per active axis.
/// Cell centers sit at (i + 1/2) dx. Reflective boundaries are free-slip and
/// adiabatic (mirrored scalars, flipped normal velocity).
struct Grid {
    int dim = 1;
    std::array<int, 3> n{1, 1, 1};
    std::array<double, 3> length{1.0, 1.0, 1.0};
    std::array<Boundary, 3> bc{Boundary::periodic, Boundary::periodic, Boundary::periodic};

    double dx(int ax) const { return length[ax] / n[ax]; }
    std::size_t cells() const {
        return static_cast<std::size_t>(n[0]) * static_cast<std::size_t>(n[1]) *
               static_cast<std::size_t>(n[2]);
    }
    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(k) * n[1] + j) * n[0] + i;
    }
    double cell_volume() const { return dx(0) * (dim > 1 ? dx(1) : 1.0) * (dim > 2 ? dx(2) : 1.0); }
    void validate() const;
};

/// Primitive fields on the grid. Velocity keeps all three components even on
/// lower-dimensional grids (the stress tensor is always the full 3x3).
struct FieldState {
    Grid grid;
    double time = 0.0;
    std::vector<double> rho;
    std::vector<double> theta;
    std::array<std::vector<double>, 3> u;

    static FieldState zeros(const Grid& g);
    /// Throws PositivityError naming the first offending cell.
    void require_positive() const;
};

/// Pointwise Euler fluxes of the conservative system:
/// mass rho u, momentum rho u u + P I (P = rho k_B Theta / m),
/// energy (E + P) u with E = 3/2 rho k_B Theta / m + rho u^2 / 2.
struct EulerFlux {
    Vec3 mass{};
    Mat3 momentum{};
    Vec3 energy{};
};
EulerFlux euler_flux(double rho, const Vec3& u, double theta, const KineticConstants& kc);

/// Traceless viscous stress from a velocity gradient (grad_u[i][j] = du_i/dx_j):
/// tau = lambda_shear Theta^{1/2} (grad u + grad u^T - (2/3) div u I).
/// The deviatoric projection is applied algebraically, so trace(tau) vanishes
/// to roundoff regardless of how the gradients were produced.
Mat3 viscous_stress(const Mat3& grad_u, double theta, const TransportTable& tab);

/// Heat flux q_j = -lambda_fourier Theta^{1/2} dTheta_j
///               - lambda_dufour Theta^{3/2} drho_j / rho - u_i tau_ij.
Vec3 heat_flux(double rho, const Vec3& grad_rho, double theta, const Vec3& grad_theta,
               const Vec3& u, const Mat3& tau, const TransportTable& tab);

/// Leading-order convective derivatives:
/// D rho = -rho div u, D u_i = -(k_B/(m rho)) d_i(rho Theta), D Theta = -(2/3) Theta div u.
struct ShortEulerRhs {
    double D_rho = 0.0;
    Vec3 D_u{};
    double D_theta = 0.0;
};
ShortEulerRhs short_euler_rhs(double rho, const Vec3& u, double theta, const Vec3& grad_rho,
                              const Mat3& grad_u, const Vec3& grad_theta,
                              const KineticConstants& kc);

/// Largest dt allowed by the acoustic CFL (factor cfl, sound speed
/// sqrt(5 k_B Theta / 3 m)) and the diffusive bound (factor beta_d).
double stable_dt(const FieldState& s, const TransportTable& tab, const KineticConstants& kc,
                 double cfl = 0.4, double beta_d = 0.2);

/// One SSP two-stage step of the conservative flux-difference scheme.
/// Rejects dt above the stability bound; aborts on positivity loss.
void step(FieldState& s, double dt, const TransportTable& tab, const KineticConstants& kc,
          double cfl = 0.4, double beta_d = 0.2);

/// Active Galilean boost: u += v everywhere and positions shift by v * time
/// (periodic translation, linear interpolation for sub-cell fractions).
/// At time 0 this reduces to the velocity shift alone.
FieldState boost(const FieldState& s, const Vec3& v);

/// Evaluates the two algebraically identical groupings of the viscous work
/// term with the same second-order central differences and returns the
/// largest pointwise discrepancy; it shrinks as O(dx^2) under refinement.
double viscous_work_equivalence(const FieldState& s, const TransportTable& tab,
                                const KineticConstants& kc);

struct ConservedTotals {
    double mass = 0.0;
    Vec3 momentum{};
    double energy = 0.0;
};
/// Volume-weighted totals with compensated summation.
ConservedTotals conserved_totals(const FieldState& s, const KineticConstants& kc);

/// Cell-centered gradients of all fields by second-order central differences
/// (boundary-aware). Layout: grad_rho[ax][cell], grad_u[i][ax][cell], ...
struct CellGradients {
    std::array<std::vector<double>, 3> grad_rho;
    std::array<std::vector<double>, 3> grad_theta;
    std::array<std::array<std::vector<double>, 3>, 3> grad_u;
};
CellGradients cell_gradients(const FieldState& s);

} // namespace maxgas
