#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "maxgas/constants.hpp"
#include "maxgas/thermo.hpp"
#include "maxgas/transport.hpp"
#include "maxgas/vec3.hpp"

namespace maxgas {

/// Trajectory window cannot cover the kinetic horizon (16 max t_ell).
class WindowError : public std::runtime_error {
public:
    explicit WindowError(const std::string& what) : std::runtime_error(what) {}
};

/// Truncated free-time integral strays from 1 beyond tolerance.
class NormalizationError : public std::runtime_error {
public:
    explicit NormalizationError(const std::string& what) : std::runtime_error(what) {}
};

/// Thermalised field values seen by a streaming particle.
struct TrajPoint {
    double rho = 1.0;
    Vec3 u{};
    double theta = 1.0;
};

/// Space-time field history. Kinetic path integrals evaluate fields along
/// straight characteristics x + k tau / m; the free-time weight of a particle
/// observed at t0 extends to its next thermalisation, so the usable window is
/// two-sided in time around the observation instant.
class FieldTrajectory {
public:
    virtual ~FieldTrajectory() = default;
    virtual TrajPoint at(const Vec3& x, double t) const = 0;
    virtual double t_lo() const = 0;
    virtual double t_hi() const = 0;
};

/// Wraps a closed-form field history; unbounded window.
class AnalyticTrajectory : public FieldTrajectory {
public:
    using Fn = std::function<TrajPoint(const Vec3&, double)>;
    explicit AnalyticTrajectory(Fn fn) : fn_(std::move(fn)) {}
    TrajPoint at(const Vec3& x, double t) const override { return fn_(x, t); }
    double t_lo() const override { return -1e300; }
    double t_hi() const override { return 1e300; }

private:
    Fn fn_;
};

/// Periodic 1-D profile history sampled at uniform x nodes and stored
/// snapshot times; piecewise-linear interpolation in both x and t.
/// Queries outside the stored time span clamp to the nearest snapshot, but
/// the reported window is the stored span and ops enforce coverage.
class Sampled1DTrajectory : public FieldTrajectory {
public:
    struct Snapshot {
        double t = 0.0;
        std::vector<double> rho;
        std::vector<double> ux;
        std::vector<double> theta;
    };

    Sampled1DTrajectory(double length, std::vector<Snapshot> snaps);

    TrajPoint at(const Vec3& x, double t) const override;
    double t_lo() const override { return snaps_.front().t; }
    double t_hi() const override { return snaps_.back().t; }

private:
    TrajPoint sample(const Snapshot& s, double x) const;
    double length_;
    std::vector<Snapshot> snaps_;
};

/// Collision rate C = (sigma/m^2) rho Int d^3q |k-q| pbar(q) with pbar the
/// local Maxwellian; the Gaussian mean of |k - Q| is evaluated in closed form.
double collision_rate(const TrajPoint& f, const Vec3& k, const KineticConstants& kc);
double collision_rate(const FieldTrajectory& traj, const Vec3& x, const Vec3& k, double t,
                      const KineticConstants& kc);

/// Survival probability W = exp(-int_0^t C(x + k s/m, k, t0 + s) ds).
double survival_W(const FieldTrajectory& traj, const Vec3& x, const Vec3& k, double t0, double t,
                  const KineticConstants& kc, double quad_tol = 1e-10);

/// Free-time density w(t) = W(t) C(x + k t/m, k, t0 + t).
double free_time_density(const FieldTrajectory& traj, const Vec3& x, const Vec3& k, double t0,
                         double t, const KineticConstants& kc, double quad_tol = 1e-10);

/// Integrates w over [0, 16 max t_ell]; the remainder is bounded by e^{-16}.
/// Throws std::runtime_error when the result strays from 1 by more than tol,
/// and a window error when the trajectory cannot cover the horizon.
double free_time_normalization(const FieldTrajectory& traj, const Vec3& x, const Vec3& k,
                               double t0, const KineticConstants& kc, double tol = 1e-6,
                               double quad_tol = 1e-10);

/// Mean free time as the first moment int t w(t) dt of the path-dependent
/// free-time density. Coincides with transport::mean_free_time on uniform
/// fields and differs at second order on varying ones.
double mean_free_time_path(const FieldTrajectory& traj, const Vec3& x, const Vec3& k, double t0,
                           const KineticConstants& kc, double quad_tol = 1e-10);

/// Local-equilibrium phase density Nbar(x, t0) pbar(x, k, t0).
double barred_phase_density(const FieldTrajectory& traj, const Vec3& x, const Vec3& k, double t0,
                            const KineticConstants& kc);

/// Non-local phase density
///   N p = int_0^inf dt'/t' int_0^t' dt  Nbar pbar(x - k t/m, t0 - t)
///                                        w(x - k t/m, k, t0 - t; t'),
/// evaluated by swapping to the t-inner form with the cumulative collision
/// integral precomputed along the characteristic and geometric t' panels near
/// zero (the 1/t' weight has a removable singularity there).
/// Throws a window error unless the trajectory covers t0 +- 16 max t_ell.
double fundamental_relation(const FieldTrajectory& traj, const Vec3& x, const Vec3& k, double t0,
                            const KineticConstants& kc, double quad_tol = 1e-10);

/// First-order expansion Nbar pbar - (1/2)(k . d/m + d_t)(Nbar pbar t_ell),
/// with the directional derivative of the whole product taken along the
/// characteristic (t_ell inside is the local mean free time 1/C; its 1/rho
/// dependence is what removes the density from the dissipative term).
/// fundamental_relation minus this is O(t_ell^2).
double first_order_phase_density(const FieldTrajectory& traj, const Vec3& x, const Vec3& k,
                                 double t0, const KineticConstants& kc, double quad_tol = 1e-10);

/// Point values and spatial gradients feeding the first-order corrections.
/// grad_u[i][j] = du_i/dx_j.
struct PointGradients {
    double rho = 1.0;
    Vec3 u{};
    double theta = 1.0;
    Vec3 grad_rho{};
    Mat3 grad_u{};
    Vec3 grad_theta{};
};

/// First-order differences between actual and thermalised moments. Time
/// derivatives have been eliminated with the leading-order (short) Euler
/// relations, so only spatial gradients enter.
struct DeltaMoments {
    double delta_rho = 0.0;
    Vec3 delta_pi{};
    double delta_E = 0.0;
    double delta_rho_theta = 0.0;  ///< equals -(4 lambda_2 / 9) Theta^{1/2} div u
};

DeltaMoments delta_moments(const PointGradients& g, const TransportTable& tab,
                           const KineticConstants& kc);

} // namespace maxgas
