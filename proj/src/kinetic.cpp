#include "maxgas/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "maxgas/quadrature.hpp"

namespace maxgas {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kHorizonFactor = 16.0;  // e^{-16} tail, below 1e-6

double wrap_periodic(double x, double length) {
    double y = std::fmod(x, length);
    if (y < 0.0) y += length;
    return y;
}

// Gaussian mean E|k - Q| / s for Q ~ N(m u, s^2 I), b = |k - m u| / s:
//   h(b) = sqrt(2/pi) e^{-b^2/2} + (b + 1/b) erf(b / sqrt 2),  h(0) = 2 sqrt(2/pi).
double gaussian_speed_mean(double b) {
    constexpr double kSqrt2OverPi = 0.79788456080286535587989211986876;
    if (b < 1e-6) return 2.0 * kSqrt2OverPi * (1.0 + b * b / 6.0);
    return kSqrt2OverPi * std::exp(-0.5 * b * b) +
           (b + 1.0 / b) * std::erf(b / 1.4142135623730950488);
}

struct PathFrame {
    const FieldTrajectory* traj;
    Vec3 x;
    Vec3 k;
    double t0;
    const KineticConstants* kc;

    TrajPoint fields(double tau) const { return traj->at(x + (tau / kc->m) * k, t0 + tau); }

    double rate(double tau) const { return collision_rate(fields(tau), k, *kc); }

    double phase_density(double tau) const {
        const TrajPoint p = fields(tau);
        const double N = p.rho * kc->a * kc->a * kc->a / kc->m;
        const double beta = 1.0 / (kc->k_B * p.theta);
        const Vec3 dk = k - kc->m * p.u;
        return N * std::pow(beta / (kTwoPi * kc->m), 1.5) *
               std::exp(-beta * norm2(dk) / (2.0 * kc->m));
    }
};

// Cumulative collision integral Phi(tau) = int_0^tau C along one
// characteristic, sampled on a uniform grid with per-panel Simpson sums and
// quadratic in-panel reconstruction. Rates are smooth in tau, so the O(h^4)
// interpolant keeps the survival factors at machine accuracy.
class CharacteristicScan {
public:
    CharacteristicScan(const PathFrame& frame, double lo, double hi, int panels)
        : frame_(frame), lo_(lo), hi_(hi), n_(panels), dt_((hi - lo) / panels) {
        node_.resize(n_ + 1);
        mid_.resize(n_);
        for (int i = 0; i <= n_; ++i) node_[i] = frame_.rate(lo_ + i * dt_);
        for (int i = 0; i < n_; ++i) mid_[i] = frame_.rate(lo_ + (i + 0.5) * dt_);
        cum_.resize(n_ + 1);
        cum_[0] = 0.0;
        for (int i = 0; i < n_; ++i) {
            cum_[i + 1] = cum_[i] + dt_ / 6.0 * (node_[i] + 4.0 * mid_[i] + node_[i + 1]);
        }
        phi_zero_ = cum_at(0.0);
    }

    double phi(double tau) const { return cum_at(tau) - phi_zero_; }
    double survival(double tau_a, double tau_b) const { return std::exp(phi(tau_a) - phi(tau_b)); }
    double rate(double tau) const { return frame_.rate(tau); }

private:
    double cum_at(double tau) const {
        double s = (tau - lo_) / dt_;
        int j = static_cast<int>(std::floor(s));
        j = std::clamp(j, 0, n_ - 1);
        s -= j;
        const double c0 = node_[j], cm = mid_[j], c1 = node_[j + 1];
        // integral of the quadratic through (0, c0), (1/2, cm), (1, c1)
        const double s2 = s * s, s3 = s2 * s;
        const double val = c0 * (2.0 * s3 / 3.0 - 1.5 * s2 + s) + cm * (2.0 * s2 - 4.0 * s3 / 3.0) +
                           c1 * (2.0 * s3 / 3.0 - 0.5 * s2);
        return cum_[j] + dt_ * val;
    }

    PathFrame frame_;
    double lo_, hi_;
    int n_;
    double dt_;
    std::vector<double> node_, mid_, cum_;
    double phi_zero_ = 0.0;
};

// Horizon = 16 / (slowest collision rate met along the path), found by
// expanding the probe range until it stabilises.
double find_horizon(const PathFrame& frame, bool backward, bool forward) {
    double h = kHorizonFactor / frame.rate(0.0);
    for (int iter = 0; iter < 4; ++iter) {
        double cmin = 1e300;
        const int probes = 96;
        for (int i = 0; i <= probes; ++i) {
            const double frac = static_cast<double>(i) / probes;
            if (forward) cmin = std::min(cmin, frame.rate(frac * h));
            if (backward) cmin = std::min(cmin, frame.rate(-frac * h));
        }
        const double h_new = kHorizonFactor / cmin;
        if (h_new <= h * 1.000001) return h_new;
        h = h_new;
    }
    return h;
}

void require_window(const PathFrame& frame, double back, double forward) {
    if (frame.t0 - back < frame.traj->t_lo() || frame.t0 + forward > frame.traj->t_hi()) {
        throw WindowError("trajectory window too short: kinetic horizon needs [t0 - " +
                          std::to_string(back) + ", t0 + " + std::to_string(forward) +
                          "] inside the stored span");
    }
}

} // namespace

Sampled1DTrajectory::Sampled1DTrajectory(double length, std::vector<Snapshot> snaps)
    : length_(length), snaps_(std::move(snaps)) {
    if (!(length_ > 0.0)) throw std::domain_error("trajectory: length must be positive");
    if (snaps_.empty()) throw std::domain_error("trajectory: no snapshots");
    const size_t n = snaps_.front().rho.size();
    for (size_t i = 0; i < snaps_.size(); ++i) {
        const Snapshot& s = snaps_[i];
        if (s.rho.size() != n || s.ux.size() != n || s.theta.size() != n || n < 2) {
            throw std::domain_error("trajectory: inconsistent snapshot arrays");
        }
        if (i > 0 && !(s.t > snaps_[i - 1].t)) {
            throw std::domain_error("trajectory: snapshot times must increase");
        }
    }
}

TrajPoint Sampled1DTrajectory::sample(const Snapshot& s, double x) const {
    const size_t n = s.rho.size();
    const double dx = length_ / static_cast<double>(n);
    const double pos = wrap_periodic(x, length_) / dx;
    const size_t i0 = std::min(static_cast<size_t>(pos), n - 1);
    const size_t i1 = (i0 + 1) % n;
    const double f = pos - static_cast<double>(i0);
    TrajPoint p;
    p.rho = (1.0 - f) * s.rho[i0] + f * s.rho[i1];
    p.u = {(1.0 - f) * s.ux[i0] + f * s.ux[i1], 0.0, 0.0};
    p.theta = (1.0 - f) * s.theta[i0] + f * s.theta[i1];
    return p;
}

TrajPoint Sampled1DTrajectory::at(const Vec3& x, double t) const {
    if (t <= snaps_.front().t) return sample(snaps_.front(), x.x);
    if (t >= snaps_.back().t) return sample(snaps_.back(), x.x);
    size_t hi = 1;
    while (snaps_[hi].t < t) ++hi;
    const Snapshot& a = snaps_[hi - 1];
    const Snapshot& b = snaps_[hi];
    const double f = (t - a.t) / (b.t - a.t);
    const TrajPoint pa = sample(a, x.x);
    const TrajPoint pb = sample(b, x.x);
    TrajPoint p;
    p.rho = (1.0 - f) * pa.rho + f * pb.rho;
    p.u = (1.0 - f) * pa.u + f * pb.u;
    p.theta = (1.0 - f) * pa.theta + f * pb.theta;
    return p;
}

double collision_rate(const TrajPoint& f, const Vec3& k, const KineticConstants& kc) {
    if (!(f.rho > 0.0) || !(f.theta > 0.0)) {
        throw std::domain_error("collision_rate: rho and theta must be positive");
    }
    const double s = std::sqrt(kc.m * kc.k_B * f.theta);  // momentum spread
    const double kappa = norm(k - kc.m * f.u) / s;
    return kc.sigma * f.rho / (kc.m * kc.m) * s * gaussian_speed_mean(kappa);
}

double collision_rate(const FieldTrajectory& traj, const Vec3& x, const Vec3& k, double t,
                      const KineticConstants& kc) {
    return collision_rate(traj.at(x, t), k, kc);
}

double survival_W(const FieldTrajectory& traj, const Vec3& x, const Vec3& k, double t0, double t,
                  const KineticConstants& kc, double quad_tol) {
    if (t < 0.0) throw std::domain_error("survival_W: t must be non-negative");
    if (t == 0.0) return 1.0;
    const PathFrame frame{&traj, x, k, t0, &kc};
    QuadControl ctl;
    ctl.abs_tol = 1e-14;
    ctl.rel_tol = quad_tol;
    const double integral =
        integrate_or_throw([&frame](double s) { return frame.rate(s); }, 0.0, t, ctl, "survival_W");
    return std::exp(-integral);
}

double free_time_density(const FieldTrajectory& traj, const Vec3& x, const Vec3& k, double t0,
                         double t, const KineticConstants& kc, double quad_tol) {
    const PathFrame frame{&traj, x, k, t0, &kc};
    return survival_W(traj, x, k, t0, t, kc, quad_tol) * frame.rate(t);
}

double free_time_normalization(const FieldTrajectory& traj, const Vec3& x, const Vec3& k,
                               double t0, const KineticConstants& kc, double tol,
                               double quad_tol) {
    const PathFrame frame{&traj, x, k, t0, &kc};
    const double T = find_horizon(frame, false, true);
    require_window(frame, 0.0, T);
    const CharacteristicScan scan(frame, 0.0, T, 2048);
    QuadControl ctl;
    ctl.abs_tol = 1e-12;
    ctl.rel_tol = quad_tol;
    const double integral = integrate_or_throw(
        [&scan](double s) { return scan.survival(0.0, s) * scan.rate(s); }, 0.0, T, ctl,
        "free_time_normalization");
    if (std::fabs(integral - 1.0) > tol) {
        throw NormalizationError("free-time density integrates to " + std::to_string(integral) +
                                 ", off 1 by more than " + std::to_string(tol));
    }
    return integral;
}

double mean_free_time_path(const FieldTrajectory& traj, const Vec3& x, const Vec3& k, double t0,
                           const KineticConstants& kc, double quad_tol) {
    const PathFrame frame{&traj, x, k, t0, &kc};
    const double T = find_horizon(frame, false, true);
    require_window(frame, 0.0, T);
    const CharacteristicScan scan(frame, 0.0, T, 2048);
    QuadControl ctl;
    ctl.abs_tol = 1e-14;
    ctl.rel_tol = quad_tol;
    return integrate_or_throw(
        [&scan](double s) { return s * scan.survival(0.0, s) * scan.rate(s); }, 0.0, T, ctl,
        "mean_free_time_path");
}

double barred_phase_density(const FieldTrajectory& traj, const Vec3& x, const Vec3& k, double t0,
                            const KineticConstants& kc) {
    const PathFrame frame{&traj, x, k, t0, &kc};
    return frame.phase_density(0.0);
}

double fundamental_relation(const FieldTrajectory& traj, const Vec3& x, const Vec3& k, double t0,
                            const KineticConstants& kc, double quad_tol) {
    const PathFrame frame{&traj, x, k, t0, &kc};
    const double T = find_horizon(frame, true, true);
    require_window(frame, T, T);
    const CharacteristicScan scan(frame, -T, T, 4096);

    // Inner average over the emission instant: the particle seen at tau = 0
    // thermalised at tau = -t and survives to tau = t' - t where it hits the
    // rate factor.
    QuadControl inner;
    inner.abs_tol = 1e-300;
    inner.rel_tol = quad_tol * 0.3;
    auto averaged = [&](double tp) {
        const double val = integrate_or_throw(
            [&](double t) {
                return frame.phase_density(-t) * scan.survival(-t, tp - t) * scan.rate(tp - t);
            },
            0.0, tp, inner, "fundamental_relation inner");
        return val / tp;
    };

    // Geometric panels toward t' = 0 absorb the 1/t' weight (removable there).
    QuadControl outer;
    outer.abs_tol = 1e-300;
    outer.rel_tol = quad_tol;
    double result = 0.0;
    double hi = T;
    const int kLevels = 24;
    for (int level = 0; level < kLevels; ++level) {
        const double lo = (level + 1 == kLevels) ? 0.0 : hi * 0.5;
        result += integrate_or_throw(averaged, lo, hi, outer, "fundamental_relation outer");
        hi = lo;
    }
    return result;
}

double first_order_phase_density(const FieldTrajectory& traj, const Vec3& x, const Vec3& k,
                                 double t0, const KineticConstants& kc, double quad_tol) {
    (void)quad_tol;
    const PathFrame frame{&traj, x, k, t0, &kc};
    // Directional derivative (k . d/m + d_t) of the product Nbar pbar t_ell
    // along the characteristic. The mean free time must sit inside the
    // derivative: t_ell varies as 1/rho, so differentiating the product is
    // what cancels the density from the dissipative term. The local mean free
    // time equals 1/C identically, so the product is phase_density / rate.
    // Fields vary on O(1) scales; a fixed physical step with a 4th-order
    // stencil keeps truncation and roundoff far below the O(t_ell^2) residual.
    const double speed = norm(k) / kc.m;
    const double h = 1e-3 / (1.0 + speed);
    auto product = [&](double tau) { return frame.phase_density(tau) / frame.rate(tau); };
    const double d = (-product(2.0 * h) + 8.0 * product(h) - 8.0 * product(-h) +
                      product(-2.0 * h)) /
                     (12.0 * h);
    return frame.phase_density(0.0) - 0.5 * d;
}

DeltaMoments delta_moments(const PointGradients& g, const TransportTable& tab,
                           const KineticConstants& kc) {
    if (!(g.rho > 0.0) || !(g.theta > 0.0)) {
        throw std::domain_error("delta_moments: rho and theta must be positive");
    }
    const double sqt = std::sqrt(g.theta);
    const double isqt = 1.0 / sqt;
    const double divu = trace(g.grad_u);
    const Vec3 advu{dot({g.grad_u[0][0], g.grad_u[0][1], g.grad_u[0][2]}, g.u),
                    dot({g.grad_u[1][0], g.grad_u[1][1], g.grad_u[1][2]}, g.u),
                    dot({g.grad_u[2][0], g.grad_u[2][1], g.grad_u[2][2]}, g.u)};
    const double u2 = norm2(g.u);
    const double uGu = dot(g.u, advu);
    const double u_gTh = dot(g.u, g.grad_theta);

    // Leading-order Euler relations eliminate the time derivatives:
    //   D rho = -rho div u, D u = -(k_B/(m rho)) grad(rho Theta),
    //   D Theta = -(2/3) Theta div u, with d_t = D - u . grad.
    const Vec3 Du = -(kc.k_B / (kc.m * g.rho)) * (g.theta * g.grad_rho + g.rho * g.grad_theta);
    const double D_isqt = isqt * divu / 3.0;
    const double D_sqt = -sqt * divu / 3.0;

    DeltaMoments out;

    // delta rho = -lambda1 [ div(Theta^{-1/2} u) + d_t Theta^{-1/2} ]
    const double div_isqt_u = isqt * divu - 0.5 * isqt / g.theta * u_gTh;
    const double d0_isqt = D_isqt + 0.5 * isqt / g.theta * u_gTh;
    out.delta_rho = -tab.lambda1 * (div_isqt_u + d0_isqt);

    // delta pi_i = -(k_B lambda2 / 3m) d_i Theta^{1/2}
    //              - lambda1 [ d_j(Theta^{-1/2} u_i u_j) + d_t(Theta^{-1/2} u_i) ]
    const double pre_pi = kc.k_B * tab.lambda2 / (3.0 * kc.m);
    for (int i = 0; i < 3; ++i) {
        const double div_term =
            isqt * (g.u[i] * divu + advu[i]) - 0.5 * isqt / g.theta * g.u[i] * u_gTh;
        const double d0_term = isqt * Du[i] + g.u[i] * D_isqt - isqt * advu[i] +
                               0.5 * isqt / g.theta * g.u[i] * u_gTh;
        out.delta_pi[i] =
            -pre_pi * 0.5 * isqt * g.grad_theta[i] - tab.lambda1 * (div_term + d0_term);
    }

    // delta E = -(5 k_B lambda2 / 6m) div(Theta^{1/2} u)
    //           - (lambda1/2) div(Theta^{-1/2} u u^2)
    //           - (k_B lambda2 / 2m) d_t Theta^{1/2}
    //           - (lambda1/2) d_t(Theta^{-1/2} u^2)
    const double pre_E = kc.k_B * tab.lambda2 / kc.m;
    const double div_sqt_u = sqt * divu + 0.5 * isqt * u_gTh;
    const double div_isqt_u_u2 =
        isqt * (u2 * divu + 2.0 * uGu) - 0.5 * isqt / g.theta * u2 * u_gTh;
    const double d0_sqt = D_sqt - 0.5 * isqt * u_gTh;
    const double d0_isqt_u2 = u2 * D_isqt + 2.0 * isqt * dot(g.u, Du) - 2.0 * isqt * uGu +
                              0.5 * isqt / g.theta * u2 * u_gTh;
    out.delta_E = -(5.0 / 6.0) * pre_E * div_sqt_u - 0.5 * tab.lambda1 * div_isqt_u_u2 -
                  0.5 * pre_E * d0_sqt - 0.5 * tab.lambda1 * d0_isqt_u2;

    out.delta_rho_theta = -(4.0 * tab.lambda2 / 9.0) * sqt * divu;
    return out;
}

} // namespace maxgas
