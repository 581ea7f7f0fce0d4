#include "maxgas/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <span>

#include "maxgas/thermo.hpp"

namespace maxgas {
namespace {

int wrap(int x, int n) { return ((x % n) + n) % n; }

} // namespace

MomentumBins MomentumBins::symmetric(int m, double k_max) {
    if (m < 4 || m % 2 != 0) {
        throw std::domain_error("momentum bins: count must be even and at least 4");
    }
    if (!(k_max > 0.0)) throw std::domain_error("momentum bins: k_max must be positive");
    MomentumBins b;
    b.count = m;
    b.dk = 2.0 * k_max / m;
    return b;
}

double LatticeGasState::site_u(int x, const KineticConstants& kc) const {
    return Pi[x] / (N[x] * kc.m);
}

double LatticeGasState::site_theta(int x, const KineticConstants& kc) const {
    // one translational degree of freedom: thermal energy = k_B Theta / 2
    const double e1 = E[x] / N[x];
    const double m1 = Pi[x] / N[x];
    return 2.0 * (e1 - 0.5 * m1 * m1 / kc.m) / kc.k_B;
}

void LatticeGasState::rethermalise(const KineticConstants& kc, double tol) {
    for (int x = 0; x < sites; ++x) {
        const std::vector<double> px = thermalise({N[x], Pi[x], E[x]}, bins, kc, tol);
        std::copy(px.begin(), px.end(), p.begin() + static_cast<std::size_t>(x) * bins.count);
    }
}

void LatticeGasState::validate() const {
    if (sites < 4) throw std::domain_error("lattice: at least 4 sites");
    for (int x = 0; x < sites; ++x) {
        if (!(N[x] > 0.0 && N[x] < 1.0)) {
            throw LatticePositivityError(
                "occupation outside (0,1) at site " + std::to_string(x), x);
        }
    }
}

HopKernel build_hop_kernel(const LatticeGasState& state, int direction) {
    if (direction != 1 && direction != -1) {
        throw std::domain_error("hop kernel: direction must be +1 or -1");
    }
    state.validate();
    const int L = state.sites;
    HopKernel kern;
    kern.direction = direction;
    kern.sites = L;
    kern.hop.assign(static_cast<std::size_t>(L) * L, 0.0);

    double G = 1.0;
    for (int x = 0; x < L; ++x) G *= 1.0 - state.N[x];
    kern.wrap_factor = G;

    for (int x = 0; x < L; ++x) {
        double* row = kern.hop.data() + static_cast<std::size_t>(x) * L;
        // flight of s spacings: sites x+1..x+s empty, site x+(s+1) occupied;
        // wrap aggregation sums the geometric tail of full loops
        double q = 1.0;
        double sum = 0.0;
        for (int s = 0; s < L; ++s) {
            const double occ = state.N[wrap(x + direction * (s + 1), L)];
            row[s] = q * occ;
            sum += row[s];
            q *= 1.0 - state.N[wrap(x + direction * (s + 1), L)];
        }
        // exact total is 1 - G; divide by the computed sum so each row sums
        // to one at roundoff level
        const double inv = 1.0 / sum;
        for (int s = 0; s < L; ++s) row[s] *= inv;
    }
    return kern;
}

std::vector<double> HopKernel::two_point_operator(int x) const {
    std::vector<double> T(static_cast<std::size_t>(sites) * sites, 0.0);
    for (int i = 0; i < sites; ++i) T[static_cast<std::size_t>(i) * sites + i] = 1.0;
    for (int s = 1; s < sites; ++s) {
        const double w = at(x, s);
        const int y = wrap(x + direction * s, sites);
        T[static_cast<std::size_t>(x) * sites + x] -= w;
        T[static_cast<std::size_t>(y) * sites + y] -= w;
        T[static_cast<std::size_t>(x) * sites + y] += w;
        T[static_cast<std::size_t>(y) * sites + x] += w;
    }
    return T;
}

std::vector<double> thermalise(const SiteMoments& moments, const MomentumBins& bins,
                               const KineticConstants& kc, double tol, int max_iter) {
    if (!(moments.N > 0.0)) throw DegenerateMomentsError("thermalise: mass must be positive");
    const double m1 = moments.Pi / moments.N;
    const double e1 = moments.E / moments.N;
    const double e_th = e1 - 0.5 * m1 * m1 / kc.m;
    if (!(e_th > 0.0)) {
        throw DegenerateMomentsError("thermalise: thermal energy non-positive");
    }

    const int M = bins.count;
    std::vector<double> kin(M), en(M), p(M);
    for (int i = 0; i < M; ++i) {
        kin[i] = bins.k(i);
        en[i] = 0.5 * kin[i] * kin[i] / kc.m;
    }

    // p_i proportional to exp(alpha k_i - beta k_i^2 / 2m); finite support
    // keeps every (alpha, beta) admissible, so damped Newton on the two
    // moment residuals converges whenever the targets are representable.
    double beta = 1.0 / (2.0 * e_th);
    double alpha = beta * m1 / kc.m;

    const double k_scale = std::max(std::fabs(m1), std::sqrt(2.0 * kc.m * e1));
    auto evaluate = [&](double a, double b, double& s1, double& s2) {
        double peak = -1e300;
        for (int i = 0; i < M; ++i) {
            const double ex = a * kin[i] - b * en[i];
            p[i] = ex;
            if (ex > peak) peak = ex;
        }
        double z = 0.0;
        for (int i = 0; i < M; ++i) {
            p[i] = std::exp(p[i] - peak);
            z += p[i];
        }
        s1 = 0.0;
        s2 = 0.0;
        for (int i = 0; i < M; ++i) {
            p[i] /= z;
            s1 += p[i] * kin[i];
            s2 += p[i] * en[i];
        }
    };

    double s1, s2;
    evaluate(alpha, beta, s1, s2);
    for (int iter = 0; iter < max_iter; ++iter) {
        const double r1 = s1 - m1;
        const double r2 = s2 - e1;
        if (std::fabs(r1) <= tol * k_scale && std::fabs(r2) <= tol * e1) return p;

        double c11 = 0.0, c12 = 0.0, c22 = 0.0;
        for (int i = 0; i < M; ++i) {
            const double dk = kin[i] - s1;
            const double de = en[i] - s2;
            c11 += p[i] * dk * dk;
            c12 += p[i] * dk * de;
            c22 += p[i] * de * de;
        }
        // ds1 = c11 da - c12 db ; ds2 = c12 da - c22 db
        const double det = -c11 * c22 + c12 * c12;
        if (det == 0.0) {
            throw DegenerateMomentsError("thermalise: singular moment system");
        }
        const double da = (-r1 * -c22 - -c12 * -r2) / det;
        const double db = (c11 * -r2 - -r1 * c12) / det;

        const double res0 = std::hypot(r1 / k_scale, r2 / e1);
        double lam = 1.0;
        for (int halve = 0; halve < 40; ++halve) {
            double t1, t2;
            evaluate(alpha + lam * da, beta + lam * db, t1, t2);
            const double res = std::hypot((t1 - m1) / k_scale, (t2 - e1) / e1);
            if (res < res0 || lam < 1e-12) {
                alpha += lam * da;
                beta += lam * db;
                s1 = t1;
                s2 = t2;
                break;
            }
            lam *= 0.5;
        }
    }
    throw DegenerateMomentsError("thermalise: moment fit did not converge on the bins");
}

namespace {

struct TransferAccum {
    std::vector<double> out_m, out_pi, out_e, in_m, in_pi, in_e;
    explicit TransferAccum(int L)
        : out_m(L, 0.0), out_pi(L, 0.0), out_e(L, 0.0), in_m(L, 0.0), in_pi(L, 0.0),
          in_e(L, 0.0) {}
};

// Per-site attempt-rate factors that make the flight-time-weighted transfer
// matrix of the kernel doubly stochastic: sum_s r[y-s] hop(y-s,s)/s must
// equal r[y] sum_s hop(y,s)/s at every site. Without the balance, the
// mean-field reduction of the pair-swap chain is only mass-conserving and
// the site-ensemble entropy can drift downward near equilibrium; with it,
// every bin's transfer matrix is a doubly stochastic mixing, which the
// underlying chain guarantees exactly. r == 1 on uniform occupations.
std::vector<double> balance_factors(const HopKernel& kern) {
    const int L = kern.sites;
    std::vector<double> c(L, 0.0);
    for (int x = 0; x < L; ++x) {
        for (int s = 1; s < L; ++s) c[x] += kern.at(x, s) / s;
    }
    std::vector<double> r(L, 1.0), next(L, 0.0);
    for (int iter = 0; iter < 4096; ++iter) {
        double worst = 0.0;
        for (int y = 0; y < L; ++y) {
            double inflow = 0.0;
            for (int s = 1; s < L; ++s) {
                const int x = wrap(y - kern.direction * s, L);
                inflow += r[x] * kern.at(x, s) / s;
            }
            next[y] = inflow / c[y];
        }
        double mean = 0.0;
        for (int y = 0; y < L; ++y) mean += next[y];
        mean /= L;
        for (int y = 0; y < L; ++y) {
            next[y] /= mean;
            worst = std::max(worst, std::fabs(next[y] - r[y]));
        }
        r.swap(next);
        if (worst < 1e-14) break;
    }
    return r;
}

void apply_transfers(LatticeGasState& state, const TransferAccum& acc,
                     const KineticConstants& kc, double tol) {
    const int L = state.sites;
    for (int x = 0; x < L; ++x) {
        state.N[x] += acc.in_m[x] - acc.out_m[x];
        state.Pi[x] += acc.in_pi[x] - acc.out_pi[x];
        state.E[x] += acc.in_e[x] - acc.out_e[x];
        if (!(state.N[x] > 0.0 && state.N[x] < 1.0)) {
            throw LatticePositivityError(
                "time step drove occupation outside (0,1) at site " + std::to_string(x), x);
        }
    }
    state.rethermalise(kc, tol);
}

} // namespace

void chain_step(LatticeGasState& state, double dt, const KineticConstants& kc) {
    if (!(dt > 0.0)) throw std::domain_error("chain_step: dt must be positive");
    const HopKernel fwd = build_hop_kernel(state, +1);
    const HopKernel bwd = build_hop_kernel(state, -1);
    const std::vector<double> bal_f = balance_factors(fwd);
    const std::vector<double> bal_b = balance_factors(bwd);
    const int L = state.sites;
    const int M = state.bins.count;
    TransferAccum acc(L);

    for (int x = 0; x < L; ++x) {
        for (int i = 0; i < M; ++i) {
            const double k = state.bins.k(i);
            if (k == 0.0) continue;
            const HopKernel& kern = k > 0.0 ? fwd : bwd;
            const double bal = (k > 0.0 ? bal_f : bal_b)[x];
            const double speed = std::fabs(k) / kc.m;
            const double avail = state.N[x] * state.prob(x, i);
            const double e_bin = 0.5 * k * k / kc.m;
            for (int s = 1; s < L; ++s) {
                // channel rate: hop probability spread over the flight time
                const double rate = speed * kern.at(x, s) * bal / (s * kc.a);
                const double dm = avail * rate * dt;
                if (dm == 0.0) continue;
                const int y = wrap(x + (k > 0.0 ? s : -s), L);
                acc.out_m[x] += dm;
                acc.out_pi[x] += dm * k;
                acc.out_e[x] += dm * e_bin;
                acc.in_m[y] += dm;
                acc.in_pi[y] += dm * k;
                acc.in_e[y] += dm * e_bin;
            }
        }
    }
    apply_transfers(state, acc, kc, 1e-13);
    state.time += dt;
}

void chain_step_stochastic(LatticeGasState& state, double dt, const KineticConstants& kc,
                           std::mt19937_64& rng) {
    if (!(dt > 0.0)) throw std::domain_error("chain_step: dt must be positive");
    const HopKernel fwd = build_hop_kernel(state, +1);
    const HopKernel bwd = build_hop_kernel(state, -1);
    const std::vector<double> bal_f = balance_factors(fwd);
    const std::vector<double> bal_b = balance_factors(bwd);
    const int L = state.sites;
    const int M = state.bins.count;
    TransferAccum acc(L);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    for (int x = 0; x < L; ++x) {
        for (int i = 0; i < M; ++i) {
            const double k = state.bins.k(i);
            if (k == 0.0) continue;
            const HopKernel& kern = k > 0.0 ? fwd : bwd;
            const double bal = (k > 0.0 ? bal_f : bal_b)[x];
            const double speed = std::fabs(k) / kc.m;
            const double quantum = state.N[x] * state.prob(x, i);
            const double e_bin = 0.5 * k * k / kc.m;
            for (int s = 1; s < L; ++s) {
                // Bernoulli event with the mean-field expectation
                const double q = speed * kern.at(x, s) * bal / (s * kc.a) * dt;
                if (q >= 1.0) {
                    throw std::domain_error("chain_step: dt too large for stochastic mode");
                }
                if (unit(rng) >= q) continue;
                const int y = wrap(x + (k > 0.0 ? s : -s), L);
                acc.out_m[x] += quantum;
                acc.out_pi[x] += quantum * k;
                acc.out_e[x] += quantum * e_bin;
                acc.in_m[y] += quantum;
                acc.in_pi[y] += quantum * k;
                acc.in_e[y] += quantum * e_bin;
            }
        }
    }
    apply_transfers(state, acc, kc, 1e-13);
    state.time += dt;
}

double lattice_entropy(const LatticeGasState& state, const KineticConstants& kc) {
    const int M = state.bins.count;
    std::vector<double> probs(M + 1);
    double total = 0.0;
    for (int x = 0; x < state.sites; ++x) {
        probs[0] = 1.0 - state.N[x];
        for (int i = 0; i < M; ++i) probs[i + 1] = state.N[x] * state.prob(x, i);
        total += entropy(std::span<const double>(probs), kc.k_B);
    }
    return total;
}

LatticeTotals lattice_totals(const LatticeGasState& state) {
    LatticeTotals t{0.0, 0.0, 0.0};
    for (int x = 0; x < state.sites; ++x) {
        t.mass += state.N[x];
        t.momentum += state.Pi[x];
        t.energy += state.E[x];
    }
    return t;
}

LatticeGasState make_uniform_lattice(int sites, int bin_count, double k_max, double n,
                                     double theta, const KineticConstants& kc) {
    if (!(n > 0.0 && n < 1.0)) throw std::domain_error("lattice: occupation must lie in (0,1)");
    if (!(theta > 0.0)) throw std::domain_error("lattice: temperature must be positive");
    LatticeGasState s;
    s.sites = sites;
    s.bins = MomentumBins::symmetric(bin_count, k_max);
    s.N.assign(sites, n);
    s.Pi.assign(sites, 0.0);
    s.E.assign(sites, n * 0.5 * kc.k_B * theta);
    s.p.assign(static_cast<std::size_t>(sites) * bin_count, 0.0);
    s.validate();
    s.rethermalise(kc);
    return s;
}

LatticeGasState make_theta_bump_lattice(int sites, int bin_count, double k_max, double n,
                                        double theta, double amplitude, double width,
                                        const KineticConstants& kc) {
    if (std::fabs(amplitude) > 0.10 * theta) {
        throw std::domain_error("lattice: bump amplitude above 10% of the background");
    }
    LatticeGasState s = make_uniform_lattice(sites, bin_count, k_max, n, theta, kc);
    // isobaric: N * Theta held constant so the bump relaxes diffusively
    const double x0 = 0.5 * sites;
    for (int x = 0; x < sites; ++x) {
        const double dx = (x + 0.5) - x0;
        const double th = theta + amplitude * std::exp(-0.5 * dx * dx / (width * width));
        const double nx = n * theta / th;
        s.N[x] = nx;
        s.Pi[x] = 0.0;
        s.E[x] = nx * 0.5 * kc.k_B * th;
    }
    s.validate();
    s.rethermalise(kc);
    return s;
}

LatticeSeries relax_experiment(LatticeGasState state, int steps, double dt, int output_every,
                               const KineticConstants& kc) {
    if (output_every < 1) throw std::domain_error("relax: output cadence must be positive");
    LatticeSeries series;
    auto record = [&]() {
        series.t.push_back(state.time);
        series.entropy.push_back(lattice_entropy(state, kc));
        std::vector<double> n(state.sites), u(state.sites), th(state.sites);
        for (int x = 0; x < state.sites; ++x) {
            n[x] = state.N[x];
            u[x] = state.site_u(x, kc);
            th[x] = state.site_theta(x, kc);
        }
        series.N.push_back(std::move(n));
        series.u.push_back(std::move(u));
        series.theta.push_back(std::move(th));
    };
    record();
    for (int step = 1; step <= steps; ++step) {
        chain_step(state, dt, kc);
        if (step % output_every == 0 || step == steps) record();
    }
    return series;
}

} // namespace maxgas
