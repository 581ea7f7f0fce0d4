#pragma once

#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "maxgas/constants.hpp"

namespace maxgas {

// Raised when a site's moments admit no distribution (thermal energy <= 0)
// or the exponential-family fit cannot reach them on the given bins.
struct DegenerateMomentsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when a time step drives an occupation outside (0,1).
struct LatticePositivityError : std::runtime_error {
    explicit LatticePositivityError(const std::string& what, int site_)
        : std::runtime_error(what), site(site_) {}
    int site;
};

// M momentum bins placed symmetrically about zero, no zero bin (M even).
struct MomentumBins {
    int count = 0;
    double dk = 0.0;

    double k(int i) const { return dk * (i - 0.5 * (count - 1)); }
    static MomentumBins symmetric(int m, double k_max);
};

// Mean-field occupation chain on a periodic 1-D lattice. The per-site
// moments (N, Pi, E) are the primary variables; the bin distribution p is a
// cache regenerated from them, so conservation bookkeeping is exact.
struct LatticeGasState {
    int sites = 0;
    MomentumBins bins;
    double time = 0.0;
    std::vector<double> N;   // occupation probability per site, in (0,1)
    std::vector<double> Pi;  // momentum carried by the site, N * <k>
    std::vector<double> E;   // kinetic energy carried by the site
    std::vector<double> p;   // bin distribution cache, sites*count row-major

    double prob(int x, int i) const { return p[static_cast<std::size_t>(x) * bins.count + i]; }
    double site_u(int x, const KineticConstants& kc) const;
    double site_theta(int x, const KineticConstants& kc) const;
    void rethermalise(const KineticConstants& kc, double tol = 1e-12);
    void validate() const;
};

// Aggregated hop-length distribution per source site for one direction.
// hop(x,s) is the probability of a flight of s lattice spacings (s = 0 is
// stay-put); each row sums to one exactly after wrap aggregation.
struct HopKernel {
    int direction = 1;  // +1 or -1 along the chain
    int sites = 0;
    double wrap_factor = 0.0;  // product of all hole probabilities
    std::vector<double> hop;   // sites*sites row-major, [x*sites + s]

    double at(int x, int s) const { return hop[static_cast<std::size_t>(x) * sites + s]; }
    // Convex mixture of transpositions x <-> x+s*direction weighted by the
    // hop distribution of source x: doubly stochastic by construction.
    std::vector<double> two_point_operator(int x) const;
};

HopKernel build_hop_kernel(const LatticeGasState& state, int direction);

struct SiteMoments {
    double N;
    double Pi;
    double E;
};

// Maximum-entropy bin distribution matching the per-particle momentum and
// energy of the given moments: p_i proportional to exp(alpha k - beta k^2/2m).
std::vector<double> thermalise(const SiteMoments& moments, const MomentumBins& bins,
                               const KineticConstants& kc, double tol = 1e-12,
                               int max_iter = 200);

// One mean-field update: transported (N, Pi, E) redistributed along the hop
// kernels at rates |k| hop(x,s)/(s a m), then every site rethermalised.
void chain_step(LatticeGasState& state, double dt, const KineticConstants& kc);

// Seeded stochastic unraveling of the same generator: each transfer channel
// fires as a Bernoulli event with the mean-field expectation.
void chain_step_stochastic(LatticeGasState& state, double dt, const KineticConstants& kc,
                           std::mt19937_64& rng);

// Total site-ensemble entropy: sum over sites of the entropy of the
// distribution {1-N, N p_1, ..., N p_M}.
double lattice_entropy(const LatticeGasState& state, const KineticConstants& kc);

struct LatticeTotals {
    double mass;
    double momentum;
    double energy;
};
LatticeTotals lattice_totals(const LatticeGasState& state);

LatticeGasState make_uniform_lattice(int sites, int bin_count, double k_max, double n,
                                     double theta, const KineticConstants& kc);

// Gaussian temperature bump on an otherwise uniform background; isobaric
// profile so the decay is diffusive rather than acoustic.
LatticeGasState make_theta_bump_lattice(int sites, int bin_count, double k_max, double n,
                                        double theta, double amplitude, double width,
                                        const KineticConstants& kc);

struct LatticeSeries {
    std::vector<double> t;
    std::vector<double> entropy;
    std::vector<std::vector<double>> N;      // snapshot -> per-site
    std::vector<std::vector<double>> u;
    std::vector<std::vector<double>> theta;
};

LatticeSeries relax_experiment(LatticeGasState state, int steps, double dt, int output_every,
                               const KineticConstants& kc);

} // namespace maxgas
