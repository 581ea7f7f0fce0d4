#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "maxgas/constants.hpp"
#include "maxgas/fluid.hpp"
#include "maxgas/lattice.hpp"

namespace maxgas {

// Invalid or inconsistent configuration; `details` carries one entry per
// offending field so every problem is reported in a single pass.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what, std::vector<std::string> details_ = {})
        : std::runtime_error(what), details(std::move(details_)) {}
    std::vector<std::string> details;
};

enum class RunMode { transport, fluid, lattice, verify };

struct InitialCondition {
    std::string profile = "uniform";  // uniform|gaussian-bump|shear-layer|sod-like|sinusoid
    double rho = 1.0;
    double theta = 1.0;
    std::array<double, 3> velocity{0.0, 0.0, 0.0};
    double amplitude = 0.0;
    double width = 0.1;
    double wavelength = 1.0;
    double u0 = 0.0;
    double rho_left = 1.0, rho_right = 0.5;
    double theta_left = 1.0, theta_right = 0.8;
    std::string field = "rho";  // sinusoid target field
};

struct LatticeConfig {
    int sites = 64;
    int bins = 64;
    double k_max = 6.0;
    double occupation = 0.3;
    double theta = 1.0;
    std::string profile = "uniform";  // uniform | gaussian-bump
    double amplitude = 0.0;
    double width = 4.0;
    double dt = 0.0;
    int steps = 0;
    int output_every = 1;
    bool stochastic = false;
};

struct RunConfig {
    double t_end = 0.0;
    int outputs = 10;
    double cfl = 0.4;
    double beta_d = 0.2;
};

struct ScenarioConfig {
    RunMode mode = RunMode::transport;
    KineticConstants constants;
    Grid grid;
    InitialCondition initial;
    RunConfig run;
    LatticeConfig lattice;
    std::uint64_t seed = 0;
    double quad_tol = 1e-10;
    double kappa_max = 12.0;
    std::string config_hash;  // provenance hash of the canonical document
};

// Strict parse: unknown keys are rejected (with a nearest-known suggestion),
// physical constants have no silent defaults, and all validation problems
// are aggregated into one ConfigError.
ScenarioConfig parse_config(const std::string& json_text);
ScenarioConfig load_config_file(const std::string& path);

// Builds the initial fluid state described by the config.
FieldState build_initial_state(const ScenarioConfig& cfg);
LatticeGasState build_initial_lattice(const ScenarioConfig& cfg);

// Runs the configured scenario, writing artifacts into out_dir.
// Returns 0 on success, 4 when mode=verify finds a failing invariant;
// module errors propagate as exceptions for the caller to map to exit codes.
int run_scenario(const ScenarioConfig& cfg, const std::string& out_dir);

// Converts run artifacts in run_dir into plain two-column plot files plus an
// index manifest, written under out_dir.
void emit_plot_data(const std::string& run_dir, const std::string& out_dir);

} // namespace maxgas
