#include "maxgas/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "maxgas/kinetic.hpp"
#include "maxgas/quadrature.hpp"
#include "maxgas/thermo.hpp"
#include "maxgas/transport.hpp"
#include "maxgas/util.hpp"
#include "maxgas/version.hpp"

namespace maxgas {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::size_t levenshtein(const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

std::string nearest_key(const std::string& key, const std::set<std::string>& known) {
    std::string best;
    std::size_t best_d = key.size();
    for (const auto& cand : known) {
        const std::size_t d = levenshtein(key, cand);
        if (d < best_d) {
            best_d = d;
            best = cand;
        }
    }
    if (!best.empty() && best_d <= std::max<std::size_t>(2, key.size() / 3)) return best;
    return {};
}

// Wraps one JSON object for strict reading: every get marks its key as
// known, and finish() reports leftovers with a nearest-key suggestion.
class ObjectReader {
  public:
    ObjectReader(const json& j, std::string path, std::vector<std::string>& errors)
        : j_(j), path_(std::move(path)), errors_(&errors) {
        if (!j_.is_object()) {
            errors_->push_back(path_ + ": expected an object");
            broken_ = true;
        }
    }

    bool has(const std::string& key) {
        known_.insert(key);
        return !broken_ && j_.contains(key);
    }

    const json* require(const std::string& key) {
        known_.insert(key);
        if (broken_) return nullptr;
        if (!j_.contains(key)) {
            errors_->push_back(path_ + ": missing required key '" + key + "'");
            return nullptr;
        }
        return &j_.at(key);
    }

    const json* optional(const std::string& key) {
        known_.insert(key);
        if (broken_ || !j_.contains(key)) return nullptr;
        return &j_.at(key);
    }

    double number(const std::string& key, double fallback, bool required = false) {
        const json* v = required ? require(key) : optional(key);
        if (!v) return fallback;
        if (!v->is_number()) {
            errors_->push_back(path_ + "." + key + ": expected a number");
            return fallback;
        }
        return v->get<double>();
    }

    std::int64_t integer(const std::string& key, std::int64_t fallback, bool required = false) {
        const json* v = required ? require(key) : optional(key);
        if (!v) return fallback;
        if (!v->is_number_integer()) {
            errors_->push_back(path_ + "." + key + ": expected an integer");
            return fallback;
        }
        return v->get<std::int64_t>();
    }

    bool boolean(const std::string& key, bool fallback) {
        const json* v = optional(key);
        if (!v) return fallback;
        if (!v->is_boolean()) {
            errors_->push_back(path_ + "." + key + ": expected a boolean");
            return fallback;
        }
        return v->get<bool>();
    }

    std::string text(const std::string& key, const std::string& fallback,
                     bool required = false) {
        const json* v = required ? require(key) : optional(key);
        if (!v) return fallback;
        if (!v->is_string()) {
            errors_->push_back(path_ + "." + key + ": expected a string");
            return fallback;
        }
        return v->get<std::string>();
    }

    void finish() {
        if (broken_) return;
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (known_.count(it.key())) continue;
            std::string msg = path_ + ": unknown key '" + it.key() + "'";
            const std::string hint = nearest_key(it.key(), known_);
            if (!hint.empty()) msg += " (did you mean '" + hint + "'?)";
            errors_->push_back(msg);
        }
    }

    const json& raw() const { return j_; }
    const std::string& path() const { return path_; }
    bool broken() const { return broken_; }

  private:
    const json& j_;
    std::string path_;
    std::vector<std::string>* errors_;
    std::set<std::string> known_;
    bool broken_ = false;
};

KineticConstants parse_constants(const json& j, std::vector<std::string>& errors) {
    ObjectReader r(j, "constants", errors);
    KineticConstants kc;
    const bool nondim = r.boolean("nondimensional", false);
    if (nondim) {
        kc = nondimensional_constants(r.number("sigma", 1.0));
        // explicit overrides are still unit values unless given
        kc.a = r.number("a", kc.a);
        kc.epsilon = r.number("epsilon", kc.epsilon);
    } else {
        // physics inputs carry no silent defaults
        kc.nondimensional = false;
        kc.m = r.number("m", 1.0, true);
        kc.k_B = r.number("k_B", 1.0, true);
        kc.sigma = r.number("sigma", 1.0, true);
        kc.a = r.number("a", 1.0, true);
        kc.epsilon = r.number("epsilon", 1.0, true);
    }
    r.finish();
    if (!(kc.sigma > 0.0)) {
        errors.push_back("constants.sigma: must be positive (the transport moments divide by it)");
    }
    if (!(kc.m > 0.0)) errors.push_back("constants.m: must be positive");
    if (!(kc.k_B > 0.0)) errors.push_back("constants.k_B: must be positive");
    if (!(kc.a > 0.0)) errors.push_back("constants.a: must be positive");
    if (!(kc.epsilon > 0.0)) errors.push_back("constants.epsilon: must be positive");
    return kc;
}

Grid parse_grid(const json& j, std::vector<std::string>& errors) {
    ObjectReader r(j, "grid", errors);
    Grid g;
    g.dim = static_cast<int>(r.integer("dimension", 1, true));
    if (g.dim < 1 || g.dim > 3) {
        errors.push_back("grid.dimension: must be 1, 2 or 3");
        g.dim = 1;
    }
    auto read_axis_array = [&](const char* key, auto&& assign, bool required) {
        const json* v = required ? r.require(key) : r.optional(key);
        if (!v) return false;
        if (!v->is_array() || static_cast<int>(v->size()) != g.dim) {
            errors.push_back(std::string("grid.") + key + ": expected an array of length " +
                             std::to_string(g.dim));
            return false;
        }
        for (int ax = 0; ax < g.dim; ++ax) assign(ax, (*v)[ax]);
        return true;
    };
    read_axis_array(
        "cells",
        [&](int ax, const json& v) {
            if (!v.is_number_integer() || v.get<std::int64_t>() < 4) {
                errors.push_back("grid.cells: each active axis needs an integer >= 4");
            } else {
                g.n[ax] = static_cast<int>(v.get<std::int64_t>());
            }
        },
        true);
    read_axis_array(
        "length",
        [&](int ax, const json& v) {
            if (!v.is_number() || !(v.get<double>() > 0.0)) {
                errors.push_back("grid.length: each entry must be a positive number");
            } else {
                g.length[ax] = v.get<double>();
            }
        },
        true);
    if (r.has("boundary")) {
        read_axis_array(
            "boundary",
            [&](int ax, const json& v) {
                const std::string b = v.is_string() ? v.get<std::string>() : std::string();
                if (b == "periodic") {
                    g.bc[ax] = Boundary::periodic;
                } else if (b == "reflective") {
                    g.bc[ax] = Boundary::reflective;
                } else {
                    errors.push_back("grid.boundary: entries must be 'periodic' or 'reflective'");
                }
            },
            false);
    }
    r.finish();
    return g;
}

InitialCondition parse_initial(const json& j, int dim, std::vector<std::string>& errors) {
    ObjectReader r(j, "initial", errors);
    InitialCondition ic;
    ic.profile = r.text("profile", "", true);
    const std::set<std::string> profiles{"uniform", "gaussian-bump", "shear-layer", "sod-like",
                                         "sinusoid"};
    if (!ic.profile.empty() && !profiles.count(ic.profile)) {
        std::string msg = "initial.profile: unknown profile '" + ic.profile + "'";
        const std::string hint = nearest_key(ic.profile, profiles);
        if (!hint.empty()) msg += " (did you mean '" + hint + "'?)";
        errors.push_back(msg);
    }

    auto velocity = [&]() {
        const json* v = r.optional("velocity");
        if (!v) return;
        if (!v->is_array() || static_cast<int>(v->size()) != dim) {
            errors.push_back("initial.velocity: expected an array of length " +
                             std::to_string(dim));
            return;
        }
        for (int ax = 0; ax < dim; ++ax) {
            if (!(*v)[ax].is_number()) {
                errors.push_back("initial.velocity: entries must be numbers");
                return;
            }
            ic.velocity[ax] = (*v)[ax].get<double>();
        }
    };

    if (ic.profile == "uniform") {
        ic.rho = r.number("rho", 1.0, true);
        ic.theta = r.number("theta", 1.0, true);
        velocity();
    } else if (ic.profile == "gaussian-bump") {
        ic.rho = r.number("rho", 1.0, true);
        ic.theta = r.number("theta", 1.0, true);
        ic.amplitude = r.number("amplitude", 0.0, true);
        ic.width = r.number("width", 0.1, true);
        velocity();
    } else if (ic.profile == "shear-layer") {
        ic.rho = r.number("rho", 1.0, true);
        ic.theta = r.number("theta", 1.0, true);
        ic.u0 = r.number("u0", 0.0, true);
        ic.width = r.number("width", 0.1, true);
    } else if (ic.profile == "sod-like") {
        ic.rho_left = r.number("rho_left", 1.0, true);
        ic.rho_right = r.number("rho_right", 0.5, true);
        ic.theta_left = r.number("theta_left", 1.0, true);
        ic.theta_right = r.number("theta_right", 0.8, true);
    } else if (ic.profile == "sinusoid") {
        ic.rho = r.number("rho", 1.0, true);
        ic.theta = r.number("theta", 1.0, true);
        ic.amplitude = r.number("amplitude", 0.0, true);
        ic.wavelength = r.number("wavelength", 1.0, true);
        ic.field = r.text("field", "rho");
        if (ic.field != "rho" && ic.field != "theta") {
            errors.push_back("initial.field: must be 'rho' or 'theta'");
        }
        velocity();
    }
    r.finish();

    for (double v : {ic.rho, ic.theta, ic.rho_left, ic.rho_right, ic.theta_left, ic.theta_right}) {
        if (!(v > 0.0)) {
            errors.push_back("initial: densities and temperatures must be positive");
            break;
        }
    }
    if ((ic.profile == "gaussian-bump" || ic.profile == "shear-layer") && !(ic.width > 0.0)) {
        errors.push_back("initial.width: must be positive");
    }
    if (ic.profile == "sinusoid" && !(ic.wavelength > 0.0)) {
        errors.push_back("initial.wavelength: must be positive");
    }
    return ic;
}

RunConfig parse_run(const json& j, std::vector<std::string>& errors) {
    ObjectReader r(j, "run", errors);
    RunConfig rc;
    rc.t_end = r.number("t_end", 0.0, true);
    rc.outputs = static_cast<int>(r.integer("outputs", 10));
    rc.cfl = r.number("cfl", 0.4);
    rc.beta_d = r.number("beta_d", 0.2);
    r.finish();
    if (!(rc.t_end > 0.0)) errors.push_back("run.t_end: must be positive");
    if (rc.outputs < 1) errors.push_back("run.outputs: must be at least 1");
    if (!(rc.cfl > 0.0 && rc.cfl <= 1.0)) errors.push_back("run.cfl: must lie in (0, 1]");
    if (!(rc.beta_d > 0.0 && rc.beta_d <= 0.5)) {
        errors.push_back("run.beta_d: must lie in (0, 0.5]");
    }
    return rc;
}

LatticeConfig parse_lattice(const json& j, std::vector<std::string>& errors) {
    ObjectReader r(j, "lattice", errors);
    LatticeConfig lc;
    lc.sites = static_cast<int>(r.integer("sites", 64, true));
    lc.bins = static_cast<int>(r.integer("bins", 64));
    lc.k_max = r.number("k_max", 6.0);
    lc.occupation = r.number("occupation", 0.3, true);
    lc.theta = r.number("theta", 1.0, true);
    lc.profile = r.text("profile", "uniform");
    lc.dt = r.number("dt", 0.0, true);
    lc.steps = static_cast<int>(r.integer("steps", 0, true));
    lc.output_every = static_cast<int>(r.integer("output_every", 1));
    lc.stochastic = r.boolean("stochastic", false);
    if (lc.profile == "gaussian-bump") {
        lc.amplitude = r.number("amplitude", 0.0, true);
        lc.width = r.number("width", 4.0, true);
    } else if (lc.profile != "uniform") {
        errors.push_back("lattice.profile: must be 'uniform' or 'gaussian-bump'");
    }
    r.finish();
    if (lc.sites < 4) errors.push_back("lattice.sites: must be at least 4");
    if (lc.bins < 4 || lc.bins % 2 != 0) {
        errors.push_back("lattice.bins: must be even and at least 4");
    }
    if (!(lc.k_max > 0.0)) errors.push_back("lattice.k_max: must be positive");
    if (!(lc.occupation > 0.0 && lc.occupation < 1.0)) {
        errors.push_back("lattice.occupation: must lie strictly in (0, 1)");
    }
    if (!(lc.theta > 0.0)) errors.push_back("lattice.theta: must be positive");
    if (!(lc.dt > 0.0)) errors.push_back("lattice.dt: must be positive");
    if (lc.steps < 1) errors.push_back("lattice.steps: must be at least 1");
    if (lc.output_every < 1) errors.push_back("lattice.output_every: must be at least 1");
    return lc;
}

std::string mode_name(RunMode m) {
    switch (m) {
        case RunMode::transport: return "transport";
        case RunMode::fluid: return "fluid";
        case RunMode::lattice: return "lattice";
        case RunMode::verify: return "verify";
    }
    return "?";
}

json provenance_json(const ScenarioConfig& cfg) {
    json p;
    p["version"] = kVersion;
    p["config"] = cfg.config_hash;
    p["quad_tol"] = cfg.quad_tol;
    p["kappa_max"] = cfg.kappa_max;
    return p;
}

std::string provenance_header(const ScenarioConfig& cfg) {
    std::ostringstream os;
    os << "# maxwellgas " << kVersion << "\n";
    os << "# config " << cfg.config_hash << "\n";
    os << "# quad_tol " << format_g17(cfg.quad_tol) << " kappa_max " << format_g17(cfg.kappa_max)
       << "\n";
    return os.str();
}

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file " + path.string());
    out << content;
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

void write_json_file(const fs::path& path, const json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

std::string fluid_snapshot_csv(const ScenarioConfig& cfg, const FieldState& s) {
    const Grid& g = s.grid;
    std::ostringstream os;
    os << provenance_header(cfg);
    os << "t,x";
    if (g.dim >= 2) os << ",y";
    if (g.dim >= 3) os << ",z";
    os << ",rho,ux";
    if (g.dim >= 2) os << ",uy";
    if (g.dim >= 3) os << ",uz";
    os << ",theta\n";
    for (int k = 0; k < g.n[2]; ++k) {
        for (int j = 0; j < g.n[1]; ++j) {
            for (int i = 0; i < g.n[0]; ++i) {
                const std::size_t c = g.index(i, j, k);
                os << format_g17(s.time) << ',' << format_g17((i + 0.5) * g.dx(0));
                if (g.dim >= 2) os << ',' << format_g17((j + 0.5) * g.dx(1));
                if (g.dim >= 3) os << ',' << format_g17((k + 0.5) * g.dx(2));
                os << ',' << format_g17(s.rho[c]) << ',' << format_g17(s.u[0][c]);
                if (g.dim >= 2) os << ',' << format_g17(s.u[1][c]);
                if (g.dim >= 3) os << ',' << format_g17(s.u[2][c]);
                os << ',' << format_g17(s.theta[c]) << '\n';
            }
        }
    }
    return os.str();
}

std::string lattice_series_csv(const ScenarioConfig& cfg, const LatticeSeries& series,
                               double spacing) {
    std::ostringstream os;
    os << provenance_header(cfg);
    os << "t,x,N,u,theta,entropy_total\n";
    for (std::size_t snap = 0; snap < series.t.size(); ++snap) {
        for (std::size_t x = 0; x < series.N[snap].size(); ++x) {
            os << format_g17(series.t[snap]) << ',' << format_g17((x + 0.5) * spacing) << ','
               << format_g17(series.N[snap][x]) << ',' << format_g17(series.u[snap][x]) << ','
               << format_g17(series.theta[snap][x]) << ',' << format_g17(series.entropy[snap])
               << '\n';
        }
    }
    return os.str();
}

int run_transport(const ScenarioConfig& cfg, const fs::path& out) {
    const TransportTable tab = lambda_moments(cfg.constants, cfg.quad_tol, cfg.kappa_max);
    const PositivityCertificate cert = fourier_positivity_certificate();
    json j;
    j["provenance"] = provenance_json(cfg);
    j["mu1"] = tab.mu1;
    j["mu2"] = tab.mu2;
    j["mu3"] = tab.mu3;
    j["lambda1"] = tab.lambda1;
    j["lambda2"] = tab.lambda2;
    j["lambda3"] = tab.lambda3;
    j["lambda_shear"] = tab.lambda_shear;
    j["lambda_fourier"] = tab.lambda_fourier;
    j["lambda_dufour"] = tab.lambda_dufour;
    j["fourier_positivity"] = {{"positive", cert.positive},
                               {"minimum", cert.minimum},
                               {"argmin_kappa", cert.argmin_kappa}};
    write_json_file(out / "transport_table.json", j);
    return 0;
}

int run_fluid(const ScenarioConfig& cfg, const fs::path& out) {
    FieldState s = build_initial_state(cfg);
    const TransportTable tab = lambda_moments(cfg.constants, cfg.quad_tol, cfg.kappa_max);
    const ConservedTotals before = conserved_totals(s, cfg.constants);

    std::vector<std::string> artifacts;
    auto snapshot_name = [](int k) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "fluid_%04d.csv", k);
        return std::string(buf);
    };
    write_text_file(out / snapshot_name(0), fluid_snapshot_csv(cfg, s));
    artifacts.push_back(snapshot_name(0));

    long steps = 0;
    for (int k = 1; k <= cfg.run.outputs; ++k) {
        const double t_target = cfg.run.t_end * k / cfg.run.outputs;
        while (s.time < t_target * (1.0 - 1e-14)) {
            const double bound = stable_dt(s, tab, cfg.constants, cfg.run.cfl, cfg.run.beta_d);
            const double dt = std::min(bound, t_target - s.time);
            step(s, dt, tab, cfg.constants, cfg.run.cfl, cfg.run.beta_d);
            ++steps;
        }
        write_text_file(out / snapshot_name(k), fluid_snapshot_csv(cfg, s));
        artifacts.push_back(snapshot_name(k));
    }

    const ConservedTotals after = conserved_totals(s, cfg.constants);
    json j;
    j["provenance"] = provenance_json(cfg);
    j["mode"] = "fluid";
    j["steps"] = steps;
    j["final_time"] = s.time;
    j["totals_initial"] = {{"mass", before.mass},
                           {"momentum", {before.momentum.x, before.momentum.y, before.momentum.z}},
                           {"energy", before.energy}};
    j["totals_final"] = {{"mass", after.mass},
                         {"momentum", {after.momentum.x, after.momentum.y, after.momentum.z}},
                         {"energy", after.energy}};
    j["artifacts"] = artifacts;
    write_json_file(out / "run_summary.json", j);
    return 0;
}

int run_lattice(const ScenarioConfig& cfg, const fs::path& out) {
    LatticeGasState state = build_initial_lattice(cfg);
    const LatticeConfig& lc = cfg.lattice;
    const LatticeTotals before = lattice_totals(state);

    LatticeSeries series;
    if (lc.stochastic) {
        std::mt19937_64 rng(cfg.seed);
        auto record = [&]() {
            series.t.push_back(state.time);
            series.entropy.push_back(lattice_entropy(state, cfg.constants));
            std::vector<double> n(state.sites), u(state.sites), th(state.sites);
            for (int x = 0; x < state.sites; ++x) {
                n[x] = state.N[x];
                u[x] = state.site_u(x, cfg.constants);
                th[x] = state.site_theta(x, cfg.constants);
            }
            series.N.push_back(std::move(n));
            series.u.push_back(std::move(u));
            series.theta.push_back(std::move(th));
        };
        record();
        for (int stepi = 1; stepi <= lc.steps; ++stepi) {
            chain_step_stochastic(state, lc.dt, cfg.constants, rng);
            if (stepi % lc.output_every == 0 || stepi == lc.steps) record();
        }
    } else {
        series = relax_experiment(std::move(state), lc.steps, lc.dt, lc.output_every,
                                  cfg.constants);
    }

    write_text_file(out / "lattice.csv", lattice_series_csv(cfg, series, cfg.constants.a));

    json j;
    j["provenance"] = provenance_json(cfg);
    j["mode"] = "lattice";
    j["steps"] = lc.steps;
    j["stochastic"] = lc.stochastic;
    if (lc.stochastic) j["seed"] = cfg.seed;
    j["totals_initial"] = {{"mass", before.mass}, {"momentum", before.momentum},
                           {"energy", before.energy}};
    const std::size_t last = series.t.size() - 1;
    j["final_time"] = series.t[last];
    j["entropy_first"] = series.entropy.front();
    j["entropy_last"] = series.entropy.back();
    j["artifacts"] = {"lattice.csv"};
    write_json_file(out / "run_summary.json", j);
    return 0;
}

struct VerifyCheck {
    std::string name;
    bool pass;
    double measured;
    double tolerance;
};

std::vector<VerifyCheck> run_verify_suite(const ScenarioConfig& cfg);

int run_verify(const ScenarioConfig& cfg, const fs::path& out) {
    const std::vector<VerifyCheck> checks = run_verify_suite(cfg);
    bool all_pass = true;
    json arr = json::array();
    for (const auto& c : checks) {
        all_pass = all_pass && c.pass;
        arr.push_back({{"name", c.name},
                       {"pass", c.pass},
                       {"measured", c.measured},
                       {"tolerance", c.tolerance}});
    }
    json j;
    j["provenance"] = provenance_json(cfg);
    j["mode"] = "verify";
    j["pass"] = all_pass;
    j["checks"] = arr;
    write_json_file(out / "verify_report.json", j);
    return all_pass ? 0 : 4;
}

} // namespace

ScenarioConfig parse_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }

    std::vector<std::string> errors;
    ObjectReader root(doc, "config", errors);
    ScenarioConfig cfg;

    const std::string mode = root.text("mode", "", true);
    const std::map<std::string, RunMode> modes{{"transport", RunMode::transport},
                                               {"fluid", RunMode::fluid},
                                               {"lattice", RunMode::lattice},
                                               {"verify", RunMode::verify}};
    const auto mode_it = modes.find(mode);
    if (mode_it == modes.end()) {
        if (!mode.empty()) {
            std::set<std::string> names;
            for (const auto& [n, m] : modes) names.insert(n);
            std::string msg = "config.mode: unknown mode '" + mode + "'";
            const std::string hint = nearest_key(mode, names);
            if (!hint.empty()) msg += " (did you mean '" + hint + "'?)";
            errors.push_back(msg);
        }
    } else {
        cfg.mode = mode_it->second;
    }

    if (const json* c = root.require("constants")) cfg.constants = parse_constants(*c, errors);

    if (const json* q = root.optional("quadrature")) {
        ObjectReader r(*q, "quadrature", errors);
        cfg.quad_tol = r.number("tol", cfg.quad_tol);
        cfg.kappa_max = r.number("kappa_max", cfg.kappa_max);
        r.finish();
        if (!(cfg.quad_tol > 0.0)) errors.push_back("quadrature.tol: must be positive");
        if (!(cfg.kappa_max >= 10.0)) errors.push_back("quadrature.kappa_max: must be >= 10");
    }

    const json* seed = root.optional("seed");
    if (seed) {
        if (!seed->is_number_unsigned()) {
            errors.push_back("config.seed: expected a non-negative integer");
        } else {
            cfg.seed = seed->get<std::uint64_t>();
        }
    }

    const bool is_fluid = mode_it != modes.end() && cfg.mode == RunMode::fluid;
    const bool is_lattice = mode_it != modes.end() && cfg.mode == RunMode::lattice;

    if (is_fluid) {
        if (const json* g = root.require("grid")) cfg.grid = parse_grid(*g, errors);
        if (const json* i = root.require("initial")) {
            cfg.initial = parse_initial(*i, cfg.grid.dim, errors);
        }
        if (const json* rn = root.require("run")) cfg.run = parse_run(*rn, errors);
    } else {
        for (const char* key : {"grid", "initial", "run"}) {
            if (root.has(key)) {
                errors.push_back(std::string("config.") + key + ": only valid for mode=fluid");
            }
        }
    }

    if (is_lattice) {
        if (const json* l = root.require("lattice")) cfg.lattice = parse_lattice(*l, errors);
    } else if (root.has("lattice")) {
        errors.push_back("config.lattice: only valid for mode=lattice");
    }

    root.finish();

    if (!errors.empty()) {
        std::ostringstream os;
        os << "invalid configuration (" << errors.size() << " problem"
           << (errors.size() == 1 ? "" : "s") << ")";
        throw ConfigError(os.str(), errors);
    }

    cfg.config_hash = fnv1a_hex(doc.dump());
    return cfg;
}

ScenarioConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

FieldState build_initial_state(const ScenarioConfig& cfg) {
    const Grid& g = cfg.grid;
    FieldState s = FieldState::zeros(g);
    const InitialCondition& ic = cfg.initial;

    for (int k = 0; k < g.n[2]; ++k) {
        for (int j = 0; j < g.n[1]; ++j) {
            for (int i = 0; i < g.n[0]; ++i) {
                const std::size_t c = g.index(i, j, k);
                const double x = (i + 0.5) * g.dx(0);
                double rho = ic.rho, theta = ic.theta;
                Vec3 u{ic.velocity[0], ic.velocity[1], ic.velocity[2]};

                if (ic.profile == "gaussian-bump") {
                    // isobaric temperature bump centred in the domain
                    double r2 = 0.0;
                    const double coords[3] = {x, (j + 0.5) * g.dx(1), (k + 0.5) * g.dx(2)};
                    for (int ax = 0; ax < g.dim; ++ax) {
                        const double d = coords[ax] - 0.5 * g.length[ax];
                        r2 += d * d;
                    }
                    const double th = ic.theta + ic.amplitude *
                                                     std::exp(-0.5 * r2 / (ic.width * ic.width));
                    rho = ic.rho * ic.theta / th;
                    theta = th;
                } else if (ic.profile == "shear-layer") {
                    // transverse velocity layer varying along x
                    u = Vec3{0.0, ic.u0 * std::tanh((x - 0.5 * g.length[0]) / ic.width), 0.0};
                } else if (ic.profile == "sod-like") {
                    const bool left = x < 0.5 * g.length[0];
                    rho = left ? ic.rho_left : ic.rho_right;
                    theta = left ? ic.theta_left : ic.theta_right;
                    u = Vec3{0.0, 0.0, 0.0};
                } else if (ic.profile == "sinusoid") {
                    const double wave = std::sin(2.0 * std::acos(-1.0) * x / ic.wavelength);
                    if (ic.field == "rho") {
                        rho = ic.rho * (1.0 + ic.amplitude * wave);
                    } else {
                        theta = ic.theta * (1.0 + ic.amplitude * wave);
                    }
                }

                s.rho[c] = rho;
                s.theta[c] = theta;
                s.u[0][c] = u.x;
                s.u[1][c] = u.y;
                s.u[2][c] = u.z;
            }
        }
    }
    s.require_positive();
    return s;
}

LatticeGasState build_initial_lattice(const ScenarioConfig& cfg) {
    const LatticeConfig& lc = cfg.lattice;
    if (lc.profile == "gaussian-bump") {
        return make_theta_bump_lattice(lc.sites, lc.bins, lc.k_max, lc.occupation, lc.theta,
                                       lc.amplitude, lc.width, cfg.constants);
    }
    return make_uniform_lattice(lc.sites, lc.bins, lc.k_max, lc.occupation, lc.theta,
                                cfg.constants);
}

int run_scenario(const ScenarioConfig& cfg, const std::string& out_dir) {
    const fs::path out(out_dir);
    fs::create_directories(out);
    switch (cfg.mode) {
        case RunMode::transport: return run_transport(cfg, out);
        case RunMode::fluid: return run_fluid(cfg, out);
        case RunMode::lattice: return run_lattice(cfg, out);
        case RunMode::verify: return run_verify(cfg, out);
    }
    throw std::logic_error("unreachable mode " + mode_name(cfg.mode));
}

namespace {

// ---- verify suite ---------------------------------------------------------

// deterministic pseudo-random stream for the randomized invariants
struct SplitMix {
    std::uint64_t s;
    double next() {
        s += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = s;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        z = z ^ (z >> 31);
        return (z >> 11) * 0x1.0p-53;
    }
    double range(double lo, double hi) { return lo + (hi - lo) * next(); }
};

std::vector<VerifyCheck> run_verify_suite(const ScenarioConfig& cfg) {
    std::vector<VerifyCheck> checks;
    const KineticConstants& kc = cfg.constants;
    const TransportTable tab = lambda_moments(kc, cfg.quad_tol, cfg.kappa_max);

    {
        const double pi = std::acos(-1.0);
        double worst = std::fabs(bessel_like_In(1, 0.0) - 1.0);
        worst = std::max(worst, std::fabs(bessel_like_In(0, 0.0) - std::sqrt(pi / 2.0)));
        worst = std::max(worst, std::fabs(bessel_like_In(3, 0.0) - 2.0));
        worst = std::max(worst, std::fabs(collision_F(0.0) - 0.25));
        checks.push_back({"special_function_values", worst <= 1e-8, worst, 1e-8});
    }
    {
        const PositivityCertificate cert = fourier_positivity_certificate();
        const double err = std::fabs(cert.minimum - 15.0 / 16.0);
        const bool pass = cert.positive && err <= 1e-12 && tab.lambda_fourier > 0.0;
        checks.push_back({"fourier_positivity", pass, err, 1e-12});
    }
    {
        // random velocity gradients: deviatoric stress must be traceless
        SplitMix rng{2026};
        double worst = 0.0;
        for (int trial = 0; trial < 32; ++trial) {
            Mat3 gradu;
            double scale = 0.0;
            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 3; ++j) {
                    gradu[i][j] = rng.range(-3.0, 3.0);
                    scale += std::fabs(gradu[i][j]);
                }
            }
            const Mat3 tau = viscous_stress(gradu, rng.range(0.2, 4.0), tab);
            worst = std::max(worst, std::fabs(trace(tau)) / (tab.lambda_shear * scale));
        }
        checks.push_back({"stress_traceless", worst <= 1e-12, worst, 1e-12});
    }
    {
        // pressure error bound of the finite-volume correction
        SplitMix rng{77};
        double worst = -1.0;
        bool pass = true;
        for (int trial = 0; trial < 64; ++trial) {
            const double v0 = rng.range(0.1, 2.0);
            const double v = v0 * rng.range(1.05, 50.0);
            const double n = rng.range(0.01, 5.0);
            const double theta = rng.range(0.1, 5.0);
            const double exact = equation_of_state(n, theta, v, v0, kc);
            const double ideal = n * kc.k_B * theta / v;
            const double rel = exact / ideal - 1.0;
            const double bound = 0.5 * v0 / (v - v0);
            pass = pass && rel >= 0.0 && rel <= bound;
            worst = std::max(worst, rel - bound);
        }
        checks.push_back({"eos_correction_bound", pass, worst, 0.0});
    }
    {
        // hop kernel bistochasticity on a randomized occupation profile
        SplitMix rng{4242};
        LatticeGasState state = make_uniform_lattice(24, 8, 4.0, 0.3, 1.0, kc);
        for (int x = 0; x < state.sites; ++x) state.N[x] = rng.range(0.05, 0.9);
        double worst = 0.0;
        for (int dir : {1, -1}) {
            const HopKernel kern = build_hop_kernel(state, dir);
            for (int x = 0; x < state.sites; ++x) {
                double row_sum = 0.0;
                for (int s = 0; s < state.sites; ++s) row_sum += kern.at(x, s);
                worst = std::max(worst, std::fabs(row_sum - 1.0));
                const std::vector<double> T = kern.two_point_operator(x);
                for (int i = 0; i < state.sites; ++i) {
                    double rsum = 0.0, csum = 0.0;
                    for (int j = 0; j < state.sites; ++j) {
                        rsum += T[static_cast<std::size_t>(i) * state.sites + j];
                        csum += T[static_cast<std::size_t>(j) * state.sites + i];
                    }
                    worst = std::max({worst, std::fabs(rsum - 1.0), std::fabs(csum - 1.0)});
                }
            }
        }
        checks.push_back({"hop_kernel_bistochastic", worst <= 1e-12, worst, 1e-12});
    }
    {
        // maximum-entropy fit reproduces its target moments
        SplitMix rng{99};
        const MomentumBins bins = MomentumBins::symmetric(48, 6.0);
        double worst = 0.0;
        for (int trial = 0; trial < 16; ++trial) {
            const double n = rng.range(0.05, 0.9);
            const double u = rng.range(-0.8, 0.8);
            const double theta = rng.range(0.3, 2.0);
            const double pi_t = n * kc.m * u;
            const double e_t = n * (0.5 * kc.k_B * theta + 0.5 * kc.m * u * u);
            const std::vector<double> p = thermalise({n, pi_t, e_t}, bins, kc);
            double s1 = 0.0, s2 = 0.0;
            for (int i = 0; i < bins.count; ++i) {
                s1 += p[i] * bins.k(i);
                s2 += p[i] * 0.5 * bins.k(i) * bins.k(i) / kc.m;
            }
            worst = std::max(worst, std::fabs(s1 - pi_t / n) / std::sqrt(kc.m * kc.k_B * theta));
            worst = std::max(worst, std::fabs(s2 - e_t / n) / (e_t / n));
        }
        checks.push_back({"thermalise_moments", worst <= 1e-10, worst, 1e-10});
    }
    {
        // uniform fluid state is a fixed point of the step
        Grid g;
        g.dim = 1;
        g.n = {32, 1, 1};
        g.length = {1.0, 1.0, 1.0};
        FieldState s = FieldState::zeros(g);
        for (std::size_t c = 0; c < g.cells(); ++c) {
            s.rho[c] = 0.7;
            s.theta[c] = 1.3;
            s.u[0][c] = 0.2;
        }
        const double dt = stable_dt(s, tab, kc);
        for (int i = 0; i < 5; ++i) step(s, dt, tab, kc);
        double worst = 0.0;
        for (std::size_t c = 0; c < g.cells(); ++c) {
            worst = std::max(worst, std::fabs(s.rho[c] - 0.7) / 0.7);
            worst = std::max(worst, std::fabs(s.theta[c] - 1.3) / 1.3);
            worst = std::max(worst, std::fabs(s.u[0][c] - 0.2) / 0.2);
        }
        checks.push_back({"fluid_uniform_fixed_point", worst <= 1e-12, worst, 1e-12});
    }
    {
        // short conservation run on a periodic sinusoid
        Grid g;
        g.dim = 1;
        g.n = {64, 1, 1};
        g.length = {1.0, 1.0, 1.0};
        FieldState s = FieldState::zeros(g);
        const double pi = std::acos(-1.0);
        for (int i = 0; i < g.n[0]; ++i) {
            const double x = (i + 0.5) * g.dx(0);
            s.rho[i] = 1.0 + 0.1 * std::sin(2.0 * pi * x);
            s.theta[i] = 1.0;
            s.u[0][i] = 0.05 * std::cos(2.0 * pi * x);
        }
        const ConservedTotals before = conserved_totals(s, kc);
        for (int n = 0; n < 50; ++n) step(s, stable_dt(s, tab, kc), tab, kc);
        const ConservedTotals after = conserved_totals(s, kc);
        const double dm = std::fabs(after.mass - before.mass) / std::fabs(before.mass);
        const double de = std::fabs(after.energy - before.energy) / std::fabs(before.energy);
        const double dp = std::fabs(after.momentum.x - before.momentum.x) /
                          std::max(1e-30, std::fabs(before.energy));
        const double worst = std::max({dm, de, dp});
        checks.push_back({"fluid_conservation", dm <= 1e-13 && de <= 1e-11 && dp <= 1e-11,
                          worst, 1e-11});
    }
    {
        // lattice short run: exact totals, monotone entropy
        LatticeGasState state =
            make_theta_bump_lattice(32, 32, 6.0, 0.3, 1.0, 0.05, 4.0, kc);
        const LatticeTotals before = lattice_totals(state);
        double prev_entropy = lattice_entropy(state, kc);
        bool monotone = true;
        for (int n = 0; n < 50; ++n) {
            chain_step(state, 0.02, kc);
            const double ent = lattice_entropy(state, kc);
            if (ent < prev_entropy - 1e-12 * std::fabs(prev_entropy)) monotone = false;
            prev_entropy = ent;
        }
        const LatticeTotals after = lattice_totals(state);
        const double worst = std::max(
            {std::fabs(after.mass - before.mass) / before.mass,
             std::fabs(after.momentum - before.momentum) / std::max(1e-30, before.energy),
             std::fabs(after.energy - before.energy) / before.energy});
        checks.push_back(
            {"lattice_conservation_entropy", monotone && worst <= 1e-12, worst, 1e-12});
    }
    {
        // boost then unboost is the identity for integer-cell translations
        Grid g;
        g.dim = 1;
        g.n = {32, 1, 1};
        g.length = {1.0, 1.0, 1.0};
        FieldState s = FieldState::zeros(g);
        const double pi = std::acos(-1.0);
        for (int i = 0; i < g.n[0]; ++i) {
            const double x = (i + 0.5) * g.dx(0);
            s.rho[i] = 1.0 + 0.1 * std::sin(2.0 * pi * x);
            s.theta[i] = 1.0 + 0.05 * std::cos(2.0 * pi * x);
            s.u[0][i] = 0.1;
        }
        s.time = 0.5;  // v * t / dx = 8 cells exactly
        const Vec3 v{0.5, 0.0, 0.0};
        const FieldState rt = boost(boost(s, v), -1.0 * v);
        double worst = 0.0;
        for (std::size_t c = 0; c < g.cells(); ++c) {
            worst = std::max(worst, std::fabs(rt.rho[c] - s.rho[c]));
            worst = std::max(worst, std::fabs(rt.theta[c] - s.theta[c]));
            worst = std::max(worst, std::fabs(rt.u[0][c] - s.u[0][c]));
        }
        checks.push_back({"boost_roundtrip", worst <= 1e-12, worst, 1e-12});
    }
    return checks;
}

} // namespace

void emit_plot_data(const std::string& run_dir, const std::string& out_dir) {
    const fs::path run(run_dir);
    if (!fs::exists(run)) throw ConfigError("run directory does not exist: " + run_dir);

    std::vector<fs::path> fluid_files;
    bool have_lattice = false;
    for (const auto& entry : fs::directory_iterator(run)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("fluid_", 0) == 0 && name.size() > 4 &&
            name.substr(name.size() - 4) == ".csv") {
            fluid_files.push_back(entry.path());
        }
        if (name == "lattice.csv") have_lattice = true;
    }
    std::sort(fluid_files.begin(), fluid_files.end());
    if (fluid_files.empty() && !have_lattice) {
        throw ConfigError("no run artifacts found in " + run_dir +
                          " (expected fluid_*.csv or lattice.csv)");
    }

    const fs::path out(out_dir);
    fs::create_directories(out);

    json manifest;
    manifest["files"] = json::array();

    auto parse_csv = [](const fs::path& p, std::vector<std::string>& header,
                        std::vector<std::vector<double>>& rows) {
        std::ifstream in(p, std::ios::binary);
        if (!in) throw ConfigError("cannot read artifact " + p.string());
        std::string line;
        header.clear();
        rows.clear();
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::vector<std::string> cells;
            std::stringstream ss(line);
            std::string cell;
            while (std::getline(ss, cell, ',')) cells.push_back(cell);
            if (header.empty()) {
                header = cells;
                continue;
            }
            std::vector<double> row(cells.size());
            for (std::size_t i = 0; i < cells.size(); ++i) row[i] = std::stod(cells[i]);
            rows.push_back(std::move(row));
        }
        if (header.empty()) throw ConfigError("artifact has no header: " + p.string());
    };

    auto column = [](const std::vector<std::string>& header, const std::string& name) {
        const auto it = std::find(header.begin(), header.end(), name);
        return it == header.end() ? -1 : static_cast<int>(it - header.begin());
    };

    auto emit_snapshot_fields = [&](const std::vector<std::string>& header,
                                    const std::vector<std::vector<double>>& rows,
                                    const std::vector<std::string>& coord_names,
                                    const std::vector<std::string>& field_names,
                                    const std::string& stem, double t_value) {
        std::vector<int> coord_idx;
        for (const auto& c : coord_names) {
            const int idx = column(header, c);
            if (idx >= 0) coord_idx.push_back(idx);
        }
        for (const auto& f : field_names) {
            const int fi = column(header, f);
            if (fi < 0) continue;
            std::ostringstream os;
            for (const auto& row : rows) {
                for (const int ci : coord_idx) os << format_g17(row[ci]) << ' ';
                os << format_g17(row[fi]) << '\n';
            }
            const std::string fname = f + "_" + stem + ".dat";
            write_text_file(out / fname, os.str());
            manifest["files"].push_back({{"file", fname}, {"field", f}, {"t", t_value}});
        }
    };

    for (const auto& p : fluid_files) {
        std::vector<std::string> header;
        std::vector<std::vector<double>> rows;
        parse_csv(p, header, rows);
        if (rows.empty()) throw ConfigError("artifact has no rows: " + p.string());
        const int ti = column(header, "t");
        const double t_value = ti >= 0 ? rows.front()[ti] : 0.0;
        std::string stem = p.stem().string();  // fluid_0007
        stem = stem.substr(stem.find('_') + 1);
        emit_snapshot_fields(header, rows, {"x", "y", "z"},
                             {"rho", "ux", "uy", "uz", "theta"}, stem, t_value);
    }

    if (have_lattice) {
        std::vector<std::string> header;
        std::vector<std::vector<double>> rows;
        parse_csv(run / "lattice.csv", header, rows);
        if (rows.empty()) throw ConfigError("artifact has no rows: lattice.csv");
        const int ti = column(header, "t");
        if (ti < 0) throw ConfigError("lattice.csv is missing the t column");
        // group rows into snapshots by their t value (file is time-ordered)
        std::vector<std::pair<double, std::vector<std::vector<double>>>> snaps;
        for (const auto& row : rows) {
            if (snaps.empty() || row[ti] != snaps.back().first) {
                snaps.push_back({row[ti], {}});
            }
            snaps.back().second.push_back(row);
        }
        for (std::size_t k = 0; k < snaps.size(); ++k) {
            char buf[16];
            std::snprintf(buf, sizeof(buf), "%04u", static_cast<unsigned>(k % 10000));
            emit_snapshot_fields(header, snaps[k].second, {"x"}, {"N", "u", "theta"}, buf,
                                 snaps[k].first);
        }
    }

    write_json_file(out / "manifest.json", manifest);
}

} // namespace maxgas
