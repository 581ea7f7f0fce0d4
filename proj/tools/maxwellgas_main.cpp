#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "maxgas/kinetic.hpp"
#include "maxgas/quadrature.hpp"
#include "maxgas/scenario.hpp"
#include "maxgas/version.hpp"

namespace {

void write_error_json(const std::string& out_dir, const std::string& type,
                      const std::string& message, const std::vector<std::string>& details,
                      int exit_code) {
    if (out_dir.empty()) return;
    try {
        std::filesystem::create_directories(out_dir);
        nlohmann::json j;
        j["error"] = {{"type", type}, {"message", message}, {"details", details}};
        j["exit_code"] = exit_code;
        std::ofstream out(std::filesystem::path(out_dir) / "error.json", std::ios::binary);
        out << j.dump(2) << "\n";
    } catch (...) {
        // the primary channel is the exit code and stderr
    }
}

int fail(const std::string& out_dir, const std::string& type, const std::string& message,
         const std::vector<std::string>& details, int exit_code) {
    write_error_json(out_dir, type, message, details, exit_code);
    std::cerr << "maxwellgas: " << message << "\n";
    for (const auto& d : details) std::cerr << "  - " << d << "\n";
    return exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string("maxwellgas ") + maxgas::kVersion +
                 " - occupation-gas transport, fluid and lattice runner\n"
                 "Worker parallelism is capped by the MAXWELLGAS_THREADS variable."};
    app.require_subcommand(1);

    std::string config_path, out_dir, run_dir;
    std::uint64_t seed = 0;
    bool seed_given = false;

    const std::pair<const char*, const char*> modes[] = {
        {"transport", "compute the transport-coefficient table"},
        {"fluid", "run the compressible solver scenario"},
        {"lattice", "run the mean-field occupation chain"},
        {"verify", "run the invariant suite"},
    };
    for (const auto& [name, desc] : modes) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->add_option("--config", config_path, "scenario config (JSON)")->required();
        sub->add_option("--out", out_dir, "output directory")->required();
        sub->add_option("--seed", seed, "seed for the stochastic lattice mode")
            ->each([&](const std::string&) { seed_given = true; });
    }
    CLI::App* plot = app.add_subcommand("plot", "convert run artifacts to plot-ready columns");
    plot->add_option("--run", run_dir, "directory holding a completed run")->required();
    plot->add_option("--out", out_dir, "output directory")->required();

    CLI11_PARSE(app, argc, argv);
    const std::string verb = app.get_subcommands().front()->get_name();

    try {
        if (verb == "plot") {
            maxgas::emit_plot_data(run_dir, out_dir);
            return 0;
        }
        maxgas::ScenarioConfig cfg = maxgas::load_config_file(config_path);
        const std::string cfg_mode =
            cfg.mode == maxgas::RunMode::transport   ? "transport"
            : cfg.mode == maxgas::RunMode::fluid     ? "fluid"
            : cfg.mode == maxgas::RunMode::lattice   ? "lattice"
                                                     : "verify";
        if (cfg_mode != verb) {
            throw maxgas::ConfigError("config mode '" + cfg_mode +
                                      "' does not match the requested subcommand '" + verb + "'");
        }
        if (seed_given) cfg.seed = seed;
        const int status = maxgas::run_scenario(cfg, out_dir);
        if (status == 4) {
            return fail(out_dir, "verification", "verification suite reported failures", {}, 4);
        }
        return status;
    } catch (const maxgas::ConfigError& e) {
        return fail(out_dir, "config", e.what(), e.details, 1);
    } catch (const maxgas::PositivityError& e) {
        return fail(out_dir, "positivity", e.what(), {}, 2);
    } catch (const maxgas::LatticePositivityError& e) {
        return fail(out_dir, "positivity", e.what(), {}, 2);
    } catch (const maxgas::DegenerateMomentsError& e) {
        return fail(out_dir, "positivity", e.what(), {}, 2);
    } catch (const maxgas::QuadratureError& e) {
        return fail(out_dir, "quadrature", e.what(), {}, 3);
    } catch (const std::exception& e) {
        return fail(out_dir, "internal", e.what(), {}, 1);
    }
}
