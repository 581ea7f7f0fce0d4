#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace testutil {

/// Frozen oracle values committed by tests/oracles/mu_oracle.py.
inline const nlohmann::json& goldens() {
    static const nlohmann::json data = [] {
        const std::string path = std::string(MAXGAS_SOURCE_DIR) + "/tests/oracles/goldens.json";
        std::ifstream in(path);
        if (!in) throw std::runtime_error("missing oracle goldens: " + path);
        nlohmann::json j;
        in >> j;
        return j;
    }();
    return data;
}

inline double golden(const char* key) { return goldens().at(key).get<double>(); }

inline std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Deterministic engine so failures reproduce across runs and machines.
inline std::mt19937_64 rng(unsigned seed = 20240817) { return std::mt19937_64(seed); }

} // namespace testutil
