#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fsiplate {

struct SimulationConfig {
    int n = 8;                      // fluid grid subdivisions per side
    int plate_elements = 8;         // defaults to n when not given
    double dt = 1e-5;
    double T = 1e-3;
    std::string initial = "sawtooth(5)";  // sawtooth(k) | hat | randomized(seed) | zero
    std::uint64_t seed = 0;
    std::optional<double> eta;      // fractional plate damping exponent in (0,1]
    double beta_min = 10.0;
    double beta_max = 200.0;
    int beta_count = 48;
    std::vector<double> snapshot_times;  // defaults to {0, T}
    std::string out = ".";
    int workers = 1;
};

// Parse "--key value" style arguments; "--config FILE" merges a key=value
// file ('#' comments allowed).  Precedence: flags > file > defaults.
// Unknown flags or file keys are rejected.
SimulationConfig parse_config(const std::vector<std::string>& args);

void validate_config(const SimulationConfig& cfg);

// canonical serialization (sorted key=value lines) and its FNV-1a hash
std::string serialize_config(const SimulationConfig& cfg);
std::string config_hash(const SimulationConfig& cfg);

std::string config_help();

// 17-significant-digit decimal formatting used in every output file
std::string format_g17(double v);

}  // namespace fsiplate
