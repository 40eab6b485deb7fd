// Run configuration: TOML ingestion with validation, defaults, and echo.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hal/model.hpp"

namespace hal {

struct RunConfig {
  double eta = 0.5;
  double mu = 0.0;
  int timesteps = 20;
  int rounds = 700;
  double reservation_utility = 0.0;
  std::uint64_t base_seed = 42;
  std::string output_dir = "results";
  std::string format = "csv";  // csv | json
  int workers = 0;             // 0 = auto
  std::vector<MemoryCapacity> memory_principal;
  std::vector<MemoryCapacity> memory_agent;
  std::vector<double> sigma_fracs;

  RunConfig();  // defaults: the full default grid

  // Throws std::invalid_argument naming the offending key.
  void validate() const;

  bool operator==(const RunConfig&) const = default;
};

// Parses the supported TOML subset: flat `key = value` lines, `#` comments,
// numbers, basic strings, and one-line arrays. Unknown keys are rejected;
// omitted keys keep their defaults.
RunConfig parse_config(const std::string& text);

// Loads and validates; errors mention the path or the offending key.
RunConfig load_config(const std::string& path);

// Echo as TOML; parse_config(config_to_toml(c)) == c.
std::string config_to_toml(const RunConfig& config);

}  // namespace hal
