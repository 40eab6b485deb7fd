// Result persistence: series/distances tables, benchmark summary, and the
// run manifest with config echo and artifact checksums.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hal/config.hpp"
#include "hal/engine.hpp"
#include "hal/stats.hpp"

namespace hal {

// 17 significant digits, general format: exact round-trip, '.' decimal
// point, no locale involvement.
std::string format_double(double v);

struct ScenarioSeries {
  ScenarioSpec spec;
  std::vector<NormalizedSeries> series;  // one per metric, fixed order
};

struct DistanceRow {
  std::string environment;
  std::string comparison;
  Metric metric = Metric::utility_agent;
  double distance = 0.0;
  double p_value = 1.0;
};

// Maps a sigma fraction to its environment label (stable, mid-turbulent,
// turbulent); other fractions get a "sigma_frac=..." label.
std::string environment_label(double sigma_frac);

// Creates the directory if needed and proves it is writable; call before any
// simulation starts. Returns false with a message on failure.
bool preflight_output_dir(const std::string& dir, std::string& error);

// Writes series + distances (csv or json per config.format), benchmark.json,
// and manifest.json into dir. Throws std::runtime_error on write failure.
void emit_results(const std::vector<ScenarioSeries>& scenarios,
                  const std::vector<DistanceRow>& distances, const Benchmark& benchmark,
                  const RunConfig& config, const std::string& dir);

// Rewrites only the distances table in an existing results directory and
// refreshes its checksum in manifest.json.
void rewrite_distances(const std::vector<DistanceRow>& distances, const RunConfig& config,
                       const std::string& dir);

// Reconstructs the config from a manifest.json written by emit_results.
RunConfig config_from_manifest(const std::string& manifest_path);

// FNV-1a over the file bytes; the manifest's checksum primitive.
std::uint64_t checksum_file(const std::string& path);

}  // namespace hal
