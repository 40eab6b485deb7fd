// Experiment driver: wires config, benchmark, grid execution, aggregation,
// and the comparison-grid distance tests together for the CLI and tests.
#pragma once

#include "hal/config.hpp"
#include "hal/contract_math.hpp"
#include "hal/engine.hpp"
#include "hal/io.hpp"
#include "hal/stats.hpp"

namespace hal {

struct SweepOutput {
  Benchmark benchmark;
  std::vector<ScenarioSeries> scenarios;  // grid order, all four metrics each
  std::vector<DistanceRow> distances;
  long long rejections = 0;  // across all scenarios and rounds
  long long no_offers = 0;
};

ModelParams params_from_config(const RunConfig& config);

// Runs the configured grid and aggregates everything. Distances cover the
// memory-1-vs-5 comparison grid on agent utility and are emitted only when
// the configured grid contains both memory levels on both sides.
SweepOutput run_experiment(const RunConfig& config);

// Re-derives the distance table for an existing config by re-simulating just
// the comparison scenarios (they are deterministic in the seed).
std::vector<DistanceRow> recompute_distances(const RunConfig& config);

}  // namespace hal
