// Orchestration: the per-period event loop, independent simulation rounds,
// and expansion of the scenario grid.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hal/model.hpp"
#include "hal/rng.hpp"

namespace hal {

struct ScenarioSpec {
  ModelParams params;
  std::string scenario_id;  // uniquely encodes (m_P, m_A, sigma_frac)
  std::uint64_t base_seed = 0;
};

struct RoundResult {
  std::vector<StepRecord> steps;  // length T
  int rejections = 0;             // offers the acceptance check would decline
  int no_offers = 0;              // periods with no contract in force at all
  std::uint64_t seed = 0;         // the round's noise-stream seed
};

// "mp3_ma1_s0.25"; unbounded memory spelled "inf".
std::string make_scenario_id(MemoryCapacity memory_principal,
                             MemoryCapacity memory_agent, double sigma_frac);

// One simulation round: T periods of belief update, proposal, response,
// realization, and memory update. Deterministic in (spec, round_index).
RoundResult run_round(const ScenarioSpec& spec, std::uint64_t round_index);

// R independent rounds, optionally fanned out to a worker pool. Results are
// identical for any worker count.
std::vector<RoundResult> run_scenario(const ScenarioSpec& spec, int workers = 1);

// Cartesian product in stable order: memory_principal outer, then
// memory_agent, then sigma. sigma is resolved as sigma_frac * outcome_star.
std::vector<ScenarioSpec> expand_grid(const std::vector<MemoryCapacity>& mp_set,
                                      const std::vector<MemoryCapacity>& ma_set,
                                      const std::vector<double>& sigma_frac_set,
                                      const ModelParams& constants,
                                      double outcome_star,
                                      std::uint64_t base_seed);

// All rounds of all scenarios over one shared task queue; result[s][r].
std::vector<std::vector<RoundResult>> run_sweep(const std::vector<ScenarioSpec>& specs,
                                                int workers);

}  // namespace hal
