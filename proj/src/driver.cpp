#include "hal/driver.hpp"

#include <functional>
#include <map>

namespace hal {

namespace {

bool grid_has(const std::vector<MemoryCapacity>& set, std::size_t v) {
  for (MemoryCapacity c : set)
    if (!c.is_unbounded() && c.value() == v) return true;
  return false;
}

struct ComparisonPlan {
  std::string label;
  std::size_t mp_a, ma_a;  // scenario A memory levels
  std::size_t mp_b, ma_b;  // scenario B
};

// The comparison grid: vary one side's memory 1 -> 5 while holding the other
// side at 1 and at 5, per environment, on the agent-utility curve.
const ComparisonPlan kComparisons[] = {
    {"mp1_vs_mp5_at_ma1", 1, 1, 5, 1},
    {"mp1_vs_mp5_at_ma5", 1, 5, 5, 5},
    {"ma1_vs_ma5_at_mp1", 1, 1, 1, 5},
    {"ma1_vs_ma5_at_mp5", 5, 1, 5, 5},
};

using TraceLookup = std::function<const std::vector<std::vector<double>>&(
    std::size_t mp, std::size_t ma, double sigma_frac)>;

std::vector<double> mean_curve(const std::vector<std::vector<double>>& traces) {
  std::vector<double> mean(traces[0].size(), 0.0);
  for (const auto& trace : traces)
    for (std::size_t t = 0; t < trace.size(); ++t) mean[t] += trace[t];
  for (double& v : mean) v /= static_cast<double>(traces.size());
  return mean;
}

std::vector<DistanceRow> make_distance_rows(const RunConfig& config,
                                            const TraceLookup& traces_for) {
  std::vector<DistanceRow> rows;
  if (!grid_has(config.memory_principal, 1) || !grid_has(config.memory_principal, 5) ||
      !grid_has(config.memory_agent, 1) || !grid_has(config.memory_agent, 5))
    return rows;

  for (double frac : config.sigma_fracs) {
    const std::string environment = environment_label(frac);
    for (const ComparisonPlan& plan : kComparisons) {
      const auto& group_a = traces_for(plan.mp_a, plan.ma_a, frac);
      const auto& group_b = traces_for(plan.mp_b, plan.ma_b, frac);
      DistanceRow row;
      row.environment = environment;
      row.comparison = plan.label;
      row.metric = Metric::utility_agent;
      row.distance = euclidean_distance(mean_curve(group_a), mean_curve(group_b));
      row.p_value = significance_test(
          group_a, group_b,
          derive_stream_seed(config.base_seed, environment + "|" + plan.label, 0,
                             StreamPurpose::permutation));
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace

ModelParams params_from_config(const RunConfig& config) {
  ModelParams p;
  p.eta = config.eta;
  p.mu = config.mu;
  p.timesteps = config.timesteps;
  p.rounds = config.rounds;
  p.reservation_utility = config.reservation_utility;
  return p;
}

SweepOutput run_experiment(const RunConfig& config) {
  config.validate();
  SweepOutput out;
  out.benchmark = solve_second_best(config.eta);

  auto specs = expand_grid(config.memory_principal, config.memory_agent,
                           config.sigma_fracs, params_from_config(config),
                           out.benchmark.outcome_star, config.base_seed);
  auto rounds = run_sweep(specs, config.workers);

  std::map<std::string, std::size_t> index;
  out.scenarios.reserve(specs.size());
  for (std::size_t s = 0; s < specs.size(); ++s) {
    ScenarioSeries sc;
    sc.spec = specs[s];
    for (Metric m : kAllMetrics)
      sc.series.push_back(normalize_series(rounds[s], m, out.benchmark));
    out.scenarios.push_back(std::move(sc));
    index[specs[s].scenario_id] = s;
    for (const RoundResult& r : rounds[s]) {
      out.rejections += r.rejections;
      out.no_offers += r.no_offers;
    }
  }

  std::map<std::string, std::vector<std::vector<double>>> trace_cache;
  TraceLookup lookup = [&](std::size_t mp, std::size_t ma,
                           double frac) -> const std::vector<std::vector<double>>& {
    std::string id = make_scenario_id(MemoryCapacity::finite(mp),
                                      MemoryCapacity::finite(ma), frac);
    auto cached = trace_cache.find(id);
    if (cached == trace_cache.end()) {
      cached = trace_cache
                   .emplace(id, normalized_traces(rounds[index.at(id)],
                                                  Metric::utility_agent, out.benchmark))
                   .first;
    }
    return cached->second;
  };
  out.distances = make_distance_rows(config, lookup);
  return out;
}

std::vector<DistanceRow> recompute_distances(const RunConfig& config) {
  config.validate();
  const Benchmark benchmark = solve_second_best(config.eta);
  const ModelParams constants = params_from_config(config);

  std::map<std::string, std::vector<std::vector<double>>> trace_cache;
  TraceLookup lookup = [&](std::size_t mp, std::size_t ma,
                           double frac) -> const std::vector<std::vector<double>>& {
    std::string id = make_scenario_id(MemoryCapacity::finite(mp),
                                      MemoryCapacity::finite(ma), frac);
    auto cached = trace_cache.find(id);
    if (cached == trace_cache.end()) {
      ScenarioSpec spec = expand_grid({MemoryCapacity::finite(mp)},
                                      {MemoryCapacity::finite(ma)}, {frac}, constants,
                                      benchmark.outcome_star, config.base_seed)[0];
      auto rounds = run_scenario(spec, config.workers);
      cached = trace_cache
                   .emplace(id, normalized_traces(rounds, Metric::utility_agent,
                                                  benchmark))
                   .first;
    }
    return cached->second;
  };
  return make_distance_rows(config, lookup);
}

}  // namespace hal
