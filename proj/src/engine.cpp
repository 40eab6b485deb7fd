#include "hal/engine.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <limits>
#include <thread>

#include "hal/contract_math.hpp"
#include "hal/decision.hpp"
#include "hal/learning.hpp"

namespace hal {

namespace {

std::string short_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Half-width of the candidate window around the standing incited effort.
// Adaptation is incremental: each period the principal reconsiders terms in
// a small neighborhood of the contract already in force, not the whole space.
constexpr double kAdaptRadius = 0.048;

}  // namespace

std::string make_scenario_id(MemoryCapacity memory_principal,
                             MemoryCapacity memory_agent, double sigma_frac) {
  return "mp" + memory_principal.str() + "_ma" + memory_agent.str() + "_s" +
         short_double(sigma_frac);
}

RoundResult run_round(const ScenarioSpec& spec, std::uint64_t round_index) {
  const ModelParams& p = spec.params;
  SplitMix64 noise(derive_stream_seed(spec.base_seed, spec.scenario_id, round_index,
                                      StreamPurpose::noise));
  SplitMix64 search(derive_stream_seed(spec.base_seed, spec.scenario_id, round_index,
                                       StreamPurpose::search));

  MemoryBuffer memory_p(p.memory_principal);
  MemoryBuffer memory_a(p.memory_agent);
  RoundResult result;
  result.seed = noise.state;
  result.steps.reserve(static_cast<std::size_t>(p.timesteps));
  double previous_incited = 0.0;
  bool have_standing = false;
  Contract standing{};

  for (int t = 1; t <= p.timesteps; ++t) {
    StepRecord rec;
    rec.t = t;
    rec.belief_principal = learned_expectation(memory_p, p.mu);
    rec.belief_agent = learned_expectation(memory_a, p.mu);
    // theta is drawn every period, adaptation or not, so the t-th environment
    // draw is always the t-th value of the round's noise stream.
    rec.theta = noise.next_normal(p.mu, p.sigma);

    // Terms are reconsidered only while the standing incited effort is still
    // inside the action space the principal currently believes feasible. When
    // her belief pushes the bounds past it, the standing contract stays in
    // force unchanged rather than jumping to the participation frontier.
    bool adapt = true;
    if (have_standing) {
      auto bounds = action_bounds(rec.belief_principal, p.eta, p.reservation_utility);
      adapt = bounds.has_value() && previous_incited >= bounds->lower - 1e-12 &&
              previous_incited <= bounds->upper + 1e-12;
    }

    Contract offer{};
    bool have_offer = false;
    if (adapt) {
      const double center = previous_incited;
      UniformSampler draw = [&search, center](double lo, double hi) {
        const double c = std::clamp(center, lo, hi);
        return search.next_uniform(std::max(lo, c - kAdaptRadius),
                                   std::min(hi, c + kAdaptRadius));
      };
      auto proposal = principal_propose(rec.belief_principal, previous_incited, p.eta,
                                        p.reservation_utility, draw);
      if (proposal) {
        offer = proposal->contract;
        have_offer = true;
      } else if (have_standing) {
        offer = standing;
        have_offer = true;
      }
    } else {
      offer = standing;
      have_offer = true;
    }

    if (!have_offer) {
      result.no_offers += 1;
      result.steps.push_back(rec);
      continue;
    }
    rec.premium = offer.premium;
    rec.incited_effort = offer.incited_effort;
    previous_incited = offer.incited_effort;
    standing = offer;
    have_standing = true;

    // Participation is normalized away: the relationship never lapses, and
    // offers the acceptance check would have declined are only tallied.
    Response response = agent_respond(offer, rec.belief_agent, p.eta,
                                      -std::numeric_limits<double>::infinity());
    if (response.predicted_utility < p.reservation_utility) result.rejections += 1;
    rec.accepted = true;
    rec.effort = response.effort;
    rec.outcome = outcome(rec.effort, rec.theta);
    rec.compensation = rec.outcome * rec.premium;
    rec.utility_principal = principal_utility(rec.outcome, rec.premium);
    rec.utility_agent = agent_utility(rec.compensation, rec.effort, p.eta);

    remember(memory_p, principal_estimate(rec.outcome, rec.incited_effort));
    remember(memory_a, agent_observe(rec.outcome, rec.effort));
    result.steps.push_back(rec);
  }
  return result;
}

std::vector<RoundResult> run_scenario(const ScenarioSpec& spec, int workers) {
  std::vector<ScenarioSpec> one{spec};
  return run_sweep(one, workers)[0];
}

std::vector<ScenarioSpec> expand_grid(const std::vector<MemoryCapacity>& mp_set,
                                      const std::vector<MemoryCapacity>& ma_set,
                                      const std::vector<double>& sigma_frac_set,
                                      const ModelParams& constants,
                                      double outcome_star,
                                      std::uint64_t base_seed) {
  if (mp_set.empty() || ma_set.empty() || sigma_frac_set.empty())
    throw std::invalid_argument("grid sets must be non-empty");
  std::vector<ScenarioSpec> specs;
  specs.reserve(mp_set.size() * ma_set.size() * sigma_frac_set.size());
  for (MemoryCapacity mp : mp_set) {
    for (MemoryCapacity ma : ma_set) {
      for (double frac : sigma_frac_set) {
        ScenarioSpec spec;
        spec.params = constants;
        spec.params.memory_principal = mp;
        spec.params.memory_agent = ma;
        spec.params.sigma_frac = frac;
        spec.params.sigma = frac * outcome_star;
        spec.params.validate();
        spec.scenario_id = make_scenario_id(mp, ma, frac);
        spec.base_seed = base_seed;
        specs.push_back(std::move(spec));
      }
    }
  }
  return specs;
}

std::vector<std::vector<RoundResult>> run_sweep(const std::vector<ScenarioSpec>& specs,
                                                int workers) {
  std::vector<std::vector<RoundResult>> results(specs.size());
  std::vector<std::pair<std::uint32_t, std::uint32_t>> tasks;  // (scenario, round)
  for (std::uint32_t s = 0; s < specs.size(); ++s) {
    results[s].resize(static_cast<std::size_t>(specs[s].params.rounds));
    for (std::uint32_t r = 0; r < results[s].size(); ++r) tasks.emplace_back(s, r);
  }

  if (workers < 1) {
    unsigned hw = std::thread::hardware_concurrency();
    workers = hw > 0 ? static_cast<int>(hw) : 1;
  }
  if (static_cast<std::size_t>(workers) > tasks.size() && !tasks.empty())
    workers = static_cast<int>(tasks.size());

  // Workers claim (scenario, round) pairs off a shared counter and write into
  // preallocated slots, so the aggregate is identical for any worker count.
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= tasks.size()) return;
      auto [s, r] = tasks[i];
      results[s][r] = run_round(specs[s], r);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  return results;
}

}  // namespace hal
