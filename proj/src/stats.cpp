#include "hal/stats.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace hal {

namespace {

constexpr double kZ99 = 2.576;  // normal critical value for the 99% band

void check_equal_lengths(const std::vector<RoundResult>& rounds) {
  if (rounds.empty()) throw std::invalid_argument("no rounds to aggregate");
  const std::size_t T = rounds[0].steps.size();
  for (const RoundResult& r : rounds)
    if (r.steps.size() != T)
      throw std::invalid_argument("rounds differ in timestep count");
}

}  // namespace

const char* metric_name(Metric m) {
  switch (m) {
    case Metric::premium: return "premium";
    case Metric::effort: return "effort";
    case Metric::utility_principal: return "utility_principal";
    case Metric::utility_agent: return "utility_agent";
  }
  return "?";
}

std::optional<Metric> metric_from_name(const std::string& name) {
  for (Metric m : kAllMetrics)
    if (name == metric_name(m)) return m;
  return std::nullopt;
}

double metric_value(const StepRecord& step, Metric m) {
  switch (m) {
    case Metric::premium: return step.premium;
    case Metric::effort: return step.effort;
    case Metric::utility_principal: return step.utility_principal;
    case Metric::utility_agent: return step.utility_agent;
  }
  return 0.0;
}

double metric_benchmark(const Benchmark& b, Metric m) {
  switch (m) {
    case Metric::premium: return b.premium_star;
    case Metric::effort: return b.effort_star;
    case Metric::utility_principal: return b.utility_principal_star;
    case Metric::utility_agent: return b.utility_agent_star;
  }
  return 0.0;
}

NormalizedSeries normalize_series(const std::vector<RoundResult>& rounds, Metric metric,
                                  const Benchmark& benchmark) {
  check_equal_lengths(rounds);
  const double star = metric_benchmark(benchmark, metric);
  if (star == 0.0)
    throw std::domain_error(std::string("zero benchmark divisor for ") +
                            metric_name(metric));

  const std::size_t T = rounds[0].steps.size();
  const std::size_t R = rounds.size();
  NormalizedSeries out;
  out.metric = metric;
  out.values.resize(T);
  out.ci_low.resize(T);
  out.ci_high.resize(T);
  out.degenerate_ci = (R == 1);

  for (std::size_t t = 0; t < T; ++t) {
    double sum = 0.0;
    for (const RoundResult& r : rounds) sum += metric_value(r.steps[t], metric) / star;
    const double mean = sum / static_cast<double>(R);
    double half = 0.0;
    if (R > 1) {
      double ss = 0.0;
      for (const RoundResult& r : rounds) {
        double d = metric_value(r.steps[t], metric) / star - mean;
        ss += d * d;
      }
      double sd = std::sqrt(ss / static_cast<double>(R - 1));
      half = kZ99 * sd / std::sqrt(static_cast<double>(R));
    }
    out.values[t] = mean;
    out.ci_low[t] = mean - half;
    out.ci_high[t] = mean + half;
  }
  return out;
}

std::vector<std::vector<double>> normalized_traces(const std::vector<RoundResult>& rounds,
                                                   Metric metric,
                                                   const Benchmark& benchmark) {
  check_equal_lengths(rounds);
  const double star = metric_benchmark(benchmark, metric);
  if (star == 0.0)
    throw std::domain_error(std::string("zero benchmark divisor for ") +
                            metric_name(metric));
  std::vector<std::vector<double>> traces(rounds.size());
  for (std::size_t r = 0; r < rounds.size(); ++r) {
    traces[r].reserve(rounds[r].steps.size());
    for (const StepRecord& step : rounds[r].steps)
      traces[r].push_back(metric_value(step, metric) / star);
  }
  return traces;
}

double euclidean_distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size())
    throw std::domain_error("euclidean_distance requires equal lengths");
  double ss = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    ss += d * d;
  }
  return std::sqrt(ss);
}

double significance_test(const std::vector<std::vector<double>>& group_a,
                         const std::vector<std::vector<double>>& group_b,
                         std::uint64_t seed, int permutations) {
  if (group_a.empty() || group_b.empty())
    throw std::invalid_argument("significance_test requires non-empty groups");
  const std::size_t T = group_a[0].size();
  for (const auto& g : {&group_a, &group_b})
    for (const auto& trace : *g)
      if (trace.size() != T)
        throw std::invalid_argument("traces differ in length");

  const std::size_t na = group_a.size();
  const std::size_t nb = group_b.size();
  const std::size_t n = na + nb;

  // Pooled traces, flat; per-t totals let one side's sum determine the other.
  std::vector<double> pooled(n * T);
  std::vector<double> total(T, 0.0);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t t = 0; t < T; ++t) pooled[i * T + t] = group_a[i][t];
  for (std::size_t i = 0; i < nb; ++i)
    for (std::size_t t = 0; t < T; ++t) pooled[(na + i) * T + t] = group_b[i][t];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t t = 0; t < T; ++t) total[t] += pooled[i * T + t];

  std::vector<double> sum_a(T), mean_a(T), mean_b(T);
  auto distance_for = [&](const std::uint32_t* members) {
    std::fill(sum_a.begin(), sum_a.end(), 0.0);
    for (std::size_t i = 0; i < na; ++i) {
      const double* trace = &pooled[static_cast<std::size_t>(members[i]) * T];
      for (std::size_t t = 0; t < T; ++t) sum_a[t] += trace[t];
    }
    double ss = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      double d = sum_a[t] / static_cast<double>(na) -
                 (total[t] - sum_a[t]) / static_cast<double>(nb);
      ss += d * d;
    }
    return std::sqrt(ss);
  };

  std::vector<std::uint32_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0u);
  const double observed = distance_for(idx.data());

  SplitMix64 rng(seed);
  int at_least = 0;
  for (int p = 0; p < permutations; ++p) {
    // Partial Fisher-Yates: only the first na slots need to be a uniform
    // random subset; reusing the shuffled array keeps it uniform.
    for (std::size_t i = 0; i < na && i < n - 1; ++i) {
      std::size_t j = i + static_cast<std::size_t>(rng.next() % (n - i));
      std::swap(idx[i], idx[j]);
    }
    if (distance_for(idx.data()) >= observed) ++at_least;
  }
  return (1.0 + at_least) / (1.0 + static_cast<double>(permutations));
}

CvReport cv_stabilization(const std::vector<double>& outcome_per_round, int window_step,
                          double threshold) {
  if (window_step < 1) throw std::invalid_argument("window_step must be >= 1");
  if (!(threshold > 0.0)) throw std::invalid_argument("threshold must be > 0");
  if (outcome_per_round.size() < 2 * static_cast<std::size_t>(window_step))
    throw std::invalid_argument("need at least two windows of data");

  CvReport report;
  std::vector<int> defined_ends;
  std::vector<double> defined_cvs;
  for (std::size_t k = static_cast<std::size_t>(window_step);
       k <= outcome_per_round.size(); k += static_cast<std::size_t>(window_step)) {
    double mean = 0.0;
    for (std::size_t i = 0; i < k; ++i) mean += outcome_per_round[i];
    mean /= static_cast<double>(k);
    double ss = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      double d = outcome_per_round[i] - mean;
      ss += d * d;
    }
    double sd = k > 1 ? std::sqrt(ss / static_cast<double>(k - 1)) : 0.0;
    report.window_ends.push_back(static_cast<int>(k));
    if (k < 2 || std::fabs(mean) < 1e-12 * std::max(1.0, sd)) {
      // CV undefined on a single sample or a ~zero mean; skip the window.
      report.cvs.push_back(std::numeric_limits<double>::quiet_NaN());
      report.undefined_ends.push_back(static_cast<int>(k));
      continue;
    }
    report.cvs.push_back(sd / std::fabs(mean));
    defined_ends.push_back(static_cast<int>(k));
    defined_cvs.push_back(sd / std::fabs(mean));
  }

  // Last window pair that still moved by >= threshold; stabilization starts
  // just after it. A sequence still moving at its final pair never qualifies,
  // and fewer than two defined windows cannot be judged.
  if (defined_cvs.size() < 2) return report;
  std::size_t last_moving = 0;
  bool any_moving = false;
  for (std::size_t i = 0; i + 1 < defined_cvs.size(); ++i) {
    if (std::fabs(defined_cvs[i + 1] - defined_cvs[i]) >= threshold) {
      last_moving = i;
      any_moving = true;
    }
  }
  if (!any_moving) {
    report.stabilized_at = defined_ends.front();
  } else if (last_moving + 1 < defined_cvs.size() - 1) {
    report.stabilized_at = defined_ends[last_moving + 1];
  }
  return report;
}

}  // namespace hal
