// Normalized time-series metrics with 99% confidence bands, Euclidean
// curve distance, a seeded permutation significance test, and the
// coefficient-of-variation run-count calibration.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hal/engine.hpp"

namespace hal {

enum class Metric { premium, effort, utility_principal, utility_agent };

inline constexpr Metric kAllMetrics[] = {Metric::premium, Metric::effort,
                                         Metric::utility_principal,
                                         Metric::utility_agent};

const char* metric_name(Metric m);
std::optional<Metric> metric_from_name(const std::string& name);
double metric_value(const StepRecord& step, Metric m);
double metric_benchmark(const Benchmark& b, Metric m);

struct NormalizedSeries {
  Metric metric = Metric::premium;
  std::vector<double> values;   // mean over rounds of per-round value / benchmark
  std::vector<double> ci_low;   // 99% band
  std::vector<double> ci_high;
  bool degenerate_ci = false;   // single round: zero-width band by convention
};

NormalizedSeries normalize_series(const std::vector<RoundResult>& rounds, Metric metric,
                                  const Benchmark& benchmark);

// Per-round normalized traces, result[r][t]; input to significance_test.
std::vector<std::vector<double>> normalized_traces(const std::vector<RoundResult>& rounds,
                                                   Metric metric,
                                                   const Benchmark& benchmark);

double euclidean_distance(const std::vector<double>& a, const std::vector<double>& b);

// Permutation test on the distance between group-mean curves. p-value is
// (1 + #{permuted >= observed}) / (1 + permutations); deterministic in seed.
double significance_test(const std::vector<std::vector<double>>& group_a,
                         const std::vector<std::vector<double>>& group_b,
                         std::uint64_t seed, int permutations = 10000);

struct CvReport {
  std::vector<int> window_ends;     // k = step, 2*step, ...
  std::vector<double> cvs;          // NaN where the window mean is ~0
  std::vector<int> undefined_ends;  // windows skipped as degenerate
  std::optional<int> stabilized_at; // smallest k after which CVs stop moving
};

// CV = sample sd / |mean| over the first k values. stabilized_at is the
// smallest examined k from which every successive CV difference stays below
// threshold; unset when the sequence is still moving at the end or too few
// windows are defined to judge.
CvReport cv_stabilization(const std::vector<double>& outcome_per_round, int window_step,
                          double threshold);

}  // namespace hal
