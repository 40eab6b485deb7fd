#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hal/rng.hpp"
#include "hal/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

using namespace hal;

namespace {

// Rounds whose steps carry prescribed utility_agent values; the other
// metrics are filled with the same number so any metric can be queried.
std::vector<RoundResult> rounds_from(const std::vector<std::vector<double>>& values) {
  std::vector<RoundResult> rounds;
  for (const auto& row : values) {
    RoundResult r;
    for (std::size_t t = 0; t < row.size(); ++t) {
      StepRecord s;
      s.t = static_cast<int>(t) + 1;
      s.premium = row[t];
      s.effort = row[t];
      s.utility_principal = row[t];
      s.utility_agent = row[t];
      r.steps.push_back(s);
    }
    rounds.push_back(std::move(r));
  }
  return rounds;
}

Benchmark unit_benchmark() {
  Benchmark b;
  b.premium_star = 1.0;
  b.effort_star = 1.0;
  b.outcome_star = 1.0;
  b.utility_principal_star = 1.0;
  b.utility_agent_star = 1.0;
  return b;
}

}  // namespace

TEST_CASE("metric names round-trip") {
  for (Metric m : kAllMetrics) {
    auto back = metric_from_name(metric_name(m));
    REQUIRE(back.has_value());
    CHECK(*back == m);
  }
  CHECK_FALSE(metric_from_name("outcome").has_value());
  CHECK_FALSE(metric_from_name("").has_value());
}

TEST_CASE("replaying the benchmark normalizes to one with a zero-width band") {
  Benchmark b;
  b.premium_star = 0.4532;
  b.effort_star = 0.4128;
  b.outcome_star = 0.4128;
  b.utility_principal_star = 0.2257;
  b.utility_agent_star = 0.0934;

  std::vector<RoundResult> rounds(3);
  for (auto& r : rounds) {
    for (int t = 1; t <= 4; ++t) {
      StepRecord s;
      s.t = t;
      s.premium = b.premium_star;
      s.effort = b.effort_star;
      s.utility_principal = b.utility_principal_star;
      s.utility_agent = b.utility_agent_star;
      r.steps.push_back(s);
    }
  }
  for (Metric m : kAllMetrics) {
    NormalizedSeries series = normalize_series(rounds, m, b);
    CHECK_FALSE(series.degenerate_ci);
    REQUIRE(series.values.size() == 4);
    for (std::size_t t = 0; t < 4; ++t) {
      CHECK(series.values[t] == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(series.ci_low[t] == doctest::Approx(series.values[t]).epsilon(1e-12));
      CHECK(series.ci_high[t] == doctest::Approx(series.values[t]).epsilon(1e-12));
    }
  }
}

TEST_CASE("a single round flags its degenerate band") {
  auto rounds = rounds_from({{0.5, 0.7}});
  NormalizedSeries s = normalize_series(rounds, Metric::utility_agent, unit_benchmark());
  CHECK(s.degenerate_ci);
  CHECK(s.values == std::vector<double>{0.5, 0.7});
  CHECK(s.ci_low == s.values);
  CHECK(s.ci_high == s.values);
}

TEST_CASE("two symmetric rounds give the textbook band") {
  // rounds at 0 and 2: mean 1, sample sd sqrt(2), half-width z * sd / sqrt(2)
  auto rounds = rounds_from({{0.0}, {2.0}});
  NormalizedSeries s = normalize_series(rounds, Metric::effort, unit_benchmark());
  CHECK(s.values[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.ci_high[0] == doctest::Approx(1.0 + 2.576).epsilon(1e-12));
  CHECK(s.ci_low[0] == doctest::Approx(1.0 - 2.576).epsilon(1e-12));
}

TEST_CASE("a zero benchmark divisor is rejected") {
  auto rounds = rounds_from({{0.5}});
  Benchmark b = unit_benchmark();
  b.utility_agent_star = 0.0;
  CHECK_THROWS_AS(normalize_series(rounds, Metric::utility_agent, b), std::domain_error);
  CHECK_THROWS_AS(normalized_traces(rounds, Metric::utility_agent, b), std::domain_error);
  // other metrics keep working
  CHECK_NOTHROW(normalize_series(rounds, Metric::premium, b));
}

TEST_CASE("ragged rounds are rejected") {
  auto rounds = rounds_from({{0.5, 0.6}, {0.5}});
  CHECK_THROWS_AS(normalize_series(rounds, Metric::premium, unit_benchmark()),
                  std::invalid_argument);
  CHECK_THROWS_AS(normalize_series(std::vector<RoundResult>{}, Metric::premium,
                                   unit_benchmark()),
                  std::invalid_argument);
}

TEST_CASE("aggregation does not depend on round order") {
  SplitMix64 rng(3);
  std::vector<std::vector<double>> data(40, std::vector<double>(5));
  for (auto& row : data)
    for (auto& v : row) v = rng.next_uniform(0.1, 2.0);

  auto rounds = rounds_from(data);
  NormalizedSeries base = normalize_series(rounds, Metric::utility_agent, unit_benchmark());

  std::reverse(data.begin(), data.end());
  auto reversed = rounds_from(data);
  NormalizedSeries flipped =
      normalize_series(reversed, Metric::utility_agent, unit_benchmark());
  for (std::size_t t = 0; t < 5; ++t) {
    CHECK(base.values[t] == doctest::Approx(flipped.values[t]).epsilon(1e-12));
    CHECK(base.ci_high[t] == doctest::Approx(flipped.ci_high[t]).epsilon(1e-12));
  }
}

TEST_CASE("band width shrinks like one over sqrt of the round count") {
  SplitMix64 rng(8);
  const std::size_t R = 50;
  std::vector<std::vector<double>> data(R, std::vector<double>(1));
  for (auto& row : data) row[0] = rng.next_uniform(0.5, 1.5);

  // quadruple the sample by exact replication: sd is nearly unchanged, so
  // the half-width should drop by about half
  std::vector<std::vector<double>> data4;
  for (int c = 0; c < 4; ++c) data4.insert(data4.end(), data.begin(), data.end());

  auto s1 = normalize_series(rounds_from(data), Metric::effort, unit_benchmark());
  auto s4 = normalize_series(rounds_from(data4), Metric::effort, unit_benchmark());
  double w1 = s1.ci_high[0] - s1.ci_low[0];
  double w4 = s4.ci_high[0] - s4.ci_low[0];
  CHECK(w4 / w1 == doctest::Approx(0.5).epsilon(0.15));
}

TEST_CASE("normalized traces expose per-round curves") {
  auto rounds = rounds_from({{1.0, 2.0}, {3.0, 4.0}});
  Benchmark b = unit_benchmark();
  b.utility_agent_star = 2.0;
  auto traces = normalized_traces(rounds, Metric::utility_agent, b);
  REQUIRE(traces.size() == 2);
  CHECK(traces[0] == std::vector<double>{0.5, 1.0});
  CHECK(traces[1] == std::vector<double>{1.5, 2.0});
}

TEST_CASE("euclidean distance basics") {
  CHECK(euclidean_distance({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}) == 0.0);
  CHECK(euclidean_distance({0.0, 3.0}, {4.0, 7.0}) ==
        doctest::Approx(std::sqrt(32.0)).epsilon(1e-12));
  CHECK(euclidean_distance({}, {}) == 0.0);
  CHECK_THROWS_AS(euclidean_distance({1.0}, {1.0, 2.0}), std::domain_error);
}

TEST_CASE("euclidean distance satisfies the metric axioms") {
  SplitMix64 rng(21);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> x(6), y(6), z(6);
    for (int i = 0; i < 6; ++i) {
      x[i] = rng.next_uniform(-2.0, 2.0);
      y[i] = rng.next_uniform(-2.0, 2.0);
      z[i] = rng.next_uniform(-2.0, 2.0);
    }
    double dxy = euclidean_distance(x, y);
    double dyx = euclidean_distance(y, x);
    CHECK(dxy == dyx);
    CHECK(dxy >= 0.0);
    CHECK(euclidean_distance(x, x) == 0.0);
    CHECK(euclidean_distance(x, z) <= dxy + euclidean_distance(y, z) + 1e-12);
  }
}

TEST_CASE("permutation test: identical groups are maximally insignificant") {
  std::vector<std::vector<double>> g(8, std::vector<double>{1.0, 2.0, 3.0});
  double p = significance_test(g, g, 77, 500);
  CHECK(p == 1.0);
}

TEST_CASE("permutation test: far-apart groups are maximally significant") {
  SplitMix64 rng(5);
  std::vector<std::vector<double>> a, b;
  for (int i = 0; i < 12; ++i) {
    std::vector<double> ta(10), tb(10);
    for (int t = 0; t < 10; ++t) {
      ta[t] = rng.next_normal(0.0, 1.0);
      tb[t] = rng.next_normal(10.0, 1.0);
    }
    a.push_back(ta);
    b.push_back(tb);
  }
  double p = significance_test(a, b, 123, 1000);
  CHECK(p >= 1.0 / 1001.0);
  CHECK(p <= 0.005);
}

TEST_CASE("permutation test is deterministic in its seed") {
  SplitMix64 rng(9);
  std::vector<std::vector<double>> a, b;
  for (int i = 0; i < 10; ++i) {
    std::vector<double> ta(6), tb(6);
    for (int t = 0; t < 6; ++t) {
      ta[t] = rng.next_normal(0.0, 1.0);
      tb[t] = rng.next_normal(0.4, 1.0);
    }
    a.push_back(ta);
    b.push_back(tb);
  }
  double p1 = significance_test(a, b, 2718, 2000);
  double p2 = significance_test(a, b, 2718, 2000);
  CHECK(p1 == p2);
  // a borderline effect should land strictly inside (0, 1)
  CHECK(p1 > 1.0 / 2001.0);
  CHECK(p1 < 1.0);
}

TEST_CASE("permutation test with single-member groups degenerates to one") {
  // swapping the only two members leaves the two-group distance unchanged,
  // so every permutation ties the observed value
  std::vector<std::vector<double>> a{{0.0, 0.0}}, b{{5.0, 5.0}};
  CHECK(significance_test(a, b, 1, 200) == 1.0);
}

TEST_CASE("permutation test input validation") {
  std::vector<std::vector<double>> ok{{1.0, 2.0}};
  std::vector<std::vector<double>> ragged{{1.0, 2.0, 3.0}};
  CHECK_THROWS_AS(significance_test({}, ok, 1, 10), std::invalid_argument);
  CHECK_THROWS_AS(significance_test(ok, {}, 1, 10), std::invalid_argument);
  CHECK_THROWS_AS(significance_test(ok, ragged, 1, 10), std::invalid_argument);
}

TEST_CASE("cv: constant data stabilizes at the first window") {
  std::vector<double> data(10, 5.0);
  CvReport r = cv_stabilization(data, 2, 0.01);
  REQUIRE(r.window_ends == std::vector<int>{2, 4, 6, 8, 10});
  for (double cv : r.cvs) CHECK(cv == 0.0);
  CHECK(r.undefined_ends.empty());
  REQUIRE(r.stabilized_at.has_value());
  CHECK(*r.stabilized_at == 2);
}

TEST_CASE("cv: a known settling pattern") {
  // first half noisy, second half nearly constant; the prefix CV keeps
  // falling while noisy data dominates, then flattens
  SplitMix64 rng(13);
  std::vector<double> data;
  for (int i = 0; i < 100; ++i) data.push_back(rng.next_normal(10.0, 4.0));
  for (int i = 0; i < 900; ++i) data.push_back(rng.next_normal(10.0, 0.05));
  CvReport r = cv_stabilization(data, 50, 0.01);
  REQUIRE(r.stabilized_at.has_value());
  CHECK(*r.stabilized_at > 50);
  CHECK(*r.stabilized_at < 1000);

  // loosening the threshold can only stabilize earlier or at the same window
  CvReport loose = cv_stabilization(data, 50, 0.05);
  REQUIRE(loose.stabilized_at.has_value());
  CHECK(*loose.stabilized_at <= *r.stabilized_at);
}

TEST_CASE("cv: still moving at the end yields no verdict") {
  // each window's spread dwarfs everything before it, so every prefix CV
  // jumps past its predecessor, including the final pair
  std::vector<double> data;
  double delta = 1.0;
  for (int block = 0; block < 6; ++block) {
    data.push_back(10.0 + delta);
    data.push_back(10.0 - delta);
    data.push_back(10.0 + delta);
    data.push_back(10.0 - delta);
    delta *= 4.0;
  }
  CvReport r = cv_stabilization(data, 4, 0.01);
  REQUIRE(r.window_ends.size() == 6);
  CHECK_FALSE(r.stabilized_at.has_value());
}

TEST_CASE("cv: zero-mean windows are flagged undefined") {
  std::vector<double> data = {1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0};
  CvReport r = cv_stabilization(data, 2, 0.01);
  CHECK(r.undefined_ends == std::vector<int>{2, 4, 6, 8});
  for (double cv : r.cvs) CHECK(std::isnan(cv));
  CHECK_FALSE(r.stabilized_at.has_value());
}

TEST_CASE("cv: single-sample first window is skipped, not poisoned") {
  std::vector<double> data = {3.0, 3.0, 3.0, 3.0};
  CvReport r = cv_stabilization(data, 1, 0.01);
  REQUIRE(r.window_ends.size() == 4);
  CHECK(std::isnan(r.cvs[0]));
  CHECK(r.undefined_ends == std::vector<int>{1});
  REQUIRE(r.stabilized_at.has_value());
  CHECK(*r.stabilized_at == 2);
}

TEST_CASE("cv input validation") {
  std::vector<double> data(10, 1.0);
  CHECK_THROWS_AS(cv_stabilization(data, 0, 0.01), std::invalid_argument);
  CHECK_THROWS_AS(cv_stabilization(data, 6, 0.01), std::invalid_argument);
  CHECK_THROWS_AS(cv_stabilization(data, 2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(cv_stabilization(data, 2, -1.0), std::invalid_argument);
}
