#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hal/config.hpp"
#include "hal/io.hpp"

#include "json.hpp"

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace hal;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("hal_test_" + std::to_string(static_cast<unsigned>(::getpid())) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int n = 0;
    return n;
  }
  std::string str() const { return path.string(); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

// A minimal synthetic result set: one scenario, all four metrics, T steps.
std::vector<ScenarioSeries> tiny_scenarios(int T) {
  ScenarioSeries sc;
  sc.spec.scenario_id = "mp1_ma1_s0.05";
  sc.spec.params.memory_principal = MemoryCapacity::finite(1);
  sc.spec.params.memory_agent = MemoryCapacity::finite(1);
  sc.spec.params.sigma_frac = 0.05;
  for (Metric m : kAllMetrics) {
    NormalizedSeries ns;
    ns.metric = m;
    for (int t = 0; t < T; ++t) {
      ns.values.push_back(0.5 + 0.1 * t);
      ns.ci_low.push_back(0.4 + 0.1 * t);
      ns.ci_high.push_back(0.6 + 0.1 * t);
    }
    sc.series.push_back(ns);
  }
  return {sc};
}

std::vector<DistanceRow> tiny_distances() {
  DistanceRow row;
  row.environment = "stable";
  row.comparison = "mp1_vs_mp5_at_ma1";
  row.metric = Metric::utility_agent;
  row.distance = 0.375;
  row.p_value = 0.0099990000999900012;
  return {row};
}

}  // namespace

TEST_CASE("empty config text yields the default grid") {
  RunConfig c = parse_config("");
  CHECK(c.eta == 0.5);
  CHECK(c.mu == 0.0);
  CHECK(c.timesteps == 20);
  CHECK(c.rounds == 700);
  CHECK(c.reservation_utility == 0.0);
  CHECK(c.base_seed == 42);
  CHECK(c.output_dir == "results");
  CHECK(c.format == "csv");
  CHECK(c.workers == 0);
  REQUIRE(c.memory_principal.size() == 4);
  REQUIRE(c.memory_agent.size() == 4);
  CHECK(c.memory_principal[0] == MemoryCapacity::finite(1));
  CHECK(c.memory_principal[3] == MemoryCapacity::unbounded());
  CHECK(c.sigma_fracs == std::vector<double>{0.05, 0.25, 0.45});
  // 4 x 4 x 3 scenarios by default
  CHECK(c.memory_principal.size() * c.memory_agent.size() * c.sigma_fracs.size() == 48);
}

TEST_CASE("config overrides and comments") {
  const char* text = R"(# experiment tweaks
eta = 0.8
rounds = 100        # quick pass
timesteps = 10
base_seed = 7
output_dir = "out # not a comment"
format = "json"
workers = 3
memory_principal = [1, "inf"]
memory_agent = [5]
sigma_fracs = [0.1, 0.2]
)";
  RunConfig c = parse_config(text);
  CHECK(c.eta == 0.8);
  CHECK(c.rounds == 100);
  CHECK(c.timesteps == 10);
  CHECK(c.base_seed == 7);
  CHECK(c.output_dir == "out # not a comment");
  CHECK(c.format == "json");
  CHECK(c.workers == 3);
  REQUIRE(c.memory_principal.size() == 2);
  CHECK(c.memory_principal[0] == MemoryCapacity::finite(1));
  CHECK(c.memory_principal[1] == MemoryCapacity::unbounded());
  REQUIRE(c.memory_agent.size() == 1);
  CHECK(c.memory_agent[0] == MemoryCapacity::finite(5));
  CHECK(c.sigma_fracs == std::vector<double>{0.1, 0.2});
}

TEST_CASE("workers accepts auto") {
  CHECK(parse_config("workers = \"auto\"").workers == 0);
  CHECK(parse_config("workers = 2").workers == 2);
  CHECK_THROWS_WITH_AS(parse_config("workers = 0"), doctest::Contains("workers"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config("workers = \"fast\""), doctest::Contains("workers"),
                       std::invalid_argument);
}

TEST_CASE("config errors name the offending key") {
  CHECK_THROWS_WITH_AS(parse_config("eta = -1.0"), doctest::Contains("eta"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config("eta = 0.0"), doctest::Contains("eta"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config("rounds = 0"), doctest::Contains("rounds"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config("frobnicate = 1"), doctest::Contains("frobnicate"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config("eta = banana"), doctest::Contains("eta"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config("memory_agent = [0]"),
                       doctest::Contains("memory_agent"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config("memory_agent = [2"),
                       doctest::Contains("memory_agent"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config("sigma_fracs = []"),
                       doctest::Contains("sigma_fracs"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config("format = \"xml\""), doctest::Contains("format"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config("just some words"), doctest::Contains("line 1"),
                       std::invalid_argument);
}

TEST_CASE("toml echo round-trips exactly") {
  RunConfig defaults;
  CHECK(parse_config(config_to_toml(defaults)) == defaults);

  RunConfig custom;
  custom.eta = 1.25;
  custom.mu = -0.125;
  custom.rounds = 50;
  custom.timesteps = 7;
  custom.base_seed = 123456789012345ull;
  custom.output_dir = "elsewhere";
  custom.format = "json";
  custom.workers = 4;
  custom.memory_principal = {MemoryCapacity::finite(2), MemoryCapacity::unbounded()};
  custom.memory_agent = {MemoryCapacity::finite(1)};
  custom.sigma_fracs = {0.05, 0.3};
  CHECK(parse_config(config_to_toml(custom)) == custom);
}

TEST_CASE("load_config reports a missing file") {
  CHECK_THROWS_WITH_AS(load_config("/nonexistent/nowhere.toml"),
                       doctest::Contains("nowhere.toml"), std::invalid_argument);
}

TEST_CASE("load_config reads a real file") {
  TempDir dir;
  fs::path cfg = dir.path / "run.toml";
  std::ofstream(cfg) << "rounds = 5\n";
  RunConfig c = load_config(cfg.string());
  CHECK(c.rounds == 5);
}

TEST_CASE("format_double survives a round-trip at full precision") {
  for (double v : {0.1, 1.0 / 3.0, 0.4532311572906648, -1.5e-300, 0.0, 123456789.125}) {
    std::string s = format_double(v);
    CHECK(std::stod(s) == v);
    CHECK(s.find(',') == std::string::npos);
  }
}

TEST_CASE("environment labels") {
  CHECK(environment_label(0.05) == "stable");
  CHECK(environment_label(0.25) == "mid-turbulent");
  CHECK(environment_label(0.45) == "turbulent");
  CHECK(environment_label(0.33) == "sigma_frac=0.33000000000000002");
}

TEST_CASE("preflight rejects an unusable output directory") {
  std::string error;
  // a path through an existing *file* cannot be created
  TempDir dir;
  fs::path blocker = dir.path / "file";
  std::ofstream(blocker) << "x";
  CHECK_FALSE(preflight_output_dir((blocker / "sub").string(), error));
  CHECK_FALSE(error.empty());

  error.clear();
  CHECK(preflight_output_dir((dir.path / "fresh" / "nested").string(), error));
  CHECK(error.empty());
  CHECK(fs::is_directory(dir.path / "fresh" / "nested"));
}

TEST_CASE("csv emission: exact header and row accounting") {
  TempDir dir;
  RunConfig config;
  config.rounds = 2;
  config.timesteps = 3;

  Benchmark bench;
  bench.premium_star = 0.45;
  bench.effort_star = 0.41;
  bench.outcome_star = 0.41;
  bench.utility_principal_star = 0.23;
  bench.utility_agent_star = 0.09;

  emit_results(tiny_scenarios(3), tiny_distances(), bench, config, dir.str());

  auto series_lines = lines_of(slurp(dir.path / "series.csv"));
  REQUIRE(series_lines.size() == 1 + 1 * 4 * 3);
  CHECK(series_lines[0] == "scenario_id,m_p,m_a,sigma_frac,t,metric,mean,ci_low,ci_high");
  CHECK(series_lines[1].rfind("mp1_ma1_s0.05,1,1,0.050000000000000003,1,premium,", 0) == 0);

  auto dist_lines = lines_of(slurp(dir.path / "distances.csv"));
  REQUIRE(dist_lines.size() == 2);
  CHECK(dist_lines[0] == "environment,comparison,metric,distance,p_value");
  CHECK(dist_lines[1].rfind("stable,mp1_vs_mp5_at_ma1,utility_agent,", 0) == 0);

  // benchmark.json carries the solve and the resolved sigmas
  auto bench_json = nlohmann::json::parse(slurp(dir.path / "benchmark.json"));
  CHECK(bench_json["premium_star"].get<double>() == 0.45);
  CHECK(bench_json["resolved_sigmas"].size() == 3);
  CHECK(bench_json["resolved_sigmas"][0]["environment"] == "stable");
  CHECK(bench_json["resolved_sigmas"][0]["sigma"].get<double>() ==
        doctest::Approx(0.05 * 0.41).epsilon(1e-15));
}

TEST_CASE("manifest checksums match the files on disk") {
  TempDir dir;
  RunConfig config;
  Benchmark bench;
  bench.outcome_star = 0.41;
  emit_results(tiny_scenarios(2), tiny_distances(), bench, config, dir.str());

  auto manifest = nlohmann::json::parse(slurp(dir.path / "manifest.json"));
  CHECK(manifest["base_seed"].get<std::uint64_t>() == config.base_seed);
  REQUIRE(manifest["checksums"].size() == 3);
  for (auto& [name, value] : manifest["checksums"].items()) {
    std::uint64_t actual = checksum_file((dir.path / name).string());
    std::string hex = value.get<std::string>();
    REQUIRE(hex.rfind("fnv1a64:", 0) == 0);
    CHECK(std::stoull(hex.substr(8), nullptr, 16) == actual);
  }

  // the config echo in the manifest reconstructs the config exactly
  RunConfig back = config_from_manifest((dir.path / "manifest.json").string());
  CHECK(back == config);
}

TEST_CASE("rewrite_distances refreshes table and checksum") {
  TempDir dir;
  RunConfig config;
  Benchmark bench;
  bench.outcome_star = 0.41;
  emit_results(tiny_scenarios(2), tiny_distances(), bench, config, dir.str());

  auto before = nlohmann::json::parse(slurp(dir.path / "manifest.json"));

  auto rows = tiny_distances();
  rows[0].distance = 0.999;
  rows[0].environment = "turbulent";
  rewrite_distances(rows, config, dir.str());

  auto dist_lines = lines_of(slurp(dir.path / "distances.csv"));
  REQUIRE(dist_lines.size() == 2);
  CHECK(dist_lines[1].rfind("turbulent,", 0) == 0);

  auto after = nlohmann::json::parse(slurp(dir.path / "manifest.json"));
  CHECK(after["checksums"]["distances.csv"] != before["checksums"]["distances.csv"]);
  CHECK(after["checksums"]["series.csv"] == before["checksums"]["series.csv"]);
  CHECK(std::stoull(after["checksums"]["distances.csv"].get<std::string>().substr(8),
                    nullptr, 16) == checksum_file((dir.path / "distances.csv").string()));
}

TEST_CASE("json format emits parseable arrays") {
  TempDir dir;
  RunConfig config;
  config.format = "json";
  Benchmark bench;
  bench.outcome_star = 0.41;
  emit_results(tiny_scenarios(2), tiny_distances(), bench, config, dir.str());

  auto series = nlohmann::json::parse(slurp(dir.path / "series.json"));
  REQUIRE(series.is_array());
  REQUIRE(series.size() == 4 * 2);
  CHECK(series[0]["scenario_id"] == "mp1_ma1_s0.05");
  CHECK(series[0]["t"] == 1);
  CHECK(series[0]["metric"] == "premium");
  CHECK(series[0]["mean"].get<double>() == 0.5);

  auto distances = nlohmann::json::parse(slurp(dir.path / "distances.json"));
  REQUIRE(distances.is_array());
  CHECK(distances[0]["comparison"] == "mp1_vs_mp5_at_ma1");

  // no stray csv files in json mode
  CHECK_FALSE(fs::exists(dir.path / "series.csv"));
  // manifest still present and consistent
  RunConfig back = config_from_manifest((dir.path / "manifest.json").string());
  CHECK(back == config);
}

TEST_CASE("checksum_file is sensitive to content") {
  TempDir dir;
  fs::path a = dir.path / "a.txt";
  fs::path b = dir.path / "b.txt";
  std::ofstream(a, std::ios::binary) << "hello";
  std::ofstream(b, std::ios::binary) << "hello!";
  CHECK(checksum_file(a.string()) != checksum_file(b.string()));
  // FNV-1a of "hello" is a published constant
  CHECK(checksum_file(a.string()) == 0xa430d84680aabd0bull);
  CHECK_THROWS_AS(checksum_file((dir.path / "missing").string()), std::runtime_error);
}
