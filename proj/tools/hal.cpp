// hal: hidden-action simulator CLI.
//
//   hal benchmark            second-best contract for a given eta
//   hal run                  one scenario
//   hal sweep                the full scenario grid
//   hal stats                recompute distance tests from a results directory
//   hal cv                   run-count stabilization report
#include <charconv>
#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "hal/driver.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string seed_text;
  int rounds = 0;
  int timesteps = 0;
  std::string out_dir;
  std::string format;
  std::string workers;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "TOML config file");
  cmd->add_option("--seed", opts.seed_text, "base seed (overrides HAL_SEED)");
  cmd->add_option("--rounds", opts.rounds, "simulation rounds per scenario")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--timesteps", opts.timesteps, "periods per round")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--format", opts.format, "table format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--workers", opts.workers, "worker threads, or \"auto\"");
}

std::uint64_t parse_seed(const std::string& text, const char* source) {
  std::uint64_t seed = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), seed);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw std::invalid_argument(std::string(source) + " is not an unsigned integer: " +
                                text);
  return seed;
}

hal::RunConfig build_config(const CommonOpts& opts) {
  hal::RunConfig config =
      opts.config_path.empty() ? hal::RunConfig{} : hal::load_config(opts.config_path);
  if (const char* env = std::getenv("HAL_SEED"))
    config.base_seed = parse_seed(env, "HAL_SEED");
  if (!opts.seed_text.empty()) config.base_seed = parse_seed(opts.seed_text, "--seed");
  if (opts.rounds > 0) config.rounds = opts.rounds;
  if (opts.timesteps > 0) config.timesteps = opts.timesteps;
  if (!opts.out_dir.empty()) config.output_dir = opts.out_dir;
  if (!opts.format.empty()) config.format = opts.format;
  if (!opts.workers.empty()) {
    if (opts.workers == "auto") {
      config.workers = 0;
    } else {
      int w = 0;
      auto res = std::from_chars(opts.workers.data(),
                                 opts.workers.data() + opts.workers.size(), w);
      if (res.ec != std::errc() || res.ptr != opts.workers.data() + opts.workers.size() ||
          w < 1)
        throw std::invalid_argument("--workers must be a positive integer or \"auto\"");
      config.workers = w;
    }
  }
  config.validate();
  return config;
}

int run_and_emit(const hal::RunConfig& config) {
  std::string error;
  if (!hal::preflight_output_dir(config.output_dir, error)) {
    std::cerr << "error: " << error << "\n";
    return 1;
  }
  hal::SweepOutput output = hal::run_experiment(config);
  hal::emit_results(output.scenarios, output.distances, output.benchmark, config,
                    config.output_dir);

  std::cout << "scenarios=" << output.scenarios.size()
            << " rounds_per_scenario=" << config.rounds
            << " timesteps=" << config.timesteps << "\n";
  std::cout << "rejections=" << output.rejections << " no_offers=" << output.no_offers
            << "\n";
  const char* table_ext = config.format == "json" ? "json" : "csv";
  std::cout << "wrote " << config.output_dir << "/series." << table_ext << " "
            << config.output_dir << "/distances." << table_ext << " "
            << config.output_dir << "/benchmark.json " << config.output_dir
            << "/manifest.json\n";
  return 0;
}

int cmd_benchmark(const CommonOpts& opts, double eta_flag) {
  hal::RunConfig config = build_config(opts);
  const double eta = eta_flag > 0.0 ? eta_flag : config.eta;
  hal::Benchmark b = hal::solve_second_best(eta);
  if (config.format == "json") {
    nlohmann::json out{{"eta", eta},
                       {"premium_star", b.premium_star},
                       {"effort_star", b.effort_star},
                       {"outcome_star", b.outcome_star},
                       {"utility_principal_star", b.utility_principal_star},
                       {"utility_agent_star", b.utility_agent_star}};
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "eta=" << hal::format_double(eta) << "\n"
              << "premium_star=" << hal::format_double(b.premium_star) << "\n"
              << "effort_star=" << hal::format_double(b.effort_star) << "\n"
              << "outcome_star=" << hal::format_double(b.outcome_star) << "\n"
              << "utility_principal_star="
              << hal::format_double(b.utility_principal_star) << "\n"
              << "utility_agent_star=" << hal::format_double(b.utility_agent_star)
              << "\n";
  }
  return 0;
}

int cmd_stats(const CommonOpts& opts) {
  if (opts.out_dir.empty())
    throw std::invalid_argument("stats requires --out DIR (a directory with manifest.json)");
  hal::RunConfig config =
      hal::config_from_manifest(opts.out_dir + "/manifest.json");
  if (!opts.workers.empty() && opts.workers != "auto")
    config.workers = std::stoi(opts.workers);
  auto distances = hal::recompute_distances(config);
  hal::rewrite_distances(distances, config, opts.out_dir);
  std::cout << "comparisons=" << distances.size() << "\n";
  for (const auto& row : distances) {
    std::cout << row.environment << " " << row.comparison
              << " distance=" << hal::format_double(row.distance)
              << " p_value=" << hal::format_double(row.p_value) << "\n";
  }
  return 0;
}

int cmd_cv(const CommonOpts& opts, const std::string& mp_text, const std::string& ma_text,
           double sigma_frac, int window, double threshold) {
  hal::RunConfig config = build_config(opts);
  config.memory_principal = {hal::MemoryCapacity::parse(mp_text)};
  config.memory_agent = {hal::MemoryCapacity::parse(ma_text)};
  config.sigma_fracs = {sigma_frac};

  hal::Benchmark benchmark = hal::solve_second_best(config.eta);
  auto specs = hal::expand_grid(config.memory_principal, config.memory_agent,
                                config.sigma_fracs, hal::params_from_config(config),
                                benchmark.outcome_star, config.base_seed);
  auto rounds = hal::run_scenario(specs[0], config.workers);

  std::cout << "scenario=" << specs[0].scenario_id << " rounds=" << config.rounds
            << " window=" << window << " threshold=" << hal::format_double(threshold)
            << "\n";
  for (hal::Metric metric : hal::kAllMetrics) {
    auto traces = hal::normalized_traces(rounds, metric, benchmark);
    std::vector<double> final_values;
    final_values.reserve(traces.size());
    for (const auto& trace : traces) final_values.push_back(trace.back());
    hal::CvReport report = hal::cv_stabilization(final_values, window, threshold);
    for (int k : report.undefined_ends)
      std::cerr << "warning: CV undefined (mean ~ 0) for " << hal::metric_name(metric)
                << " at window " << k << "\n";
    std::cout << "metric=" << hal::metric_name(metric)
              << " windows=" << report.window_ends.size()
              << " undefined=" << report.undefined_ends.size() << " stabilized_at=";
    if (report.stabilized_at)
      std::cout << *report.stabilized_at;
    else
      std::cout << "none";
    std::cout << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hidden-action simulator"};
  app.require_subcommand(1);

  CommonOpts bench_opts, run_opts, sweep_opts, stats_opts, cv_opts;

  CLI::App* bench = app.add_subcommand("benchmark", "print the second-best contract");
  double eta_flag = 0.0;
  bench->add_option("--eta", eta_flag, "risk-aversion coefficient")
      ->check(CLI::PositiveNumber);
  add_common(bench, bench_opts);

  CLI::App* run = app.add_subcommand("run", "simulate one scenario");
  std::string run_mp = "1", run_ma = "1";
  double run_sigma = 0.05;
  run->add_option("--mp", run_mp, "principal memory (positive integer or inf)");
  run->add_option("--ma", run_ma, "agent memory (positive integer or inf)");
  run->add_option("--sigma-frac", run_sigma, "sigma as a fraction of the benchmark outcome")
      ->check(CLI::NonNegativeNumber);
  add_common(run, run_opts);

  CLI::App* sweep = app.add_subcommand("sweep", "simulate the full scenario grid");
  add_common(sweep, sweep_opts);

  CLI::App* stats = app.add_subcommand("stats", "recompute distances from a results dir");
  add_common(stats, stats_opts);

  CLI::App* cv = app.add_subcommand("cv", "run-count stabilization report");
  std::string cv_mp = "1", cv_ma = "1";
  double cv_sigma = 0.05, cv_threshold = 0.01;
  int cv_window = 50;
  cv->add_option("--mp", cv_mp, "principal memory (positive integer or inf)");
  cv->add_option("--ma", cv_ma, "agent memory (positive integer or inf)");
  cv->add_option("--sigma-frac", cv_sigma, "sigma as a fraction of the benchmark outcome")
      ->check(CLI::NonNegativeNumber);
  cv->add_option("--window", cv_window, "window step in rounds")
      ->check(CLI::PositiveNumber);
  cv->add_option("--threshold", cv_threshold, "stabilization threshold on CV differences")
      ->check(CLI::PositiveNumber);
  add_common(cv, cv_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (bench->parsed()) return cmd_benchmark(bench_opts, eta_flag);
    if (run->parsed()) {
      hal::RunConfig config = build_config(run_opts);
      config.memory_principal = {hal::MemoryCapacity::parse(run_mp)};
      config.memory_agent = {hal::MemoryCapacity::parse(run_ma)};
      config.sigma_fracs = {run_sigma};
      return run_and_emit(config);
    }
    if (sweep->parsed()) return run_and_emit(build_config(sweep_opts));
    if (stats->parsed()) return cmd_stats(stats_opts);
    if (cv->parsed())
      return cmd_cv(cv_opts, cv_mp, cv_ma, cv_sigma, cv_window, cv_threshold);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
