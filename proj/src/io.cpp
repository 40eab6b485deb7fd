#include "hal/io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace hal {

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << content;
  if (!out) throw std::runtime_error("write to " + path + " failed");
}

std::string checksum_hex(std::uint64_t checksum) {
  char buf[20];
  auto res = std::to_chars(buf, buf + sizeof(buf), checksum, 16);
  std::string hex(buf, res.ptr);
  return "fnv1a64:" + std::string(16 - hex.size(), '0') + hex;
}

std::string series_table_name(const RunConfig& config) {
  return config.format == "json" ? "series.json" : "series.csv";
}

std::string distances_table_name(const RunConfig& config) {
  return config.format == "json" ? "distances.json" : "distances.csv";
}

std::string render_series_csv(const std::vector<ScenarioSeries>& scenarios) {
  std::ostringstream out;
  out << "scenario_id,m_p,m_a,sigma_frac,t,metric,mean,ci_low,ci_high\n";
  for (const ScenarioSeries& sc : scenarios) {
    const ModelParams& p = sc.spec.params;
    for (const NormalizedSeries& ns : sc.series) {
      for (std::size_t t = 0; t < ns.values.size(); ++t) {
        out << sc.spec.scenario_id << ',' << p.memory_principal.str() << ','
            << p.memory_agent.str() << ',' << format_double(p.sigma_frac) << ','
            << (t + 1) << ',' << metric_name(ns.metric) << ','
            << format_double(ns.values[t]) << ',' << format_double(ns.ci_low[t]) << ','
            << format_double(ns.ci_high[t]) << '\n';
      }
    }
  }
  return out.str();
}

json series_row_json(const ScenarioSeries& sc, const NormalizedSeries& ns, std::size_t t) {
  const ModelParams& p = sc.spec.params;
  return json{{"scenario_id", sc.spec.scenario_id},
              {"m_p", p.memory_principal.str()},
              {"m_a", p.memory_agent.str()},
              {"sigma_frac", p.sigma_frac},
              {"t", t + 1},
              {"metric", metric_name(ns.metric)},
              {"mean", ns.values[t]},
              {"ci_low", ns.ci_low[t]},
              {"ci_high", ns.ci_high[t]}};
}

std::string render_series_json(const std::vector<ScenarioSeries>& scenarios) {
  json rows = json::array();
  for (const ScenarioSeries& sc : scenarios)
    for (const NormalizedSeries& ns : sc.series)
      for (std::size_t t = 0; t < ns.values.size(); ++t)
        rows.push_back(series_row_json(sc, ns, t));
  return rows.dump(2) + "\n";
}

std::string render_distances_csv(const std::vector<DistanceRow>& distances) {
  std::ostringstream out;
  out << "environment,comparison,metric,distance,p_value\n";
  for (const DistanceRow& row : distances) {
    out << row.environment << ',' << row.comparison << ',' << metric_name(row.metric)
        << ',' << format_double(row.distance) << ',' << format_double(row.p_value)
        << '\n';
  }
  return out.str();
}

std::string render_distances_json(const std::vector<DistanceRow>& distances) {
  json rows = json::array();
  for (const DistanceRow& row : distances) {
    rows.push_back(json{{"environment", row.environment},
                        {"comparison", row.comparison},
                        {"metric", metric_name(row.metric)},
                        {"distance", row.distance},
                        {"p_value", row.p_value}});
  }
  return rows.dump(2) + "\n";
}

json config_json(const RunConfig& config) {
  auto memory_json = [](const std::vector<MemoryCapacity>& caps) {
    json list = json::array();
    for (MemoryCapacity c : caps) {
      if (c.is_unbounded())
        list.push_back("inf");
      else
        list.push_back(c.value());
    }
    return list;
  };
  return json{{"eta", config.eta},
              {"mu", config.mu},
              {"timesteps", config.timesteps},
              {"rounds", config.rounds},
              {"reservation_utility", config.reservation_utility},
              {"base_seed", config.base_seed},
              {"output_dir", config.output_dir},
              {"format", config.format},
              {"workers", config.workers == 0 ? json("auto") : json(config.workers)},
              {"memory_principal", memory_json(config.memory_principal)},
              {"memory_agent", memory_json(config.memory_agent)},
              {"sigma_fracs", config.sigma_fracs}};
}

void write_manifest(const RunConfig& config, const std::string& dir,
                    const std::vector<std::string>& artifacts) {
  json manifest;
  manifest["base_seed"] = config.base_seed;
  manifest["config"] = config_json(config);
  json checksums = json::object();
  for (const std::string& name : artifacts)
    checksums[name] = checksum_hex(checksum_file((fs::path(dir) / name).string()));
  manifest["checksums"] = checksums;
  write_file((fs::path(dir) / "manifest.json").string(), manifest.dump(2) + "\n");
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string environment_label(double sigma_frac) {
  if (sigma_frac == 0.05) return "stable";
  if (sigma_frac == 0.25) return "mid-turbulent";
  if (sigma_frac == 0.45) return "turbulent";
  return "sigma_frac=" + format_double(sigma_frac);
}

bool preflight_output_dir(const std::string& dir, std::string& error) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec && !fs::is_directory(dir)) {
    error = "cannot create output directory " + dir + ": " + ec.message();
    return false;
  }
  fs::path probe = fs::path(dir) / ".write_probe";
  {
    std::ofstream out(probe, std::ios::binary | std::ios::trunc);
    if (!out) {
      error = "output directory " + dir + " is not writable";
      return false;
    }
  }
  fs::remove(probe, ec);
  return true;
}

void emit_results(const std::vector<ScenarioSeries>& scenarios,
                  const std::vector<DistanceRow>& distances, const Benchmark& benchmark,
                  const RunConfig& config, const std::string& dir) {
  const std::string series_name = series_table_name(config);
  const std::string distances_name = distances_table_name(config);

  write_file((fs::path(dir) / series_name).string(),
             config.format == "json" ? render_series_json(scenarios)
                                     : render_series_csv(scenarios));
  write_file((fs::path(dir) / distances_name).string(),
             config.format == "json" ? render_distances_json(distances)
                                     : render_distances_csv(distances));

  json bench{{"eta", config.eta},
             {"premium_star", benchmark.premium_star},
             {"effort_star", benchmark.effort_star},
             {"outcome_star", benchmark.outcome_star},
             {"utility_principal_star", benchmark.utility_principal_star},
             {"utility_agent_star", benchmark.utility_agent_star}};
  json sigmas = json::array();
  for (double frac : config.sigma_fracs) {
    sigmas.push_back(json{{"sigma_frac", frac},
                          {"sigma", frac * benchmark.outcome_star},
                          {"environment", environment_label(frac)}});
  }
  bench["resolved_sigmas"] = sigmas;
  write_file((fs::path(dir) / "benchmark.json").string(), bench.dump(2) + "\n");

  write_manifest(config, dir, {series_name, distances_name, "benchmark.json"});
}

void rewrite_distances(const std::vector<DistanceRow>& distances, const RunConfig& config,
                       const std::string& dir) {
  const std::string distances_name = distances_table_name(config);
  write_file((fs::path(dir) / distances_name).string(),
             config.format == "json" ? render_distances_json(distances)
                                     : render_distances_csv(distances));

  fs::path manifest_path = fs::path(dir) / "manifest.json";
  std::ifstream in(manifest_path);
  if (!in) throw std::runtime_error("cannot open " + manifest_path.string());
  json manifest = json::parse(in);
  manifest["checksums"][distances_name] =
      checksum_hex(checksum_file((fs::path(dir) / distances_name).string()));
  write_file(manifest_path.string(), manifest.dump(2) + "\n");
}

RunConfig config_from_manifest(const std::string& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw std::runtime_error("cannot open " + manifest_path);
  json manifest = json::parse(in);
  const json& c = manifest.at("config");

  RunConfig config;
  config.eta = c.at("eta").get<double>();
  config.mu = c.at("mu").get<double>();
  config.timesteps = c.at("timesteps").get<int>();
  config.rounds = c.at("rounds").get<int>();
  config.reservation_utility = c.at("reservation_utility").get<double>();
  config.base_seed = c.at("base_seed").get<std::uint64_t>();
  config.output_dir = c.at("output_dir").get<std::string>();
  config.format = c.at("format").get<std::string>();
  if (c.at("workers").is_string())
    config.workers = 0;
  else
    config.workers = c.at("workers").get<int>();
  auto memory_list = [](const json& list) {
    std::vector<MemoryCapacity> out;
    for (const json& item : list) {
      if (item.is_string())
        out.push_back(MemoryCapacity::parse(item.get<std::string>()));
      else
        out.push_back(MemoryCapacity::finite(item.get<std::size_t>()));
    }
    return out;
  };
  config.memory_principal = memory_list(c.at("memory_principal"));
  config.memory_agent = memory_list(c.at("memory_agent"));
  config.sigma_fracs = c.at("sigma_fracs").get<std::vector<double>>();
  config.validate();
  return config;
}

std::uint64_t checksum_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path + " for checksumming");
  std::uint64_t h = 0xCBF29CE484222325ull;
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001B3ull;
    }
    if (!in) break;
  }
  return h;
}

}  // namespace hal
