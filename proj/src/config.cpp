#include "hal/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hal {

namespace {

struct Value {
  enum Kind { number, string, array } kind = number;
  std::string text;          // number literal or string payload
  std::vector<Value> items;  // array elements
};

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& what) {
  throw std::invalid_argument("config: " + what);
}

Value parse_value(const std::string& raw, const std::string& key);

Value parse_array(const std::string& raw, const std::string& key) {
  Value v;
  v.kind = Value::array;
  std::string inner = trim(raw.substr(1, raw.size() - 2));
  if (inner.empty()) return v;
  std::size_t pos = 0;
  while (pos <= inner.size()) {
    std::size_t comma = std::string::npos;
    bool quoted = false;
    for (std::size_t i = pos; i < inner.size(); ++i) {
      if (inner[i] == '"') quoted = !quoted;
      else if (inner[i] == ',' && !quoted) { comma = i; break; }
    }
    std::string element =
        trim(comma == std::string::npos ? inner.substr(pos) : inner.substr(pos, comma - pos));
    if (element.empty()) fail("empty element in array for \"" + key + "\"");
    v.items.push_back(parse_value(element, key));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return v;
}

Value parse_value(const std::string& raw, const std::string& key) {
  if (raw.empty()) fail("missing value for \"" + key + "\"");
  if (raw.front() == '[') {
    if (raw.back() != ']') fail("unterminated array for \"" + key + "\"");
    return parse_array(raw, key);
  }
  Value v;
  if (raw.front() == '"') {
    if (raw.size() < 2 || raw.back() != '"' || raw.find('"', 1) != raw.size() - 1)
      fail("malformed string for \"" + key + "\"");
    v.kind = Value::string;
    v.text = raw.substr(1, raw.size() - 2);
    return v;
  }
  v.kind = Value::number;
  v.text = raw;
  return v;
}

double as_double(const Value& v, const std::string& key) {
  if (v.kind != Value::number) fail("\"" + key + "\" must be a number");
  double out = 0.0;
  auto res = std::from_chars(v.text.data(), v.text.data() + v.text.size(), out);
  if (res.ec != std::errc() || res.ptr != v.text.data() + v.text.size())
    fail("\"" + key + "\" is not a valid number: " + v.text);
  return out;
}

long long as_integer(const Value& v, const std::string& key) {
  if (v.kind != Value::number) fail("\"" + key + "\" must be an integer");
  long long out = 0;
  auto res = std::from_chars(v.text.data(), v.text.data() + v.text.size(), out);
  if (res.ec != std::errc() || res.ptr != v.text.data() + v.text.size())
    fail("\"" + key + "\" is not a valid integer: " + v.text);
  return out;
}

std::uint64_t as_seed(const Value& v, const std::string& key) {
  if (v.kind != Value::number) fail("\"" + key + "\" must be an unsigned integer");
  std::uint64_t out = 0;
  auto res = std::from_chars(v.text.data(), v.text.data() + v.text.size(), out);
  if (res.ec != std::errc() || res.ptr != v.text.data() + v.text.size())
    fail("\"" + key + "\" is not a valid unsigned integer: " + v.text);
  return out;
}

MemoryCapacity as_memory(const Value& v, const std::string& key) {
  if (v.kind == Value::string) {
    if (v.text == "inf") return MemoryCapacity::unbounded();
    fail("\"" + key + "\" entries must be positive integers or \"inf\"");
  }
  long long n = as_integer(v, key);
  if (n < 1) fail("\"" + key + "\" entries must be >= 1");
  return MemoryCapacity::finite(static_cast<std::size_t>(n));
}

std::vector<MemoryCapacity> as_memory_list(const Value& v, const std::string& key) {
  if (v.kind != Value::array) fail("\"" + key + "\" must be an array");
  std::vector<MemoryCapacity> out;
  for (const Value& item : v.items) out.push_back(as_memory(item, key));
  return out;
}

// Strips a trailing comment, respecting quoted strings.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    else if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

std::string format_short(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, res.ptr);
  // Keep floats recognizably floats in the echo.
  if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
      s.find("inf") == std::string::npos && s.find("nan") == std::string::npos)
    s += ".0";
  return s;
}

}  // namespace

RunConfig::RunConfig()
    : memory_principal{MemoryCapacity::finite(1), MemoryCapacity::finite(3),
                       MemoryCapacity::finite(5), MemoryCapacity::unbounded()},
      memory_agent{MemoryCapacity::finite(1), MemoryCapacity::finite(3),
                   MemoryCapacity::finite(5), MemoryCapacity::unbounded()},
      sigma_fracs{0.05, 0.25, 0.45} {}

void RunConfig::validate() const {
  if (!(eta > 0.0)) fail("\"eta\" must be > 0");
  if (timesteps < 1) fail("\"timesteps\" must be >= 1");
  if (rounds < 1) fail("\"rounds\" must be >= 1");
  if (format != "csv" && format != "json") fail("\"format\" must be csv or json");
  if (workers < 0) fail("\"workers\" must be positive or \"auto\"");
  if (memory_principal.empty()) fail("\"memory_principal\" must be non-empty");
  if (memory_agent.empty()) fail("\"memory_agent\" must be non-empty");
  if (sigma_fracs.empty()) fail("\"sigma_fracs\" must be non-empty");
  for (double f : sigma_fracs)
    if (!(f >= 0.0)) fail("\"sigma_fracs\" entries must be >= 0");
}

RunConfig parse_config(const std::string& text) {
  RunConfig config;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string content = trim(strip_comment(line));
    if (content.empty()) continue;
    std::size_t eq = content.find('=');
    if (eq == std::string::npos)
      fail("line " + std::to_string(lineno) + " is not a key = value pair");
    std::string key = trim(content.substr(0, eq));
    Value value = parse_value(trim(content.substr(eq + 1)), key);

    if (key == "eta") config.eta = as_double(value, key);
    else if (key == "mu") config.mu = as_double(value, key);
    else if (key == "timesteps") config.timesteps = static_cast<int>(as_integer(value, key));
    else if (key == "rounds") config.rounds = static_cast<int>(as_integer(value, key));
    else if (key == "reservation_utility") config.reservation_utility = as_double(value, key);
    else if (key == "base_seed") config.base_seed = as_seed(value, key);
    else if (key == "output_dir") {
      if (value.kind != Value::string) fail("\"output_dir\" must be a string");
      config.output_dir = value.text;
    } else if (key == "format") {
      if (value.kind != Value::string) fail("\"format\" must be a string");
      config.format = value.text;
    } else if (key == "workers") {
      if (value.kind == Value::string) {
        if (value.text != "auto") fail("\"workers\" must be a positive integer or \"auto\"");
        config.workers = 0;
      } else {
        long long w = as_integer(value, key);
        if (w < 1) fail("\"workers\" must be a positive integer or \"auto\"");
        config.workers = static_cast<int>(w);
      }
    } else if (key == "memory_principal") {
      config.memory_principal = as_memory_list(value, key);
    } else if (key == "memory_agent") {
      config.memory_agent = as_memory_list(value, key);
    } else if (key == "sigma_fracs") {
      if (value.kind != Value::array) fail("\"sigma_fracs\" must be an array");
      config.sigma_fracs.clear();
      for (const Value& item : value.items)
        config.sigma_fracs.push_back(as_double(item, key));
    } else {
      fail("unknown key \"" + key + "\"");
    }
  }
  config.validate();
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_to_toml(const RunConfig& config) {
  std::ostringstream out;
  out << "eta = " << format_short(config.eta) << "\n";
  out << "mu = " << format_short(config.mu) << "\n";
  out << "timesteps = " << config.timesteps << "\n";
  out << "rounds = " << config.rounds << "\n";
  out << "reservation_utility = " << format_short(config.reservation_utility) << "\n";
  out << "base_seed = " << config.base_seed << "\n";
  out << "output_dir = \"" << config.output_dir << "\"\n";
  out << "format = \"" << config.format << "\"\n";
  if (config.workers == 0)
    out << "workers = \"auto\"\n";
  else
    out << "workers = " << config.workers << "\n";
  auto memory_list = [&out](const char* key, const std::vector<MemoryCapacity>& caps) {
    out << key << " = [";
    for (std::size_t i = 0; i < caps.size(); ++i) {
      if (i) out << ", ";
      if (caps[i].is_unbounded())
        out << "\"inf\"";
      else
        out << caps[i].value();
    }
    out << "]\n";
  };
  memory_list("memory_principal", config.memory_principal);
  memory_list("memory_agent", config.memory_agent);
  out << "sigma_fracs = [";
  for (std::size_t i = 0; i < config.sigma_fracs.size(); ++i) {
    if (i) out << ", ";
    out << format_short(config.sigma_fracs[i]);
  }
  out << "]\n";
  return out.str();
}

}  // namespace hal
