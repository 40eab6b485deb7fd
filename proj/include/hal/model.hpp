// Core domain types and the pure evaluation functions of the hidden-action
// model: production, sharing rule, and both actors' utilities.
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace hal {

// Memory capacity of an actor: a positive count of remembered values, or
// unbounded. Spelled "inf" in configs and CSV output.
class MemoryCapacity {
 public:
  static MemoryCapacity unbounded() { return MemoryCapacity(kUnbounded); }
  static MemoryCapacity finite(std::size_t n) {
    if (n == 0) throw std::invalid_argument("memory capacity must be >= 1");
    return MemoryCapacity(n);
  }

  bool is_unbounded() const { return cap_ == kUnbounded; }
  // Only valid for finite capacities.
  std::size_t value() const {
    if (is_unbounded()) throw std::logic_error("unbounded capacity has no value");
    return cap_;
  }
  bool admits(std::size_t n) const { return is_unbounded() || n <= cap_; }

  std::string str() const {
    return is_unbounded() ? "inf" : std::to_string(cap_);
  }
  // Parses "inf" or a positive integer.
  static MemoryCapacity parse(const std::string& text);

  friend bool operator==(MemoryCapacity a, MemoryCapacity b) {
    return a.cap_ == b.cap_;
  }

 private:
  static constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();
  explicit MemoryCapacity(std::size_t cap) : cap_(cap) {}
  std::size_t cap_;
};

inline MemoryCapacity MemoryCapacity::parse(const std::string& text) {
  if (text == "inf") return unbounded();
  // digits only: stoull would otherwise accept "-1" by wrapping it
  unsigned long long v = 0;
  try {
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos)
      throw std::invalid_argument(text);
    v = std::stoull(text);
  } catch (const std::exception&) {
    throw std::invalid_argument("memory capacity must be a positive integer or \"inf\": " + text);
  }
  if (v == 0)
    throw std::invalid_argument("memory capacity must be a positive integer or \"inf\": " + text);
  return finite(static_cast<std::size_t>(v));
}

// All exogenous constants of one scenario. sigma is the absolute standard
// deviation, resolved once per scenario as sigma_frac * x* after the
// second-best benchmark is solved; it is 0 until then.
struct ModelParams {
  double eta = 0.5;              // Arrow-Pratt coefficient, > 0
  double mu = 0.0;               // mean of the exogenous factor
  double sigma_frac = 0.0;       // sigma as a fraction of the benchmark outcome
  double sigma = 0.0;            // resolved absolute standard deviation
  MemoryCapacity memory_principal = MemoryCapacity::finite(1);
  MemoryCapacity memory_agent = MemoryCapacity::finite(1);
  int timesteps = 20;            // T
  int rounds = 700;              // R
  double reservation_utility = 0.0;  // U-bar

  // Throws std::invalid_argument naming the offending field.
  void validate() const {
    if (!(eta > 0.0)) throw std::invalid_argument("eta must be > 0");
    if (!(sigma_frac >= 0.0)) throw std::invalid_argument("sigma_frac must be >= 0");
    if (!(sigma >= 0.0)) throw std::invalid_argument("sigma must be >= 0");
    if (timesteps < 1) throw std::invalid_argument("timesteps must be >= 1");
    if (rounds < 1) throw std::invalid_argument("rounds must be >= 1");
  }
};

// Bounded FIFO store of exogenous-factor estimations/observations,
// oldest first. Insertion beyond capacity evicts exactly the oldest entry.
struct MemoryBuffer {
  MemoryCapacity capacity = MemoryCapacity::finite(1);
  std::vector<double> entries;  // oldest first

  explicit MemoryBuffer(MemoryCapacity cap = MemoryCapacity::finite(1))
      : capacity(cap) {}
};

// The per-period offer: output share rho and the effort it is meant to incite.
struct Contract {
  double premium = 0.0;         // rho_t in [0,1]
  double incited_effort = 0.0;  // a-tilde_t >= 0
};

// One timestep's realized quantities. For periods with no accepted contract
// (agent rejection or no feasible proposal) effort, outcome, compensation and
// both utilities are recorded as 0; premium/incited_effort hold the offer if
// one was made, else 0.
struct StepRecord {
  int t = 0;                       // 1-based period index
  double effort = 0.0;             // a_t
  double theta = 0.0;              // realized exogenous factor
  double outcome = 0.0;            // x_t
  double compensation = 0.0;       // s(x_t)
  double utility_principal = 0.0;  // U_P
  double utility_agent = 0.0;      // U_A
  bool accepted = false;
  double premium = 0.0;            // rho_t
  double incited_effort = 0.0;     // a-tilde_t
  double belief_principal = 0.0;   // learned expectation at the start of t
  double belief_agent = 0.0;
};

// The second-best reference point used for all normalization.
struct Benchmark {
  double premium_star = 0.0;            // rho*
  double effort_star = 0.0;             // a*
  double outcome_star = 0.0;            // x* (= a* at mu = 0)
  double utility_principal_star = 0.0;  // U_P*
  double utility_agent_star = 0.0;      // U_A*
};

// Production function: outcome from effort and the exogenous factor.
inline double outcome(double effort, double theta) { return effort + theta; }

// The principal keeps the outcome net of the agent's share.
inline double principal_utility(double outcome, double premium) {
  if (!(premium >= 0.0 && premium <= 1.0))
    throw std::domain_error("premium must lie in [0,1]");
  return outcome * (1.0 - premium);
}

// CARA utility of compensation minus quadratic effort disutility.
inline double agent_utility(double compensation, double effort, double eta) {
  if (!(eta > 0.0)) throw std::domain_error("eta must be > 0");
  return (1.0 - std::exp(-eta * compensation)) / eta - 0.5 * effort * effort;
}

}  // namespace hal
