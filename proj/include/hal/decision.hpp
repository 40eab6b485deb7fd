// Per-period decisions of both actors: the principal's candidate discovery
// and contract selection, and the agent's accept/reject and effort choice.
#pragma once

#include <array>
#include <functional>
#include <optional>

#include "hal/contract_math.hpp"
#include "hal/model.hpp"

namespace hal {

struct Proposal {
  Contract contract;
  std::array<double, 3> candidates{};  // two draws, then the clamped previous effort
  double predicted_outcome = 0.0;      // candidate effort + belief
  double predicted_utility = 0.0;      // principal's predicted payoff
};

struct Response {
  bool accepted = false;
  double effort = 0.0;  // 0 when rejected
  double predicted_utility = 0.0;
};

// Uniform draw on [lo, hi). Injected so tests can force specific candidates.
using UniformSampler = std::function<double(double, double)>;

// Discovers two random candidates inside the feasible bounds, re-prices each
// candidate (including the previous incited effort, clamped into today's
// bounds), and picks the one with the highest predicted principal utility.
// Ties go to the previous effort, then to the smaller one. nullopt when the
// bounds are infeasible or every candidate gets discarded: no offer this
// period.
std::optional<Proposal> principal_propose(double belief_theta, double previous_incited,
                                          double eta, double reservation_utility,
                                          const UniformSampler& draw);

// The agent responds with its own best effort under its own belief and
// accepts exactly when the predicted utility reaches the reservation level.
Response agent_respond(const Contract& contract, double belief_theta, double eta,
                       double reservation_utility);

}  // namespace hal
