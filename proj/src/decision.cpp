#include "hal/decision.hpp"

#include <algorithm>

namespace hal {

std::optional<Proposal> principal_propose(double belief_theta, double previous_incited,
                                          double eta, double reservation_utility,
                                          const UniformSampler& draw) {
  auto bounds = action_bounds(belief_theta, eta, reservation_utility);
  if (!bounds) return std::nullopt;

  std::array<double, 3> candidates;
  candidates[0] = draw(bounds->lower, bounds->upper);
  candidates[1] = draw(bounds->lower, bounds->upper);
  candidates[2] = std::clamp(previous_incited, bounds->lower, bounds->upper);

  int best = -1;
  double best_utility = 0.0;
  double best_premium = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double a = candidates[i];
    double premium, predicted;
    if (a == 0.0) {
      // Null contract: nothing incited, nothing paid. Feasible by convention
      // and worth exactly nothing, so any positive candidate dominates it.
      premium = 0.0;
      predicted = 0.0;
    } else {
      auto rho = premium_for_effort(a, belief_theta, eta);
      if (!rho) continue;
      premium = *rho;
      // Participation under the principal's own belief. Candidates come from
      // inside the bounds, so this only trims numerical edge cases; the slack
      // keeps a candidate sitting exactly on the lower bound alive.
      double agent_predicted = (1.0 - a / premium) / eta - 0.5 * a * a;
      if (agent_predicted < reservation_utility - 1e-9) continue;
      predicted = (1.0 - premium) * (a + belief_theta);
    }
    bool wins;
    if (best < 0) {
      wins = true;
    } else if (predicted != best_utility) {
      wins = predicted > best_utility;
    } else {
      // Exact tie: prefer the previous contract, then the smaller effort.
      wins = (i == 2) || (best != 2 && a < candidates[best]);
    }
    if (wins) {
      best = i;
      best_utility = predicted;
      best_premium = premium;
    }
  }
  if (best < 0) return std::nullopt;

  Proposal p;
  p.contract = Contract{best_premium, candidates[best]};
  p.candidates = candidates;
  p.predicted_outcome = candidates[best] + belief_theta;
  p.predicted_utility = best_utility;
  return p;
}

Response agent_respond(const Contract& contract, double belief_theta, double eta,
                       double reservation_utility) {
  const double a = best_response(contract.premium, belief_theta, eta);
  const double predicted =
      agent_utility(contract.premium * (a + belief_theta), a, eta);
  Response r;
  r.predicted_utility = predicted;
  r.accepted = predicted >= reservation_utility;
  r.effort = r.accepted ? a : 0.0;
  return r;
}

}  // namespace hal
