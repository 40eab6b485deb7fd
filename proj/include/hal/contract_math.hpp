// Numerical kernel: the agent's best-response map, its inversion (the
// incentive-compatible premium for a target effort), feasible action bounds,
// and the second-best benchmark solver.
#pragma once

#include <optional>

#include "hal/model.hpp"

namespace hal {

// Feasible incited-effort range. An empty feasible set is signalled by the
// computing operation returning nullopt, never by lower > upper.
struct ActionBounds {
  double lower = 0.0;
  double upper = 0.0;
};

// Effort maximizing the agent's utility under share `premium` and point
// belief `belief_theta`. Root of premium*exp(-eta*premium*(a+theta)) = a,
// found by bisection; 0 when premium is 0.
double best_response(double premium, double belief_theta, double eta);

// Smallest premium in [0,1] whose best response equals target_effort.
// nullopt when even premium 1 incites less than the target (the candidate
// lies beyond the incentive-compatibility frontier). Requires target > 0.
std::optional<double> premium_for_effort(double target_effort, double belief_theta,
                                         double eta);

// Incited-effort range that is both incentive compatible (upper) and
// participation feasible (lower), under the given belief. lower = 0 means
// participation holds for arbitrarily small positive efforts. nullopt when
// no positive effort satisfies participation.
std::optional<ActionBounds> action_bounds(double belief_theta, double eta,
                                          double reservation_utility);

// Second-best contract at the unconditional expectation (theta = 0):
// maximizes (1 - rho) * best_response(rho) over rho in [0,1] subject to the
// agent's participation at reservation 0.
Benchmark solve_second_best(double eta);

}  // namespace hal
