// Memory update and belief formation. Both actors learn the exogenous factor
// the same way: keep the most recent observations in a FIFO window and use
// their mean as the expectation, falling back to the prior mean when the
// window is empty.
#pragma once

#include <numeric>

#include "hal/model.hpp"

namespace hal {

// Appends one observation, evicting the oldest entry if the buffer is full.
inline void remember(MemoryBuffer& buf, double observation) {
  if (!buf.capacity.is_unbounded() && buf.entries.size() == buf.capacity.value())
    buf.entries.erase(buf.entries.begin());
  buf.entries.push_back(observation);
}

// Mean of the remembered observations; prior_mean when nothing is remembered.
inline double learned_expectation(const MemoryBuffer& buf, double prior_mean) {
  if (buf.entries.empty()) return prior_mean;
  double sum = std::accumulate(buf.entries.begin(), buf.entries.end(), 0.0);
  return sum / static_cast<double>(buf.entries.size());
}

// The principal cannot see effort and attributes the gap between the outcome
// and the incited effort to the exogenous factor.
inline double principal_estimate(double outcome, double incited_effort) {
  return outcome - incited_effort;
}

// The agent knows its own effort and backs the factor out exactly.
inline double agent_observe(double outcome, double effort) {
  return outcome - effort;
}

}  // namespace hal
