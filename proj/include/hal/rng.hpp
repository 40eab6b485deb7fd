// Counter-based deterministic randomness. Every (scenario, round, purpose)
// triple gets its own stream, so results are independent of scheduling and
// worker count. Normal deviates come from our own inverse-CDF implementation
// to keep output byte-identical across platforms and standard libraries.
#pragma once

#include <cstdint>
#include <string>

namespace hal {

// splitmix64 output function over a weyl sequence.
struct SplitMix64 {
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform on (0,1), strictly excluding both endpoints: 53-bit mantissa
  // shifted to bin centers. Safe to feed into the normal inverse CDF.
  double next_unit() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1p-53;
  }

  // Uniform on [lo, hi).
  double next_uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(next() >> 11) * 0x1p-53);
  }

  double next_normal(double mean, double sd);
};

// Substream purposes. Keeping them separate means the t-th environment draw
// of a round is always the t-th value of the noise stream, no matter how the
// decision logic consumed search randomness.
enum class StreamPurpose : std::uint64_t {
  noise = 0,
  search = 1,
  permutation = 2,
};

std::uint64_t fnv1a64(const std::string& text);

// Derives the seed for one (scenario, round, purpose) stream from the base
// seed. Chained mixing, not XOR, so field order matters.
std::uint64_t derive_stream_seed(std::uint64_t base_seed,
                                 const std::string& scenario_id,
                                 std::uint64_t round_index,
                                 StreamPurpose purpose);

// Inverse of the standard normal CDF, accurate to ~1e-15 over (0,1).
double normal_quantile(double p);

}  // namespace hal
