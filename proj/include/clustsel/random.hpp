#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace clustsel {

// Seeded generator used by every randomized component. All randomness in the
// library flows through explicit seeds; there is no global generator state.
// Draws avoid std:: distribution objects, whose output is
// implementation-defined, so a seed produces the same stream everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Unbiased integer in [0, bound); bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  // Standard normal via Box-Muller.
  double normal();

  // k distinct indices drawn from [0, n) by partial Fisher-Yates.
  std::vector<int> sample_indices(int n, int k);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace clustsel
