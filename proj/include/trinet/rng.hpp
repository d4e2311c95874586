#pragma once

// Deterministic PRNG with a fully pinned algorithm (splitmix64 + xoshiro256**
// and Box-Muller gaussians), so that seeded runs are byte-reproducible across
// platforms and standard-library versions.

#include <cstdint>

namespace trinet {

class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Independent stream for sub-task `index` of a master seed.
  static Rng substream(std::uint64_t master_seed, std::uint64_t index);

  std::uint64_t next_u64();
  // Uniform in [0, 1).
  double uniform();
  // Uniform in [lo, hi).
  double uniform(double lo, double hi);
  // Integer in [0, n).
  std::uint64_t uniform_int(std::uint64_t n);
  // Standard normal (Box-Muller).
  double gaussian();

 private:
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace trinet
