#pragma once

#include <cstdint>
#include <random>

namespace mts {

/// Seeded random source used everywhere randomness is needed.
///
/// Doubles are derived from the raw 64-bit stream with the usual
/// (x >> 11) * 2^-53 construction instead of std::uniform_real_distribution,
/// whose output is not pinned down by the standard; this keeps every
/// seeded run reproducible across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  /// Uniform double in [0, 1).
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) {
    auto i = static_cast<std::uint64_t>(uniform01() * static_cast<double>(n));
    return i >= n ? n - 1 : i;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace mts
