#pragma once

#include <cstdint>
#include <random>

namespace dynaplan {

/// Seeded random source. All draws are derived from raw mt19937_64 output so
/// that a given seed produces the same stream on every platform; the standard
/// distribution classes do not guarantee that.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform in [0, 1).
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

  /// Uniform integer in [0, n). n must be positive.
  int below(int n) {
    int v = static_cast<int>(uniform01() * n);
    return v < n ? v : n - 1;
  }

  bool coin_flip() { return (gen_() & 1u) != 0; }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace dynaplan
