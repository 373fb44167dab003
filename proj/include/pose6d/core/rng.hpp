#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace pose6d {

/// Seedable random generator with platform-fixed output.
///
/// The engine is std::mt19937_64, whose bit stream is pinned by the C++
/// standard. Standard-library distributions are implementation-defined, so
/// all derived draws (uniform doubles, bounded ints, normals) are produced
/// here from the raw 64-bit stream:
///   - uniform():     top 53 bits scaled by 2^-53, giving [0,1)
///   - uniform_int(n): rejection sampling on the 64-bit stream, unbiased
///   - normal():      Box-Muller on two uniform draws, second value cached
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). Requires n > 0.
  std::uint64_t uniform_int(std::uint64_t n) {
    const std::uint64_t bound = n * ((~std::uint64_t{0}) / n);  // largest multiple of n
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= bound);
    return x % n;
  }

  /// Standard normal deviate.
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u1, u2;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double sigma) { return mean + sigma * normal(); }

 private:
  std::mt19937_64 engine_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace pose6d
