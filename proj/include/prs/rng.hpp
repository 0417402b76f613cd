#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

namespace prs {

/// Counter-based random stream built on the SplitMix64 output function.
/// Every draw is a pure function of (seed, stream tag, counter), so results
/// are reproducible independent of evaluation order or threading.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : base_(mix(seed ^ mix(stream * 0x9E3779B97F4A7C15ULL + 0x5851F42D4C957F2DULL))) {}

  std::uint64_t u64(std::uint64_t counter) const {
    return mix(base_ + (counter + 1) * 0x9E3779B97F4A7C15ULL);
  }

  /// Uniform in (0, 1): never returns exactly 0 or 1.
  double uniform(std::uint64_t counter) const {
    return (static_cast<double>(u64(counter) >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard-normal pair by Box-Muller; consumes two counter slots
  /// starting at 2*counter.
  std::pair<double, double> normal_pair(std::uint64_t counter) const {
    const double u1 = uniform(2 * counter);
    const double u2 = uniform(2 * counter + 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    return {r * std::cos(a), r * std::sin(a)};
  }

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t base_;
};

}  // namespace prs
