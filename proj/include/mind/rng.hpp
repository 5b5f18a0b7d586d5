#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace mind {

// Portable seeded generator.
//
// The raw engine is std::mt19937_64, whose output sequence is fixed by the
// C++ standard. The standard distributions are not (their algorithms are
// implementation-defined), so every derived draw is computed here:
//   uniform01  : top 53 bits of one engine output, scaled by 2^-53
//   below(n)   : Lemire multiply-shift with rejection
//   normal     : Box-Muller (cosine branch only, one pair of uniforms per draw)
//   poisson    : Knuth's product-of-uniforms method
// Same seed, same numbers on every platform with IEEE doubles.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // [0, 1)
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // [0, n), n > 0
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * n;
      if (static_cast<std::uint64_t>(m) >= threshold) return static_cast<std::uint64_t>(m >> 64);
    }
  }

  bool bernoulli(double p) { return uniform01() < p; }

  double normal(double mean, double stddev) {
    // 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    return mean + stddev * z;
  }

  std::uint64_t poisson(double lambda) {
    if (lambda <= 0.0) return 0;
    const double limit = std::exp(-lambda);
    std::uint64_t k = 0;
    double p = uniform01();
    while (p > limit) {
      ++k;
      p *= uniform01();
    }
    return k;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mind
