#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace h2sgnn {

// mt19937_64 with explicit output mapping. std::*_distribution is
// implementation-defined, so all draws go through these helpers to keep
// seeded runs reproducible across standard libraries.

inline double uniform_unit(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;  // [0, 1)
}

inline double uniform(std::mt19937_64& gen, double lo, double hi) {
  return lo + (hi - lo) * uniform_unit(gen);
}

// Box-Muller; draws two words per sample.
inline double normal(std::mt19937_64& gen) {
  double u1 = uniform_unit(gen);
  double u2 = uniform_unit(gen);
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Unbiased integer in [0, n) by rejection.
inline std::uint64_t uniform_index(std::mt19937_64& gen, std::uint64_t n) {
  const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % n;
  std::uint64_t x = gen();
  while (x >= limit) x = gen();
  return x % n;
}

}  // namespace h2sgnn
