#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace ssam::rng {

/// Uniform double in [0, 1) from the top 53 bits of one engine draw.
/// Gives the same stream on every platform, unlike the standard
/// distributions, whose output is implementation-defined.
inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// Uniform double in [lo, hi).
inline double uniform(std::mt19937_64& gen, double lo, double hi) {
  return lo + (hi - lo) * uniform01(gen);
}

/// Unbiased integer in [0, n) via rejection sampling.
inline std::uint64_t below(std::mt19937_64& gen, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t draw;
  do {
    draw = gen();
  } while (draw >= limit);
  return draw % n;
}

/// Fisher-Yates shuffle with the deterministic draw above.
template <typename T>
void shuffle(std::vector<T>& values, std::mt19937_64& gen) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(below(gen, i));
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace ssam::rng
