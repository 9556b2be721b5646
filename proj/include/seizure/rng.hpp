#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace seizure {

using Rng = std::mt19937_64;

/// Derives an independent sub-seed for stream `index` of a run seeded with
/// `seed` (splitmix64 finalizer). Used wherever work is split per tree, per
/// row or per fold so results do not depend on execution order.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Uniform draw from [0, 1) built from the top 53 bits; never returns 1.0.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace seizure
