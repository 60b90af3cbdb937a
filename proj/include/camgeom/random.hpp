#pragma once

#include <cstdint>
#include <random>

namespace camgeom {

/// Seed for item `index` of a seeded batch: a SplitMix64 counter split, so the
/// stream an item sees does not depend on processing order or worker count.
inline std::uint64_t sample_seed(std::uint64_t batch_seed, std::uint64_t index) {
  std::uint64_t z = batch_seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Uniform double in [0, 1) from the top 53 bits. Unlike
/// std::uniform_real_distribution the result is the same on every standard library.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace camgeom
