// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

namespace stam {

/// Independent deterministic RNG streams derived from one run seed.
/// Weight init, dropout masks and epoch shuffling each get their own stream
/// so toggling one (e.g. dropout off) cannot perturb the others.
enum class RngStream : uint64_t { kInit = 1, kDropout = 2, kShuffle = 3, kData = 4 };

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::mt19937_64 make_rng(uint64_t seed, RngStream stream) {
  return std::mt19937_64(splitmix64(seed ^ (static_cast<uint64_t>(stream) << 32)));
}

/// Uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) weight init.
inline double uniform_fan_in(std::mt19937_64& rng, int fan_in) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  return dist(rng);
}

}  // namespace stam
