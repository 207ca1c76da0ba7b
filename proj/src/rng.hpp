#pragma once

#include <cstdint>
#include <random>

namespace fshan::rng {

// SplitMix64 step; used to derive independent engine seeds from a
// (seed, stream) pair so parallel and serial replicate evaluation agree.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// mt19937_64 seeded from a mixed (seed, stream) pair. The engine's output
// sequence is pinned by the standard, so results are portable.
inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream = 0) {
  std::uint64_t state = seed;
  std::uint64_t mixed = splitmix64(state);
  state ^= stream * 0xD6E8FEB86659FD93ULL;
  mixed ^= splitmix64(state);
  return std::mt19937_64(mixed);
}

// Uniform double in the open interval (0, 1); 53-bit resolution.
inline double uniform_open(std::mt19937_64& gen) {
  return (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53;
}

// Uniform double in [0, 1).
inline double uniform(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Unbiased draw from {0, ..., n-1} by rejection. std::uniform_int_distribution
// is implementation-defined, so it cannot be used for reproducible studies.
inline std::uint64_t bounded(std::mt19937_64& gen, std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    std::uint64_t r = gen();
    if (r >= threshold) return r % n;
  }
}

}  // namespace fshan::rng
