#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace spcap {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Independent generator for one subsystem: the subsystem name is hashed
/// (FNV-1a) into the seed and the result is whitened with splitmix64.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::string_view subsystem) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : subsystem) h = (h ^ c) * 0x100000001b3ULL;
  std::uint64_t state = seed ^ h;
  return std::mt19937_64(splitmix64(state));
}

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform,
/// unlike std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

inline double uniform(std::mt19937_64& g, double a, double b) { return a + (b - a) * uniform01(g); }

inline std::uint64_t uniform_index(std::mt19937_64& g, std::uint64_t n) {
  return static_cast<std::uint64_t>(uniform01(g) * static_cast<double>(n)) % n;
}

}  // namespace spcap
