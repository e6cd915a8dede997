#pragma once

#include <cstdint>
#include <random>

namespace benard {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent generator for (seed, stream): one stream per Monte-Carlo path, so results
/// do not depend on how paths are distributed over threads.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  return Rng(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x5851f42d4c957f2dULL)));
}

inline double standard_normal(Rng& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  return n01(rng);
}

}  // namespace benard
