#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

namespace dperc {

/// Identifier of the random machinery, recorded in reports so a run can be
/// reproduced elsewhere. Every draw goes through the helpers below; none of
/// the distribution adapters from <random> are used because their output is
/// not pinned down by the standard.
inline constexpr const char* kRngId = "mt19937_64+splitmix64+fisher-yates";

/// One SplitMix64 step. Advances `state` and returns the mixed output.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Child seed for the stream at coordinates (a, b) under a base seed.
/// The same triple always yields the same stream, so runs that own
/// (rate index, repeat) pairs stay independent and reproducible.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = base;
  std::uint64_t h = splitmix64(s);
  s += 0x9e3779b97f4a7c15ULL * (a + 1);
  h ^= splitmix64(s);
  s += 0xc2b2ae3d27d4eb4fULL * (b + 1);
  h ^= splitmix64(s);
  return h;
}

/// Uniform integer in [0, n) by rejection on the raw 64-bit stream.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_below: n must be positive");
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - max % n;
  std::uint64_t v = rng();
  while (v >= limit) v = rng();
  return v % n;
}

/// Uniform double in [0, 1) built from the top 53 bits.
inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Standard normal draw via Box-Muller (two uniforms per call, no cache).
double standard_normal(std::mt19937_64& rng);

/// k distinct values drawn uniformly from {0, ..., n-1}, in draw order.
std::vector<std::int64_t> sample_without_replacement(std::mt19937_64& rng,
                                                     std::int64_t n,
                                                     std::int64_t k);

}  // namespace dperc
