#include "dperc/rng.hpp"

#include <cmath>
#include <numbers>

namespace dperc {

double standard_normal(std::mt19937_64& rng) {
  // u1 in (0, 1] so the log stays finite.
  const double u1 = 1.0 - uniform_unit(rng);
  const double u2 = uniform_unit(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<std::int64_t> sample_without_replacement(std::mt19937_64& rng,
                                                     std::int64_t n,
                                                     std::int64_t k) {
  if (k < 0 || k > n) throw std::invalid_argument("sample_without_replacement: k out of range");
  // Partial Fisher-Yates over an explicit index array; O(n) memory keeps the
  // draw order a pure function of the generator state.
  std::vector<std::int64_t> pool(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
  std::vector<std::int64_t> out;
  out.reserve(static_cast<std::size_t>(k));
  for (std::int64_t i = 0; i < k; ++i) {
    const std::uint64_t span = static_cast<std::uint64_t>(n - i);
    const std::int64_t j = i + static_cast<std::int64_t>(uniform_below(rng, span));
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    out.push_back(pool[static_cast<std::size_t>(i)]);
  }
  return out;
}

}  // namespace dperc
