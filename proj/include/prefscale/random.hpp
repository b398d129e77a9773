#ifndef PREFSCALE_RANDOM_HPP
#define PREFSCALE_RANDOM_HPP

// Portable random helpers. std::mt19937_64 has a fully specified output
// sequence, but the standard distributions do not, so everything that must be
// reproducible from a seed goes through these functions instead.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

namespace prefscale::rng {

using engine = std::mt19937_64;

/// SplitMix64 finalizer; derives independent substream seeds.
inline std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline engine substream(std::uint64_t seed, std::uint64_t index) {
  return engine(mix(mix(seed) ^ mix(index + 0x632be59bd9b4e019ULL)));
}

/// Uniform in [0, 1).
inline double uniform01(engine& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

inline double uniform(engine& g, double lo, double hi) { return lo + (hi - lo) * uniform01(g); }

/// Uniform integer in [0, n). n must be positive.
inline std::uint64_t below(engine& g, std::uint64_t n) {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x = g();
  while (x >= limit) x = g();
  return x % n;
}

/// Uniform integer in [lo, hi].
inline long long between(engine& g, long long lo, long long hi) {
  return lo + static_cast<long long>(below(g, static_cast<std::uint64_t>(hi - lo + 1)));
}

inline bool bernoulli(engine& g, double p) { return uniform01(g) < p; }

/// Standard normal by Box-Muller.
inline double normal(engine& g) {
  double u1 = uniform01(g);
  while (u1 <= 0.0) u1 = uniform01(g);
  const double u2 = uniform01(g);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Draw an index from unnormalized nonnegative weights.
inline std::size_t weighted(engine& g, const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  double x = uniform01(g) * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (x < weights[i]) return i;
    x -= weights[i];
  }
  return weights.size() - 1;
}

template <class T>
void shuffle(engine& g, std::vector<T>& v) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(below(g, i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace prefscale::rng

#endif  // PREFSCALE_RANDOM_HPP
