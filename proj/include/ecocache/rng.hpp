// Deterministic, counter-friendly random number utilities.
//
// All Monte Carlo loops in this project derive one seed per sample from
// (base seed, operation tag, sample index), so results do not depend on how
// the sample loop is partitioned across threads.
#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <string_view>

namespace ecocache {

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}
}  // namespace detail

// splitmix64: tiny, fast, and identical on every platform we build on.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<std::uint64_t>::max();
  }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return detail::mix64(state_);
  }

 private:
  std::uint64_t state_;
};

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Seed for sample `index` of the operation identified by `tag`.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag,
                                 std::uint64_t index) {
  std::uint64_t s = detail::mix64(base ^ fnv1a64(tag));
  return detail::mix64(s ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
}

// Uniform double in [0, 1), 53 significant bits.
inline double uniform01(SplitMix64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform double in (0, 1]; safe to feed into log().
inline double uniform01_open(SplitMix64& rng) { return 1.0 - uniform01(rng); }

// One standard normal pair, Marsaglia polar method.
inline void normal_pair(SplitMix64& rng, double& n1, double& n2) {
  double u, v, s;
  do {
    u = 2.0 * uniform01(rng) - 1.0;
    v = 2.0 * uniform01(rng) - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double m = std::sqrt(-2.0 * std::log(s) / s);
  n1 = u * m;
  n2 = v * m;
}

// Poisson sample by Knuth's product method, chunked so exp(-mean) never
// underflows for large means.
inline std::uint64_t poisson(SplitMix64& rng, double mean) {
  std::uint64_t total = 0;
  while (mean > 0.0) {
    const double chunk = mean > 500.0 ? 500.0 : mean;
    mean -= chunk;
    const double limit = std::exp(-chunk);
    double p = 1.0;
    std::uint64_t k = 0;
    do {
      ++k;
      p *= uniform01_open(rng);
    } while (p > limit);
    total += k - 1;
  }
  return total;
}

}  // namespace ecocache
