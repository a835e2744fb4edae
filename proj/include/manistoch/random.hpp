#ifndef MANISTOCH_RANDOM_HPP
#define MANISTOCH_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <utility>

namespace manistoch {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Order-sensitive hash of a tuple of 64-bit words.
template <class... Words>
constexpr std::uint64_t hash_words(std::uint64_t first, Words... rest) {
  std::uint64_t h = splitmix64(first ^ 0x6a09e667f3bcc909ULL);
  ((h = splitmix64(h ^ static_cast<std::uint64_t>(rest))), ...);
  return h;
}

/// Uniform in (0, 1], 53 bits.
inline double unit_open_closed(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

/// Two independent standard normals from a counter key (Box-Muller).
inline std::pair<double, double> normal_pair(std::uint64_t key) {
  const double u1 = unit_open_closed(splitmix64(key ^ 0x243f6a8885a308d3ULL));
  const double u2 = unit_open_closed(splitmix64(key ^ 0x13198a2e03707344ULL));
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(a), r * std::sin(a)};
}

/// Sequential generator with a portable normal transform, so that sample
/// streams do not depend on the standard library's distribution code.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : engine_(hash_words(seed, stream, 0x5eedULL)) {}

  std::uint64_t bits() { return engine_(); }
  double uniform() { return unit_open_closed(engine_()) ; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * (1.0 - uniform()); }
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    auto [a, b] = normal_pair(engine_());
    spare_ = b;
    has_spare_ = true;
    return a;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace manistoch

#endif  // MANISTOCH_RANDOM_HPP
