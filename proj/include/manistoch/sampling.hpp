#ifndef MANISTOCH_SAMPLING_HPP
#define MANISTOCH_SAMPLING_HPP

#include <cstdint>
#include <vector>

#include "manistoch/manifold.hpp"

namespace manistoch {

/// i.i.d. points from the normalized Riemannian volume, deterministic in seed.
template <Manifold M>
std::vector<Point<M>> sample_uniform(std::size_t n, std::uint64_t seed, std::uint64_t stream = 0) {
  if (n < 1) throw UsageError("sample_uniform: n must be >= 1");
  Rng rng(seed, hash_words(0x756e69666f726dULL, stream));
  std::vector<Point<M>> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(M::random_point(rng));
  return out;
}

/// Point at geodesic distance r from x in a uniformly random direction.
template <Manifold M>
Point<M> random_point_at_distance(const Point<M>& x, double r, Rng& rng) {
  const auto u = M::random_unit_tangent(x.coords(), rng);
  return Point<M>(M::exp(x.coords(), r * u));
}

/// Pair (x, y) with x uniform and dis(x, y) uniform in (0, max_dist).
template <Manifold M>
std::pair<Point<M>, Point<M>> random_close_pair(double max_dist, Rng& rng) {
  Point<M> x(M::random_point(rng));
  const double r = max_dist * (1.0 - rng.uniform());
  return {x, random_point_at_distance(x, r, rng)};
}

}  // namespace manistoch

#endif  // MANISTOCH_SAMPLING_HPP
