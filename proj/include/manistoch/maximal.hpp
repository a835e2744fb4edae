#ifndef MANISTOCH_MAXIMAL_HPP
#define MANISTOCH_MAXIMAL_HPP

// Empirical local maximal functions
//
//   M_R f(x) = sup_{r <= R} (ball average of f over B_r(x))
//
// on a cloud of uniform samples. The sup runs over a geometric radius grid
// r_j = top 2^{-j/2}; only grid radii <= R are used, so grids with a common
// top are nested and M_R f is monotone in R on the same cloud.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "manistoch/geodesic.hpp"
#include "manistoch/parallel.hpp"
#include "manistoch/sampling.hpp"
#include "manistoch/stats.hpp"

namespace manistoch {

template <Manifold M>
struct ScalarFieldSamples {
  std::vector<Point<M>> points;
  std::vector<double> values;

  std::size_t size() const { return points.size(); }
  /// Equal weights summing to nu(M).
  double weight() const { return M::volume / static_cast<double>(points.size()); }
  void validate() const {
    if (points.empty() || points.size() != values.size()) throw UsageError("scalar samples: size mismatch or empty");
  }
};

template <Manifold M>
ScalarFieldSamples<M> tabulate(const std::vector<Point<M>>& points, const std::function<double(const Point<M>&)>& f) {
  ScalarFieldSamples<M> s;
  s.points = points;
  s.values.reserve(points.size());
  for (const auto& p : points) s.values.push_back(f(p));
  return s;
}

inline constexpr int max_radius_levels = 32;

struct RadiusGrid {
  double top = 0.5;
  int levels = 16;

  double radius(int j) const { return top * std::pow(2.0, -0.5 * j); }
  void validate() const {
    if (!(top > 0.0)) throw UsageError("radius grid: top radius must be positive");
    if (levels < 2 || levels > max_radius_levels) throw UsageError("radius grid: levels must lie in [2, 32]");
  }
};

/// Ball averages over every grid radius at x; empty balls are NaN.
template <Manifold M>
std::array<double, max_radius_levels> ball_averages(const ScalarFieldSamples<M>& f, const Point<M>& x,
                                                   const RadiusGrid& grid) {
  std::array<double, max_radius_levels> keys{};
  for (int j = 0; j < grid.levels; ++j) keys[static_cast<std::size_t>(j)] = M::key_of_radius(grid.radius(j));
  std::array<double, max_radius_levels> sums{};
  std::array<std::size_t, max_radius_levels> counts{};
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double k = M::proximity_key(x.coords(), f.points[i].coords());
    if (!(k < keys[0])) continue;
    // Smallest ball containing the sample: largest j with k < keys[j].
    int lo = 0;
    int hi = grid.levels - 1;
    while (lo < hi) {
      const int mid = (lo + hi + 1) / 2;
      if (k < keys[static_cast<std::size_t>(mid)]) {
        lo = mid;
      } else {
        hi = mid - 1;
      }
    }
    sums[static_cast<std::size_t>(lo)] += f.values[i];
    ++counts[static_cast<std::size_t>(lo)];
  }
  std::array<double, max_radius_levels> avg{};
  double s = 0.0;
  std::size_t c = 0;
  for (int j = grid.levels - 1; j >= 0; --j) {
    s += sums[static_cast<std::size_t>(j)];
    c += counts[static_cast<std::size_t>(j)];
    avg[static_cast<std::size_t>(j)] = c > 0 ? s / static_cast<double>(c) : std::numeric_limits<double>::quiet_NaN();
  }
  return avg;
}

/// M_R f(x) over the grid radii <= R.
template <Manifold M>
double maximal_function(const ScalarFieldSamples<M>& f, const Point<M>& x, double R, const RadiusGrid& grid) {
  if (!(R > 0.0)) throw UsageError("maximal_function: R must be positive");
  const auto avg = ball_averages(f, x, grid);
  double best = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (int j = 0; j < grid.levels; ++j) {
    if (grid.radius(j) > R * (1.0 + 1e-12)) continue;
    const double a = avg[static_cast<std::size_t>(j)];
    if (std::isnan(a)) continue;
    best = any ? std::max(best, a) : a;
    any = true;
  }
  if (!any) throw InsufficientSamplesError("maximal_function: every ball is empty");
  return best;
}

/// M_R f(x) with the grid r_j = R 2^{-j/2}, j < r_grid.
template <Manifold M>
double maximal_function(const ScalarFieldSamples<M>& f, const Point<M>& x, double R, int r_grid = 16) {
  return maximal_function(f, x, R, RadiusGrid{R, r_grid});
}

/// Samples of M_R f at the given points.
template <Manifold M>
std::vector<double> maximal_values(const ScalarFieldSamples<M>& f, const std::vector<Point<M>>& at, double R,
                                   const RadiusGrid& grid, int threads = 1) {
  std::vector<double> out(at.size());
  parallel_for(at.size(), threads, [&](std::size_t i) { out[i] = maximal_function(f, at[i], R, grid); });
  return out;
}

/// One member of a test family for the L^p bound.
template <Manifold M>
struct TestFunction {
  std::string id;
  std::function<double(const Point<M>&)> f;
};

struct LpRatioRow {
  std::string function_id;
  double p = 0.0;
  double R = 0.0;
  std::size_t samples = 0;
  double maximal_norm = 0.0;
  double function_norm = 0.0;
  double ratio = 0.0;
};

struct LpBoundReport {
  std::vector<LpRatioRow> rows;
  double max_ratio = 0.0;
};

/// ||M_R f||_p / ||f||_p for each family member: a cloud of `cloud_n`
/// samples defines the balls, and both norms are integrated by Monte Carlo
/// over `n_eval` independent points.
template <Manifold M>
LpBoundReport verify_lp_bound(const std::vector<TestFunction<M>>& family, double p, double R, std::size_t cloud_n,
                              std::size_t n_eval, std::uint64_t seed, int threads = 1, int levels = 16) {
  if (!(p > 1.0)) throw UsageError("verify_lp_bound: p must be > 1");
  const auto cloud = sample_uniform<M>(cloud_n, seed, 1);
  const auto eval = sample_uniform<M>(n_eval, seed, 2);
  const RadiusGrid grid{R, levels};
  LpBoundReport rep;
  for (const auto& tf : family) {
    const auto samples = tabulate<M>(cloud, tf.f);
    const auto mf = maximal_values(samples, eval, R, grid, threads);
    double sm = 0.0;
    double sf = 0.0;
    for (std::size_t i = 0; i < eval.size(); ++i) {
      sm += std::pow(std::abs(mf[i]), p);
      sf += std::pow(std::abs(tf.f(eval[i])), p);
    }
    const double scale = M::volume / static_cast<double>(eval.size());
    LpRatioRow row;
    row.function_id = tf.id;
    row.p = p;
    row.R = R;
    row.samples = cloud_n;
    row.maximal_norm = std::pow(scale * sm, 1.0 / p);
    row.function_norm = std::pow(scale * sf, 1.0 / p);
    row.ratio = row.function_norm > 0.0 ? row.maximal_norm / row.function_norm : 0.0;
    rep.max_ratio = std::max(rep.max_ratio, row.ratio);
    rep.rows.push_back(row);
  }
  return rep;
}

/// Scalar function with its Riemannian gradient norm.
template <Manifold M>
struct GradedFunction {
  std::string id;
  std::function<double(const Point<M>&)> u;
  std::function<double(const Point<M>&)> grad_norm;
};

struct LipschitzReport {
  std::string function_id;
  std::size_t pairs = 0;
  std::size_t skipped = 0;
  std::size_t violations = 0;
  double p999 = 0.0;
  double max_k = 0.0;
  double mean_k = 0.0;
  std::vector<double> constants;
};

/// Empirical constants K = |u(x)-u(y)| / (dis (M|grad u|(x) + M|grad u|(y)))
/// over pairs with dis < lambda^2 rho, with M = M_rho on a cloud of
/// `cloud_n` samples.
template <Manifold M>
LipschitzReport verify_lipschitz_estimate(const GradedFunction<M>& u, const Atlas<M>& atlas, std::size_t n_pairs,
                                          std::size_t cloud_n, std::uint64_t seed, int threads = 1,
                                          int levels = 16) {
  const double rho = atlas.rho();
  const double max_d = atlas.lambda() * atlas.lambda() * rho;
  const auto cloud = sample_uniform<M>(cloud_n, seed, 3);
  const auto grads = tabulate<M>(cloud, u.grad_norm);
  const RadiusGrid grid{rho, levels};
  Rng rng(seed, 4);
  std::vector<std::pair<Point<M>, Point<M>>> pairs;
  pairs.reserve(n_pairs);
  for (std::size_t i = 0; i < n_pairs; ++i) pairs.push_back(random_close_pair<M>(max_d, rng));
  std::vector<double> k(n_pairs, std::numeric_limits<double>::quiet_NaN());
  std::vector<char> bad(n_pairs, 0);
  parallel_for(n_pairs, threads, [&](std::size_t i) {
    const auto& [x, y] = pairs[i];
    const double num = std::abs(u.u(x) - u.u(y));
    const double den = distance(x, y) * (maximal_function(grads, x, rho, grid) + maximal_function(grads, y, rho, grid));
    if (den < 1e-12) {
      if (num >= 1e-12) bad[i] = 1;
      return;
    }
    k[i] = num / den;
  });
  LipschitzReport rep;
  rep.function_id = u.id;
  rep.pairs = n_pairs;
  for (std::size_t i = 0; i < n_pairs; ++i) {
    if (bad[i]) {
      ++rep.violations;
    } else if (std::isnan(k[i])) {
      ++rep.skipped;
    } else {
      rep.constants.push_back(k[i]);
    }
  }
  if (!rep.constants.empty()) {
    rep.p999 = percentile(rep.constants, 0.999);
    rep.max_k = *std::max_element(rep.constants.begin(), rep.constants.end());
    rep.mean_k = mean_se(rep.constants).value;
  }
  return rep;
}

}  // namespace manistoch

#endif  // MANISTOCH_MAXIMAL_HPP
