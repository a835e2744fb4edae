#ifndef MANISTOCH_EXPERIMENTS_DISTANCE_HPP
#define MANISTOCH_EXPERIMENTS_DISTANCE_HPP

#include <algorithm>
#include <cmath>

#include "manistoch/experiments/common.hpp"
#include "manistoch/geodesic.hpp"
#include "manistoch/maximal.hpp"

namespace manistoch {

namespace detail {

/// Point moved by the flow of X for time t (negative t runs backwards).
template <Manifold M>
Point<M> ode_flow(const FlowModel<M>& x_only, const Point<M>& x, double t) {
  const FlowModel<M> m = t < 0.0 ? x_only.backward() : x_only;
  return wong_zakai_endpoint(m, x, make_driver(0, std::abs(t), 1, 0, 0), 4).position;
}

struct DistanceConstants {
  std::vector<double> first;
  std::vector<double> second;
  std::size_t skipped = 0;
};

template <Manifold M>
DistanceConstants distance_constants(const VectorField<M>& field, const Atlas<M>& atlas,
                                     const ScalarFieldSamples<M>& first_order, std::size_t n_pairs, double fd_step,
                                     std::uint64_t seed, int threads, int levels) {
  const double rho = atlas.rho();
  const double max_d = atlas.lambda() * atlas.lambda() * rho;
  const RadiusGrid grid{rho, levels};
  const FlowModel<M> x_only{atlas, field, {}};
  Rng rng(seed, 21);
  std::vector<std::pair<Point<M>, Point<M>>> pairs;
  for (std::size_t i = 0; i < n_pairs; ++i) pairs.push_back(random_close_pair<M>(max_d, rng));
  std::vector<double> k1(n_pairs, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> k2(n_pairs, std::numeric_limits<double>::quiet_NaN());
  parallel_for(n_pairs, threads, [&](std::size_t i) {
    const auto& [x, y] = pairs[i];
    const double d = distance(x, y);
    if (d < 1e-6) return;
    // g(x, y) = X(x) dis^2(., y) + X(y) dis^2(x, .)
    auto g = [&](const Point<M>& a, const Point<M>& b) {
      return field.value(a).dot(grad_dist_sq(a, b).components) + field.value(b).dot(grad_dist_sq(b, a).components);
    };
    const double lhs = std::abs(g(x, y));
    const double mx = maximal_function(first_order, x, rho, grid);
    const double my = maximal_function(first_order, y, rho, grid);
    k1[i] = lhs / (d * d * (1.0 + mx + my));
    // d/dt g(phi_t x, phi_t y) at t = 0 by a central difference along the flow
    const double second = (g(ode_flow(x_only, x, fd_step), ode_flow(x_only, y, fd_step)) -
                           g(ode_flow(x_only, x, -fd_step), ode_flow(x_only, y, -fd_step))) /
                          (2.0 * fd_step);
    k2[i] = std::abs(second) / (d * d);
  });
  DistanceConstants out;
  for (std::size_t i = 0; i < n_pairs; ++i) {
    if (std::isnan(k1[i])) {
      ++out.skipped;
      continue;
    }
    out.first.push_back(k1[i]);
    out.second.push_back(k2[i]);
  }
  return out;
}

}  // namespace detail

/// Empirical constants of the first-order estimate
///   |X(x) dis^2(., y) + X(y) dis^2(x, .)| <= K dis^2 (1 + M|X|_1(x) + M|X|_1(y))
/// and of |d^2/dt^2 dis^2(phi_t x, phi_t y)| / dis^2 at t = 0, the second
/// derivative taken as a central difference of the first along the flow.
template <Manifold M>
ExperimentReport exp_distance_estimates(const Config& cfg) {
  Stopwatch clock;
  const auto& dp = cfg.distance;
  const int threads = cfg.general.threads;
  const std::uint64_t seed = cfg.general.seed;
  ExperimentReport rep;
  rep.id = "distance-est";
  rep.manifold = std::string(to_string(M::kind));
  const auto atlas = make_atlas<M>(cfg.atlas);
  const auto cloud = sample_uniform<M>(static_cast<std::size_t>(dp.cloud_n), seed, 23);
  const auto n_pairs = static_cast<std::size_t>(dp.n_pairs);

  struct Case {
    std::string id;
    VectorField<M> field;
    bool smooth;
  };
  std::vector<Case> cases{{"zero", zero_field<M>(), true},
                          {"divergence_free", make_drift<M>("divergence_free", cfg.model.drift_strength, cfg.rough), true},
                          {"compressible", make_drift<M>("compressible", cfg.model.drift_strength, cfg.rough), true},
                          {"rough", make_rough_field<M>(cfg.rough), false}};

  auto& csv = rep.table("distance_estimates.csv", {"field", "pairs", "skipped", "first_p999", "first_max",
                                                   "second_p999", "second_max", "majorant"});
  bool zero_ok = true;
  bool smooth_ok = true;
  bool rough_ok = true;
  for (const auto& c : cases) {
    // |X|_1 on the cloud; singular points of the rough field take the largest finite value.
    std::vector<double> vals(cloud.size(), 0.0);
    parallel_for(cloud.size(), threads, [&](std::size_t i) {
      try {
        vals[i] = c.field.jet(cloud[i]).first_order_norm();
      } catch (const SingularPointError&) {
        vals[i] = std::numeric_limits<double>::quiet_NaN();
      }
    });
    double sup1 = 0.0;
    for (double v : vals) {
      if (!std::isnan(v)) sup1 = std::max(sup1, v);
    }
    for (double& v : vals) {
      if (std::isnan(v)) v = sup1;
    }
    const ScalarFieldSamples<M> samples{cloud, vals};
    const double majorant = 2.0 * sup1 + 1.0;
    const auto a = detail::distance_constants(c.field, atlas, samples, n_pairs, dp.fd_step, seed, threads, 16);
    const double p1 = a.first.empty() ? 0.0 : percentile(a.first, 0.999);
    const double m1 = a.first.empty() ? 0.0 : *std::max_element(a.first.begin(), a.first.end());
    const double p2 = a.second.empty() ? 0.0 : percentile(a.second, 0.999);
    const double m2 = a.second.empty() ? 0.0 : *std::max_element(a.second.begin(), a.second.end());
    csv.add(c.id, n_pairs, a.skipped, p1, m1, p2, m2, majorant);
    rep.metric(c.id + "_first_p999", p1);
    rep.metric(c.id + "_first_max", m1);
    rep.metric(c.id + "_second_p999", p2);
    rep.metric(c.id + "_sup_first_order_norm", sup1);
    if (c.id == "zero") zero_ok = m1 == 0.0 && m2 == 0.0;
    if (c.smooth && c.id != "zero") smooth_ok = smooth_ok && p1 <= majorant && std::isfinite(p2);
    if (!c.smooth) {
      const auto b = detail::distance_constants(c.field, atlas, samples, 2 * n_pairs, dp.fd_step, seed + 1, threads, 16);
      const double p1b = percentile(b.first, 0.999);
      csv.add(c.id, 2 * n_pairs, b.skipped, p1b, *std::max_element(b.first.begin(), b.first.end()),
              percentile(b.second, 0.999), *std::max_element(b.second.begin(), b.second.end()), majorant);
      const double change = std::abs(p1b / p1 - 1.0);
      rep.metric(c.id + "_first_p999_doubled", p1b);
      rep.metric(c.id + "_first_relative_change", change);
      rough_ok = std::isfinite(p1) && change <= 0.2;
    }
  }
  rep.timing("total", clock.seconds());

  rep.verdict("distance_zero_field", zero_ok, "both left sides vanish for X = 0");
  rep.verdict("distance_smooth_majorant", smooth_ok, "first-order 99.9th percentile <= 2 sup|X|_1 + 1");
  rep.verdict("distance_rough_stable", rough_ok, "rough first-order 99.9th percentile stable within 20% under doubling");
  return rep;
}

}  // namespace manistoch

#endif  // MANISTOCH_EXPERIMENTS_DISTANCE_HPP
