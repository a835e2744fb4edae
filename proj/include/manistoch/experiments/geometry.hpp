#ifndef MANISTOCH_EXPERIMENTS_GEOMETRY_HPP
#define MANISTOCH_EXPERIMENTS_GEOMETRY_HPP

#include <algorithm>
#include <cmath>

#include "manistoch/experiments/common.hpp"
#include "manistoch/geodesic.hpp"

namespace manistoch {

/// Closed forms against chart computations, the distance/transport
/// identity, atlas covering constants and the partition of unity.
template <Manifold M>
ExperimentReport exp_geometry_cert(const Config& cfg) {
  const auto& gp = cfg.geometry;
  const auto atlas = make_atlas<M>(cfg.atlas);
  ExperimentReport rep;
  rep.id = "geometry-cert";
  rep.manifold = std::string(to_string(M::kind));
  Stopwatch oracle_clock;

  Rng rng(cfg.general.seed, 0x9e0ULL);
  double shoot_err = 0.0;
  double transport_err = 0.0;
  double isometry_err = 0.0;
  double l2_residual = 0.0;
  double grad_fd_err = 0.0;
  double length_err = 0.0;
  auto& pairs_csv = rep.table("geometry_pairs.csv", {"pair", "distance", "shooting_distance", "transport_error",
                                                     "l2_residual"});
  for (int i = 0; i < gp.oracle_pairs; ++i) {
    auto [x, y] = random_close_pair<M>(atlas.rho(), rng);
    const double d = distance(x, y);
    const double ds = shooting_distance(atlas, x, y, gp.shooting_steps);
    shoot_err = std::max(shoot_err, std::abs(ds - d));

    const auto seg = minimizing_geodesic(x, y, static_cast<std::size_t>(gp.geodesic_samples));
    length_err = std::max(length_err, std::abs(seg.length() - d));
    const TangentVector<M> v{x, (0.5 + rng.uniform()) * M::random_unit_tangent(x.coords(), rng)};
    const auto tv = parallel_transport(atlas, v, seg);
    const auto tc = transport_closed_form(v, y);
    const double terr = (tv.components - tc.components).norm();
    transport_err = std::max(transport_err, terr);
    isometry_err = std::max(isometry_err, std::abs(tv.norm() - v.norm()));

    // g_x(v, grad dis(., y)) + g_y(//v, grad dis(x, .)) = 0
    const auto gx = grad_dist_sq(x, y);
    const auto gy = grad_dist_sq(y, x);
    const double res = std::abs(v.components.dot(gx.components) + tv.components.dot(gy.components)) / (2.0 * d);
    l2_residual = std::max(l2_residual, res);

    // grad dis^2 against central differences through the best chart of x.
    const auto& c = atlas.chart(atlas.best_chart(x));
    const Vec2 xi = c.to_chart(x.coords());
    Vec2 fd;
    const double h = 1e-6;
    for (int k = 0; k < 2; ++k) {
      Vec2 e = Vec2::Zero();
      e(k) = h;
      const double fp = std::pow(M::distance(c.from_chart(xi + e), y.coords()), 2);
      const double fm = std::pow(M::distance(c.from_chart(xi - e), y.coords()), 2);
      fd(k) = (fp - fm) / (2.0 * h);
    }
    // Chart gradient components g^{kl} d_l f, mapped to the ambient vector.
    const Vec2 grad_chart = c.metric_at(xi).inverse() * fd;
    grad_fd_err = std::max(grad_fd_err, (c.pull(xi, grad_chart) - gx.components).norm());
    pairs_csv.add(i, d, ds, terr, res);
  }

  double triangle_excess = 0.0;
  for (int i = 0; i < gp.oracle_pairs; ++i) {
    const Point<M> a(M::random_point(rng));
    const Point<M> b(M::random_point(rng));
    const Point<M> c(M::random_point(rng));
    triangle_excess = std::max(triangle_excess, distance(a, c) - distance(a, b) - distance(b, c));
  }

  // Chart round trip and Christoffel symbols against the metric.
  double roundtrip_err = 0.0;
  double christoffel_err = 0.0;
  for (int i = 0; i < gp.oracle_pairs; ++i) {
    const Point<M> x(M::random_point(rng));
    for (const auto& c : atlas.charts()) {
      if (!c.contains(x.coords())) continue;
      const Vec2 xi = c.to_chart(x.coords());
      roundtrip_err = std::max(roundtrip_err, M::distance(c.from_chart(xi), x.coords()));
      const double h = 1e-5;
      std::array<Mat2, 2> dg;
      for (int l = 0; l < 2; ++l) {
        Vec2 e = Vec2::Zero();
        e(l) = h;
        dg[static_cast<std::size_t>(l)] = (c.metric_at(xi + e) - c.metric_at(xi - e)) / (2.0 * h);
      }
      const Mat2 ginv = c.metric_at(xi).inverse();
      const Christoffel gam = c.christoffel_at(xi);
      for (int k = 0; k < 2; ++k) {
        for (int a = 0; a < 2; ++a) {
          for (int b = 0; b < 2; ++b) {
            double ref = 0.0;
            for (int l = 0; l < 2; ++l) {
              ref += 0.5 * ginv(k, l) * (dg[static_cast<std::size_t>(a)](b, l) + dg[static_cast<std::size_t>(b)](a, l) -
                                         dg[static_cast<std::size_t>(l)](a, b));
            }
            christoffel_err = std::max(christoffel_err, std::abs(gam[static_cast<std::size_t>(k)](a, b) - ref));
          }
        }
      }
    }
  }
  const double oracle_seconds = oracle_clock.seconds();

  Stopwatch atlas_clock;
  const auto cert = certify_atlas(atlas, static_cast<std::size_t>(gp.cert_pairs), cfg.general.seed);
  double partition_err = 0.0;
  std::size_t support_violations = 0;
  const auto pts = sample_uniform<M>(static_cast<std::size_t>(gp.partition_points), cfg.general.seed, 0x9a7ULL);
  for (const auto& x : pts) {
    const auto w = atlas.partition_weights(x);
    double s = 0.0;
    for (int i = 0; i < w.count; ++i) {
      s += w.weights[static_cast<std::size_t>(i)];
      if (!atlas.chart(w.ids[static_cast<std::size_t>(i)]).contains(x.coords())) ++support_violations;
    }
    partition_err = std::max(partition_err, std::abs(s - 1.0));
  }
  const double atlas_seconds = atlas_clock.seconds();

  rep.metric("shooting_distance_max_error", shoot_err);
  rep.metric("geodesic_length_max_error", length_err);
  rep.metric("transport_max_error", transport_err);
  rep.metric("transport_isometry_max_error", isometry_err);
  rep.metric("l2_identity_max_residual", l2_residual);
  rep.metric("grad_dist_sq_fd_max_error", grad_fd_err);
  rep.metric("triangle_max_excess", triangle_excess);
  rep.metric("chart_roundtrip_max_error", roundtrip_err);
  rep.metric("christoffel_fd_max_error", christoffel_err);
  rep.timing("oracles", oracle_seconds);
  rep.metric("certification_pairs", static_cast<double>(cert.n_pairs));
  rep.metric("declared_lambda", cert.declared_lambda);
  rep.metric("empirical_lambda", cert.empirical_lambda);
  rep.metric("pairs_without_common_chart", static_cast<double>(cert.pairs_without_common_chart));
  rep.metric("bilipschitz_violations", static_cast<double>(cert.bilipschitz_violations));
  rep.metric("metric_violations", static_cast<double>(cert.metric_violations));
  rep.metric("partition_sum_max_error", partition_err);
  rep.metric("partition_support_violations", static_cast<double>(support_violations));
  rep.timing("certification", atlas_seconds);
  for (const auto& w : cert.witnesses) rep.notes.push_back("certification witness: " + w);

  rep.verdict("geometry_oracles",
              shoot_err < 1e-6 && transport_err < 1e-7 && l2_residual < 1e-6,
              "shooting " + CsvTable::cell(shoot_err) + " < 1e-6, transport " + CsvTable::cell(transport_err) +
                  " < 1e-7, l2 " + CsvTable::cell(l2_residual) + " < 1e-6");
  rep.verdict("geometry_invariants",
              isometry_err < 1e-8 && triangle_excess < 1e-9 && roundtrip_err < 1e-10 && christoffel_err < 1e-5 &&
                  grad_fd_err < 1e-5 && length_err < 1e-8,
              "isometry " + CsvTable::cell(isometry_err) + ", triangle " + CsvTable::cell(triangle_excess) +
                  ", round trip " + CsvTable::cell(roundtrip_err) + ", christoffel " +
                  CsvTable::cell(christoffel_err) + ", grad " + CsvTable::cell(grad_fd_err));
  rep.verdict("atlas_certification", cert.passed && partition_err < 1e-12 && support_violations == 0,
              "certified " + std::string(cert.passed ? "yes" : "no") + " at lambda " +
                  CsvTable::cell(cert.declared_lambda) + " (empirical " + CsvTable::cell(cert.empirical_lambda) +
                  "), partition sum error " + CsvTable::cell(partition_err) + " < 1e-12");
  return rep;
}

}  // namespace manistoch

#endif  // MANISTOCH_EXPERIMENTS_GEOMETRY_HPP
