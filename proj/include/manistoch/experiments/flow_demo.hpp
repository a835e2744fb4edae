#ifndef MANISTOCH_EXPERIMENTS_FLOW_DEMO_HPP
#define MANISTOCH_EXPERIMENTS_FLOW_DEMO_HPP

#include <algorithm>
#include <cmath>

#include "manistoch/experiments/common.hpp"

namespace manistoch {

/// Integrator sanity: the flat constant case against its closed form, the
/// isometry of Killing noise, unit density for divergence-free fields, the
/// discrete flow property, and sample paths for plotting.
template <Manifold M>
ExperimentReport exp_flow_demo(const Config& cfg) {
  Stopwatch clock;
  const auto& fp = cfg.flow;
  const std::uint64_t seed = stream_seed(cfg.general.seed, Stream::flow_demo);
  const int steps = step_count(fp.T, fp.dt);
  ExperimentReport rep;
  rep.id = "flow-demo";
  rep.manifold = std::string(to_string(M::kind));

  // Flat torus, constant drift and translation noise: x_T = x_0 + c T + s W_T.
  const Vec2 c(0.3, -0.7);
  const double s = cfg.model.noise_scale;
  const FlowModel<Torus2> flat{make_atlas<Torus2>(cfg.atlas), make_field<Torus2, TorusConstant>(c),
                               torus_translation_noise(s)};
  const auto torus_starts = sample_uniform<Torus2>(static_cast<std::size_t>(fp.n_paths), seed, 1);
  double flat_err = 0.0;
  double flat_wz_err = 0.0;
  double flat_log = 0.0;
  for (int i = 0; i < fp.n_paths; ++i) {
    const auto& x0 = torus_starts[static_cast<std::size_t>(i)];
    const auto drv = make_driver(2, fp.T, steps, seed, static_cast<std::uint64_t>(i));
    const auto w = drv.endpoint();
    const Point<Torus2> exact(x0.coords() + c * fp.T + s * Vec2(w[0], w[1]));
    const auto end = flow_endpoint(flat, x0, drv);
    flat_err = std::max(flat_err, distance(end.position, exact));
    flat_log = std::max(flat_log, std::abs(end.log_density));
    for (int level : {8, 20, 100, 250}) {
      if (level > steps || steps % level != 0) continue;
      const auto wz = wong_zakai_endpoint(flat, x0, drv.coarsened(level), 1);
      flat_wz_err = std::max(flat_wz_err, distance(wz.position, exact));
    }
  }
  rep.metric("flat_constant_max_error", flat_err);
  rep.metric("flat_constant_wz_max_error", flat_wz_err);
  rep.metric("flat_constant_max_abs_log_density", flat_log);

  // Zero drift, unit Killing noise on the sphere: pairwise distances are kept.
  const auto sphere_atlas = make_atlas<Sphere2>(cfg.atlas);
  const FlowModel<Sphere2> iso{sphere_atlas, zero_field<Sphere2>(), sphere_killing_noise(1.0)};
  Rng rng(seed, 2);
  double iso_err = 0.0;
  for (int i = 0; i < fp.n_paths; ++i) {
    const Point<Sphere2> x(Sphere2::random_point(rng));
    const Point<Sphere2> y(Sphere2::random_point(rng));
    const double d0 = distance(x, y);
    const auto drv = make_driver(3, fp.T, steps, seed, static_cast<std::uint64_t>(1000 + i));
    auto sx = initial_state(iso.atlas, x);
    auto sy = initial_state(iso.atlas, y);
    for (int k = 0; k < steps; ++k) {
      step_stratonovich(iso, sx, drv.increment(k), drv.dt());
      step_stratonovich(iso, sy, drv.increment(k), drv.dt());
      iso_err = std::max(iso_err, std::abs(distance(sx.position, sy.position) - d0));
    }
  }
  rep.metric("killing_isometry_max_error", iso_err);

  // Divergence-free drift and noise: log-density stays exactly zero.
  double divfree_log = 0.0;
  const std::vector<FlowModel<Sphere2>> divfree{
      {sphere_atlas, killing_field(Vec3(0.0, 0.0, cfg.model.drift_strength), "rotation_z"),
       sphere_killing_noise(cfg.model.noise_scale)},
      {sphere_atlas, make_rough_field<Sphere2>(cfg.rough), sphere_killing_noise(cfg.model.noise_scale)}};
  const auto sphere_starts = sample_uniform<Sphere2>(static_cast<std::size_t>(fp.n_paths), seed, 3);
  for (const auto& model : divfree) {
    for (int i = 0; i < fp.n_paths; ++i) {
      const auto drv = make_driver(3, fp.T, steps, seed, static_cast<std::uint64_t>(2000 + i));
      const auto rec = simulate_flow(model, sphere_starts[static_cast<std::size_t>(i)], drv);
      for (double l : rec.log_density) divfree_log = std::max(divfree_log, std::abs(l));
    }
  }
  rep.metric("divergence_free_max_abs_log_density", divfree_log);

  // Flow property: restarting at a grid time with the shifted increments.
  const auto model = make_model<M>(cfg);
  const auto starts = sample_uniform<M>(static_cast<std::size_t>(fp.n_paths), seed, 4);
  std::size_t flow_property_mismatch = 0;
  const int split = steps / 3;
  for (int i = 0; i < fp.n_paths; ++i) {
    const auto drv = make_driver(static_cast<int>(model.noise.size()), fp.T, steps, seed,
                                 static_cast<std::uint64_t>(3000 + i));
    const auto full = flow_endpoint(model, starts[static_cast<std::size_t>(i)], drv);
    auto st = initial_state(model.atlas, starts[static_cast<std::size_t>(i)]);
    advance(model, st, drv, 0, split);
    const auto tail = drv.shifted(split);
    advance(model, st, tail, 0, tail.n_steps());
    if (!(st.position.coords() == full.position.coords()) || st.log_density != full.log_density) {
      ++flow_property_mismatch;
    }
  }
  rep.metric("flow_property_mismatches", static_cast<double>(flow_property_mismatch));

  // Sample paths of the configured model.
  std::vector<std::string> header{"path_index", "t"};
  if constexpr (M::kind == ManifoldKind::sphere2) {
    header.insert(header.end(), {"x", "y", "z"});
  } else {
    header.insert(header.end(), {"theta1", "theta2"});
  }
  header.push_back("log_density");
  auto& paths = rep.table("flow_paths.csv", header);
  double min_density = 1.0;
  for (int i = 0; i < fp.demo_paths; ++i) {
    const auto drv = make_driver(static_cast<int>(model.noise.size()), fp.T, steps, seed,
                                 static_cast<std::uint64_t>(4000 + i));
    const auto rec = simulate_flow(model, starts[static_cast<std::size_t>(i % fp.n_paths)], drv, fp.record_stride);
    for (std::size_t k = 0; k < rec.size(); ++k) {
      std::vector<std::string> row{CsvTable::cell(rec.path_index), CsvTable::cell(rec.times[k])};
      const auto& x = rec.positions[k].coords();
      for (int j = 0; j < M::ambient_dim; ++j) row.push_back(CsvTable::cell(x(j)));
      row.push_back(CsvTable::cell(rec.log_density[k]));
      paths.rows.push_back(std::move(row));
      min_density = std::min(min_density, std::exp(rec.log_density[k]));
    }
  }
  rep.metric("demo_min_density", min_density);
  rep.timing("total", clock.seconds());

  rep.verdict("flow_flat_exact", flat_err < 1e-12 && flat_wz_err < 1e-12 && flat_log == 0.0,
              "Heun " + CsvTable::cell(flat_err) + ", Wong-Zakai " + CsvTable::cell(flat_wz_err) + " < 1e-12");
  rep.verdict("flow_killing_isometry", iso_err < fp.isometry_tolerance,
              "max distance drift " + CsvTable::cell(iso_err) + " < " + CsvTable::cell(fp.isometry_tolerance));
  rep.verdict("flow_divergence_free_density", divfree_log == 0.0,
              "max |log rho| " + CsvTable::cell(divfree_log) + " == 0");
  rep.verdict("flow_property", flow_property_mismatch == 0,
              CsvTable::cell(flow_property_mismatch) + " restarted paths differ");
  rep.verdict("flow_density_positive", min_density > 0.0, "min density " + CsvTable::cell(min_density));
  return rep;
}

}  // namespace manistoch

#endif  // MANISTOCH_EXPERIMENTS_FLOW_DEMO_HPP
