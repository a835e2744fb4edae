#ifndef MANISTOCH_EXPERIMENTS_WONG_ZAKAI_HPP
#define MANISTOCH_EXPERIMENTS_WONG_ZAKAI_HPP

#include <algorithm>
#include <cmath>

#include "manistoch/experiments/common.hpp"

namespace manistoch {

/// Endpoints of the Wong-Zakai ODE at coarse levels against the fine-grid
/// Stratonovich flow under the same Brownian path.
template <Manifold M>
ExperimentReport exp_wong_zakai(const Config& cfg) {
  Stopwatch clock;
  const auto& wp = cfg.wong_zakai;
  const std::uint64_t seed = stream_seed(cfg.general.seed, Stream::wong_zakai);
  const int threads = cfg.general.threads;
  ExperimentReport rep;
  rep.id = "wz-conv";
  rep.manifold = std::string(to_string(M::kind));
  const auto model = make_model<M>(cfg);
  const int m = static_cast<int>(model.noise.size());
  const auto n_paths = static_cast<std::size_t>(wp.n_paths);
  const std::size_t n_levels = wp.levels.size();
  const auto starts = sample_uniform<M>(n_paths, seed, 1);

  // Squared endpoint distance and squared relative density error per (path, level).
  std::vector<double> d2(n_paths * n_levels);
  std::vector<double> r2(n_paths * n_levels);
  parallel_for(n_paths, threads, [&](std::size_t p) {
    const auto drv = make_driver(m, wp.T, wp.fine_steps, seed, p);
    const auto ref = flow_endpoint(model, starts[p], drv);
    for (std::size_t l = 0; l < n_levels; ++l) {
      const auto w = wong_zakai_endpoint(model, starts[p], drv.coarsened(wp.levels[l]), wp.substeps);
      const double d = distance(w.position, ref.position);
      const double r = std::expm1(w.log_density - ref.log_density);
      d2[p * n_levels + l] = d * d;
      r2[p * n_levels + l] = r * r;
    }
  });

  auto& csv = rep.table("wong_zakai.csv", {"level", "h", "rms_distance", "rms_distance_se", "density_rel_rms",
                                           "density_rel_rms_se"});
  std::vector<double> lv;
  std::vector<double> rms;
  std::vector<double> dens;
  for (std::size_t l = 0; l < n_levels; ++l) {
    std::vector<double> a(n_paths);
    std::vector<double> b(n_paths);
    for (std::size_t p = 0; p < n_paths; ++p) {
      a[p] = d2[p * n_levels + l];
      b[p] = r2[p * n_levels + l];
    }
    const auto ea = mean_se(a);
    const auto eb = mean_se(b);
    const double ra = std::sqrt(ea.value);
    const double rb = std::sqrt(eb.value);
    // delta method for the square root
    const double sa = ra > 0.0 ? ea.se / (2.0 * ra) : 0.0;
    const double sb = rb > 0.0 ? eb.se / (2.0 * rb) : 0.0;
    lv.push_back(wp.levels[l]);
    rms.push_back(ra);
    dens.push_back(rb);
    csv.add(wp.levels[l], wp.T / wp.levels[l], ra, sa, rb, sb);
    rep.metric("rms_distance_level" + std::to_string(wp.levels[l]), ra, sa);
    rep.metric("density_rel_rms_level" + std::to_string(wp.levels[l]), rb, sb);
  }
  const auto fit = fit_loglog(lv, rms);
  bool rms_decreasing = true;
  bool density_decreasing = true;
  for (std::size_t l = 1; l < n_levels; ++l) {
    rms_decreasing = rms_decreasing && rms[l] < rms[l - 1];
    density_decreasing = density_decreasing && dens[l] < dens[l - 1];
  }
  rep.metric("fitted_slope", fit.slope);
  rep.metric("fit_r_squared", fit.r_squared);

  // Divergence-free fields keep the Wong-Zakai density at one.
  double divfree_log = 0.0;
  {
    FlowModel<M> df = model.with_drift(make_drift<M>("divergence_free", cfg.model.drift_strength, cfg.rough));
    for (std::size_t p = 0; p < std::min<std::size_t>(n_paths, 20); ++p) {
      const auto drv = make_driver(m, wp.T, wp.fine_steps, seed, p);
      for (int level : wp.levels) {
        divfree_log = std::max(divfree_log,
                               std::abs(wong_zakai_endpoint(df, starts[p], drv.coarsened(level), wp.substeps).log_density));
      }
    }
  }
  rep.metric("divergence_free_max_abs_log_density", divfree_log);
  rep.timing("total", clock.seconds());

  rep.verdict("wong_zakai_rate",
              rms_decreasing && fit.slope >= wp.slope_min && fit.slope <= wp.slope_max,
              std::string(rms_decreasing ? "RMS decreasing" : "RMS not decreasing") + ", slope " +
                  CsvTable::cell(fit.slope) + " in [" + CsvTable::cell(wp.slope_min) + ", " +
                  CsvTable::cell(wp.slope_max) + "]");
  rep.verdict("wong_zakai_density", density_decreasing,
              std::string("relative density RMS ") + (density_decreasing ? "decreasing" : "not decreasing"));
  rep.verdict("wong_zakai_divergence_free", divfree_log < 1e-12,
              "max |log rho| " + CsvTable::cell(divfree_log) + " < 1e-12");
  return rep;
}

}  // namespace manistoch

#endif  // MANISTOCH_EXPERIMENTS_WONG_ZAKAI_HPP
