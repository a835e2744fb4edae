#ifndef MANISTOCH_EXPERIMENTS_DENSITY_HPP
#define MANISTOCH_EXPERIMENTS_DENSITY_HPP

#include <algorithm>
#include <cmath>

#include "manistoch/experiments/common.hpp"

namespace manistoch {

namespace detail {

/// Per-point moments E rho_T(x)^q over paths at every T of the grid;
/// moments[t][q][point].
struct MomentTable {
  std::vector<std::vector<std::vector<double>>> moments;
  std::vector<double> final_log_density;  // all (point, path) samples at the last T
};

template <Manifold M>
MomentTable density_moments(const FlowModel<M>& model, const std::vector<Point<M>>& pts, int n_paths,
                            const std::vector<double>& T_grid, const std::vector<double>& q_list, double dt,
                            std::uint64_t seed, int threads, bool keep_samples) {
  const double t_max = T_grid.back();
  const int steps = step_count(t_max, dt);
  std::vector<int> marks;
  for (double t : T_grid) marks.push_back(static_cast<int>(std::lround(t / t_max * steps)));
  const std::size_t np = pts.size();
  MomentTable out;
  out.moments.assign(T_grid.size(), std::vector<std::vector<double>>(q_list.size(), std::vector<double>(np, 0.0)));
  if (keep_samples) out.final_log_density.assign(np * static_cast<std::size_t>(n_paths), 0.0);
  const int m = static_cast<int>(model.noise.size());
  parallel_for(np, threads, [&](std::size_t i) {
    for (int j = 0; j < n_paths; ++j) {
      const auto drv = make_driver(m, t_max, steps, seed, i * static_cast<std::size_t>(n_paths) + static_cast<std::size_t>(j));
      auto s = initial_state(model.atlas, pts[i]);
      int k0 = 0;
      for (std::size_t t = 0; t < marks.size(); ++t) {
        advance(model, s, drv, k0, marks[t]);
        k0 = marks[t];
        for (std::size_t q = 0; q < q_list.size(); ++q) {
          out.moments[t][q][i] += std::exp(q_list[q] * s.log_density) / n_paths;
        }
      }
      if (keep_samples) out.final_log_density[i * static_cast<std::size_t>(n_paths) + static_cast<std::size_t>(j)] = s.log_density;
    }
  });
  return out;
}

}  // namespace detail

/// Moments of the density: the deterministic constant-divergence case, the
/// exponential-in-T envelope for a smooth compressible drift, and the
/// mollified rough drifts across levels.
template <Manifold M>
ExperimentReport exp_density_moments(const Config& cfg) {
  Stopwatch clock;
  const auto& dp = cfg.density;
  const std::uint64_t seed = stream_seed(cfg.general.seed, Stream::density);
  const int threads = cfg.general.threads;
  ExperimentReport rep;
  rep.id = "density-moments";
  rep.manifold = std::string(to_string(M::kind));
  auto& csv = rep.table("density_moments.csv", {"configuration", "q", "T", "sup_log_moment", "mean_log_moment",
                                                "exact_log_moment"});

  // Zero noise, sin drift on the torus, starts on the invariant circle theta_1 = 0
  // where div X = a: rho_T = exp(a T).
  const double a = dp.deterministic_rate;
  const FlowModel<Torus2> det{make_atlas<Torus2>(cfg.atlas), make_field<Torus2, TorusSinDrift>(a), {}};
  std::vector<Point<Torus2>> circle;
  for (int i = 0; i < 16; ++i) circle.push_back(torus_point(0.0, two_pi * i / 16.0));
  const auto dmom = detail::density_moments(det, circle, 1, dp.T_grid, dp.q_list, dp.dt, seed, threads, false);
  double det_err = 0.0;
  for (std::size_t t = 0; t < dp.T_grid.size(); ++t) {
    for (std::size_t q = 0; q < dp.q_list.size(); ++q) {
      const double exact = std::exp(dp.q_list[q] * a * dp.T_grid[t]);
      double worst = 0.0;
      for (double v : dmom.moments[t][q]) worst = std::max(worst, std::abs(v / exact - 1.0));
      det_err = std::max(det_err, worst);
      csv.add("deterministic", dp.q_list[q], dp.T_grid[t], std::log(dmom.moments[t][q].front()),
              std::log(dmom.moments[t][q].front()), dp.q_list[q] * a * dp.T_grid[t]);
    }
  }
  rep.metric("deterministic_max_relative_error", det_err);

  // Smooth compressible drift with the configured noise.
  const auto model = make_model<M>(cfg);
  const auto pts = sample_uniform<M>(static_cast<std::size_t>(dp.n_points), seed, 1);
  const auto mom = detail::density_moments(model, pts, dp.n_paths, dp.T_grid, dp.q_list, dp.dt, seed, threads, true);
  double r2_min = 1.0;
  for (std::size_t q = 0; q < dp.q_list.size(); ++q) {
    std::vector<double> y;
    for (std::size_t t = 0; t < dp.T_grid.size(); ++t) {
      const auto& v = mom.moments[t][q];
      const double sup = *std::max_element(v.begin(), v.end());
      double mean = 0.0;
      for (double e : v) mean += e / static_cast<double>(v.size());
      y.push_back(std::log(sup));
      csv.add("smooth", dp.q_list[q], dp.T_grid[t], std::log(sup), std::log(mean), std::nan(""));
    }
    const auto fit = fit_line(dp.T_grid, y);
    const std::string tag = "q" + CsvTable::cell(dp.q_list[q]);
    rep.metric("smooth_growth_rate_" + tag, fit.slope);
    rep.metric("smooth_intercept_" + tag, fit.intercept);
    rep.metric("smooth_r_squared_" + tag, fit.r_squared);
    rep.metric("smooth_max_residual_" + tag, fit.max_abs_residual);
    r2_min = std::min(r2_min, fit.r_squared);
  }
  auto& samples = rep.table("density_samples.csv", {"T", "rho"});
  for (double l : mom.final_log_density) samples.add(dp.T_grid.back(), std::exp(l));

  // Mollified rough drifts: the same moments, level by level.
  double moll_sup = 0.0;
  bool moll_finite = true;
  const auto mpts = sample_uniform<M>(static_cast<std::size_t>(dp.mollified_points), seed, 2);
  for (int n : dp.mollified_levels) {
    const auto mm = model.with_drift(cached_mollified_rough<M>(cfg, n, threads));
    const auto r = detail::density_moments(mm, mpts, dp.mollified_paths, dp.T_grid, dp.q_list, dp.dt, seed, threads,
                                           false);
    for (std::size_t q = 0; q < dp.q_list.size(); ++q) {
      for (std::size_t t = 0; t < dp.T_grid.size(); ++t) {
        const auto& v = r.moments[t][q];
        const double sup = *std::max_element(v.begin(), v.end());
        double mean = 0.0;
        for (double e : v) mean += e / static_cast<double>(v.size());
        moll_finite = moll_finite && std::isfinite(sup);
        moll_sup = std::max(moll_sup, std::log(sup));
        csv.add("mollified_n" + std::to_string(n), dp.q_list[q], dp.T_grid[t], std::log(sup), std::log(mean),
                std::nan(""));
      }
    }
  }
  rep.metric("mollified_sup_log_moment", moll_sup);
  rep.timing("total", clock.seconds());

  rep.verdict("density_deterministic", det_err < dp.deterministic_tolerance,
              "max relative error of E rho^q against exp(q a T) " + CsvTable::cell(det_err) + " < " +
                  CsvTable::cell(dp.deterministic_tolerance));
  rep.verdict("density_exponential_envelope", r2_min > dp.r2_min,
              "min R^2 of log sup_x E rho^q against T " + CsvTable::cell(r2_min) + " > " + CsvTable::cell(dp.r2_min));
  rep.verdict("density_mollified_finite", moll_finite,
              "sup over levels of log E rho^q " + CsvTable::cell(moll_sup));
  return rep;
}

}  // namespace manistoch

#endif  // MANISTOCH_EXPERIMENTS_DENSITY_HPP
