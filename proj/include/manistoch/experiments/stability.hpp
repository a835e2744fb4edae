#ifndef MANISTOCH_EXPERIMENTS_STABILITY_HPP
#define MANISTOCH_EXPERIMENTS_STABILITY_HPP

#include <algorithm>
#include <cmath>

#include "manistoch/experiments/common.hpp"

namespace manistoch {

/// S(delta) = E int log(sup_t dis^2(x_t, x^_t) / delta^2 + 1) dnu for the
/// rough drift against two of its mollifications under common noise, with
/// the envelope a + b ||X_0 - X^_0||_1 / delta.
template <Manifold M>
ExperimentReport exp_stability(const Config& cfg) {
  Stopwatch clock;
  const auto& sp = cfg.stability;
  const std::uint64_t seed = stream_seed(cfg.general.seed, Stream::stability);
  const int threads = cfg.general.threads;
  const int steps = step_count(sp.T, sp.dt);
  ExperimentReport rep;
  rep.id = "stability";
  rep.manifold = std::string(to_string(M::kind));

  const auto base = make_model<M>(cfg);
  const auto rough = make_rough_field<M>(cfg.rough);
  const std::vector<int> levels{sp.level, sp.second_level};
  std::vector<FlowModel<M>> models{base.with_drift(rough)};
  for (int n : levels) models.push_back(base.with_drift(cached_mollified_rough<M>(cfg, n, threads)));

  const auto l1_pts = sample_uniform<M>(static_cast<std::size_t>(sp.l1_samples), seed, 7);
  std::vector<Estimate> l1;
  for (std::size_t k = 0; k < levels.size(); ++k) l1.push_back(l1_distance(rough, models[k + 1].drift, l1_pts, threads));

  // sup dis^2 per (level, point, path)
  const auto np = static_cast<std::size_t>(sp.n_points);
  const auto npath = static_cast<std::size_t>(sp.n_paths);
  const auto pts = sample_uniform<M>(np, seed, 1);
  const int m = static_cast<int>(base.noise.size());
  std::vector<std::vector<double>> sup(levels.size(), std::vector<double>(np * npath));
  parallel_for(np, threads, [&](std::size_t i) {
    for (std::size_t j = 0; j < npath; ++j) {
      const auto drv = make_driver(m, sp.T, steps, seed, i * npath + j);
      const auto r = simulate_coupled<M>(models, pts[i], drv);
      for (std::size_t k = 0; k < levels.size(); ++k) {
        sup[k][i * npath + j] = r.sup_dist_sq(0, static_cast<Eigen::Index>(k + 1));
      }
    }
  });

  auto functional = [&](const std::vector<double>& u, double delta) {
    std::vector<double> per_point(np, 0.0);
    for (std::size_t i = 0; i < np; ++i) {
      for (std::size_t j = 0; j < npath; ++j) per_point[i] += std::log1p(u[i * npath + j] / (delta * delta));
      per_point[i] *= M::volume / static_cast<double>(npath);
    }
    return mean_se(per_point);
  };

  auto& csv = rep.table("stability.csv", {"level", "delta", "l1_distance", "x", "S", "S_se", "envelope", "role"});
  std::vector<std::vector<Estimate>> S(levels.size());
  bool monotone = true;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    for (double delta : sp.delta_grid) S[k].push_back(functional(sup[k], delta));
    for (std::size_t d = 1; d < S[k].size(); ++d) {
      if (sp.delta_grid[d] > sp.delta_grid[d - 1] && S[k][d].value > S[k][d - 1].value) monotone = false;
    }
  }

  // Envelope fitted on the first level, checked on both.
  auto xs = [&](std::size_t k) {
    std::vector<double> x;
    for (double delta : sp.delta_grid) x.push_back(l1[k].value / delta);
    return x;
  };
  auto values = [&](std::size_t k) {
    std::vector<double> y;
    for (const auto& e : S[k]) y.push_back(e.value);
    return y;
  };
  const auto env = dominating_line(xs(0), values(0));
  const auto env2 = dominating_line(xs(1), values(1));
  bool dominated = true;
  double worst_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const auto x = xs(k);
    for (std::size_t d = 0; d < sp.delta_grid.size(); ++d) {
      worst_excess = std::max(worst_excess, S[k][d].value - env(x[d]) - sp.se_slack * S[k][d].se);
      if (S[k][d].value > env(x[d]) + sp.se_slack * S[k][d].se) dominated = false;
      csv.add(levels[k], sp.delta_grid[d], l1[k].value, x[d], S[k][d].value, S[k][d].se, env(x[d]),
              k == 0 ? "fit" : "check");
      rep.metric("S_n" + std::to_string(levels[k]) + "_delta" + CsvTable::cell(sp.delta_grid[d]), S[k][d].value,
                 S[k][d].se);
    }
    rep.metric("l1_distance_n" + std::to_string(levels[k]), l1[k].value, l1[k].se);
  }
  rep.metric("envelope_a", env.intercept);
  rep.metric("envelope_b", env.slope);
  rep.metric("envelope_b_second_level", env2.slope);
  rep.metric("envelope_worst_excess", worst_excess);

  // Identical drifts: S vanishes identically.
  double control = 0.0;
  {
    const auto cn = std::min<std::size_t>(np, 50);
    for (std::size_t i = 0; i < cn; ++i) {
      const auto drv = make_driver(m, sp.T, steps, seed, np * npath + i);
      const auto r = simulate_pair(models[0], rough, pts[i], drv);
      control = std::max(control, r.sup_dist_sq);
    }
  }
  rep.metric("identical_drift_max_sup_dist_sq", control);
  rep.notes.push_back("envelope: tightest line a + b x with a, b >= 0 dominating S on the first level");
  rep.timing("total", clock.seconds());

  rep.verdict("stability_monotone", monotone, "S(delta) nonincreasing in delta on both levels");
  rep.verdict("stability_envelope", dominated && env.slope > 0.0 && env.intercept >= 0.0,
              "a = " + CsvTable::cell(env.intercept) + ", b = " + CsvTable::cell(env.slope) +
                  "; all points within " + CsvTable::cell(sp.se_slack) + " SE of the envelope on levels " +
                  std::to_string(sp.level) + " and " + std::to_string(sp.second_level));
  rep.verdict("stability_identical_drift", control == 0.0, "S == 0 for identical drifts");
  return rep;
}

}  // namespace manistoch

#endif  // MANISTOCH_EXPERIMENTS_STABILITY_HPP
