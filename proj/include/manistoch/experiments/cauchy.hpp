#ifndef MANISTOCH_EXPERIMENTS_CAUCHY_HPP
#define MANISTOCH_EXPERIMENTS_CAUCHY_HPP

#include <algorithm>
#include <cmath>

#include "manistoch/experiments/common.hpp"

namespace manistoch {

/// Phi_{n,m} = E int sup_t dis^2(x_{n,t}, x_{m,t}) dnu over the mollified
/// rough drifts under common noise, the Chebyshev split of Phi, and the
/// backward-forward inversion error under step halving.
template <Manifold M>
ExperimentReport exp_cauchy(const Config& cfg) {
  Stopwatch clock;
  const auto& cp = cfg.cauchy;
  const std::uint64_t seed = stream_seed(cfg.general.seed, Stream::cauchy);
  const int threads = cfg.general.threads;
  const int steps = step_count(cp.T, cp.dt);
  ExperimentReport rep;
  rep.id = "cauchy";
  rep.manifold = std::string(to_string(M::kind));

  const auto base = make_model<M>(cfg);
  const std::size_t nl = cp.levels.size();
  std::vector<FlowModel<M>> models;
  for (int n : cp.levels) models.push_back(base.with_drift(cached_mollified_rough<M>(cfg, n, threads)));

  const auto np = static_cast<std::size_t>(cp.n_points);
  const auto npath = static_cast<std::size_t>(cp.n_paths);
  const auto pts = sample_uniform<M>(np, seed, 1);
  const int m = static_cast<int>(base.noise.size());
  // sup dis^2 for every pair of levels, per (point, path)
  std::vector<Eigen::MatrixXd> sup(np * npath);
  parallel_for(np, threads, [&](std::size_t i) {
    for (std::size_t j = 0; j < npath; ++j) {
      const auto drv = make_driver(m, cp.T, steps, seed, i * npath + j);
      sup[i * npath + j] = simulate_coupled<M>(models, pts[i], drv).sup_dist_sq;
    }
  });

  auto per_point = [&](auto&& term) {
    std::vector<double> v(np, 0.0);
    for (std::size_t i = 0; i < np; ++i) {
      for (std::size_t j = 0; j < npath; ++j) v[i] += term(sup[i * npath + j]);
      v[i] *= M::volume / static_cast<double>(npath);
    }
    return v;
  };

  // Symmetry and zero diagonal.
  bool symmetric = true;
  for (const auto& s : sup) symmetric = symmetric && s.isApprox(s.transpose(), 0.0) && s.diagonal().isZero(0.0);

  const auto l1_pts = sample_uniform<M>(static_cast<std::size_t>(cp.l1_samples), seed, 7);
  auto& csv = rep.table("cauchy.csv", {"n", "m", "phi", "phi_se", "l1_distance", "C0", "R", "chebyshev_bound"});
  std::vector<Estimate> phi;
  std::vector<std::vector<double>> phi_pp;
  std::vector<double> delta;
  double c0 = 0.0;
  for (std::size_t k = 0; k + 1 < nl; ++k) {
    const auto ki = static_cast<Eigen::Index>(k);
    phi_pp.push_back(per_point([&](const Eigen::MatrixXd& s) { return s(ki, ki + 1); }));
    phi.push_back(mean_se(phi_pp.back()));
    delta.push_back(l1_distance(models[k].drift, models[k + 1].drift, l1_pts, threads).value);
    const double d = delta.back();
    const double c = mean_se(per_point([&](const Eigen::MatrixXd& s) { return std::log1p(s(ki, ki + 1) / d); })).value;
    c0 = std::max(c0, c);
  }
  bool bound_holds = true;
  const double diam2 = M::diameter * M::diameter;
  for (std::size_t k = 0; k + 1 < nl; ++k) {
    for (double R : cp.R_grid) {
      const double bound = diam2 * c0 / R + delta[k] * std::expm1(R) * M::volume;
      bound_holds = bound_holds && phi[k].value <= bound;
      csv.add(cp.levels[k], cp.levels[k + 1], phi[k].value, phi[k].se, delta[k], c0, R, bound);
    }
    rep.metric("phi_" + std::to_string(cp.levels[k]) + "_" + std::to_string(cp.levels[k + 1]), phi[k].value,
               phi[k].se);
    rep.metric("l1_distance_" + std::to_string(cp.levels[k]) + "_" + std::to_string(cp.levels[k + 1]), delta[k]);
  }
  rep.metric("chebyshev_C0", c0);
  rep.metric("diameter", M::diameter);

  // Strict decrease of consecutive Phi, paired over points.
  bool decreasing = true;
  for (std::size_t k = 0; k + 1 < phi.size(); ++k) {
    std::vector<double> d(np);
    for (std::size_t i = 0; i < np; ++i) d[i] = phi_pp[k][i] - phi_pp[k + 1][i];
    const auto e = mean_se(d);
    rep.metric("phi_drop_" + std::to_string(cp.levels[k]), e.value, e.se);
    if (!(e.value > cp.se_slack * e.se)) decreasing = false;
  }

  // backward(forward(x)) - x under step halving, for the first mollified level.
  auto& inv_csv = rep.table("inversion.csv", {"steps", "dt", "mean_error", "mean_error_se"});
  const auto& inv_model = models[std::min<std::size_t>(1, nl - 1)];
  const auto inv_seed = stream_seed(cfg.general.seed, Stream::inversion);
  const auto inv_pts = sample_uniform<M>(static_cast<std::size_t>(cp.inversion_paths), inv_seed, 1);
  std::vector<double> inv_dt;
  std::vector<double> inv_err;
  for (int n : cp.inversion_steps) {
    std::vector<double> err(inv_pts.size());
    parallel_for(inv_pts.size(), threads, [&](std::size_t p) {
      const auto drv = make_driver(m, cp.inversion_T, n, inv_seed, p);
      const auto fw = flow_endpoint(inv_model, inv_pts[p], drv);
      const auto bw = backward_endpoint(inv_model, fw.position, drv);
      err[p] = distance(bw.position, inv_pts[p]);
    });
    const auto e = mean_se(err);
    inv_dt.push_back(cp.inversion_T / n);
    inv_err.push_back(e.value);
    inv_csv.add(n, cp.inversion_T / n, e.value, e.se);
    rep.metric("inversion_error_steps" + std::to_string(n), e.value, e.se);
  }
  const auto inv_fit = fit_loglog(inv_dt, inv_err);
  bool inv_decreasing = true;
  for (std::size_t k = 1; k < inv_err.size(); ++k) inv_decreasing = inv_decreasing && inv_err[k] < inv_err[k - 1];
  rep.metric("inversion_order", inv_fit.slope);
  rep.timing("total", clock.seconds());

  rep.verdict("cauchy_decreasing", decreasing,
              "Phi_{n,2n} drops by more than " + CsvTable::cell(cp.se_slack) + " SE at each level");
  rep.verdict("cauchy_symmetric", symmetric, "sup dis^2 matrices symmetric with zero diagonal");
  rep.verdict("cauchy_chebyshev_bound", bound_holds,
              "Phi <= diam^2 C0 / R + delta (e^R - 1) nu(M) for R in the grid");
  rep.verdict("cauchy_inversion", inv_decreasing && inv_fit.slope >= cp.inversion_order_min,
              "inversion error order " + CsvTable::cell(inv_fit.slope) + " >= " +
                  CsvTable::cell(cp.inversion_order_min));
  return rep;
}

}  // namespace manistoch

#endif  // MANISTOCH_EXPERIMENTS_CAUCHY_HPP
