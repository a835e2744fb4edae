#ifndef MANISTOCH_EXPERIMENTS_MOLLIFY_HPP
#define MANISTOCH_EXPERIMENTS_MOLLIFY_HPP

#include <algorithm>
#include <cmath>

#include "manistoch/experiments/common.hpp"

namespace manistoch {

namespace detail {

/// Per-point |X - X_n|^p and |nabla (X - X_n)|^p on a fixed point set;
/// NaN marks points on the singular set.
template <Manifold M>
void sobolev_powers(const VectorField<M>& diff, const std::vector<Point<M>>& pts, double p, int threads,
                    std::vector<double>& a, std::vector<double>& b) {
  a.assign(pts.size(), 0.0);
  b.assign(pts.size(), 0.0);
  parallel_for(pts.size(), threads, [&](std::size_t i) {
    try {
      const auto j = diff.jet(pts[i]);
      a[i] = std::pow(j.value.norm(), p);
      b[i] = std::pow(j.nabla_norm(), p);
    } catch (const SingularPointError&) {
      a[i] = b[i] = std::numeric_limits<double>::quiet_NaN();
    }
  });
}

struct W1pSample {
  double lp = 0.0;
  double grad = 0.0;
  std::vector<double> linear;  // delta-method influence of each point on lp + grad
  Estimate lp_est;
  Estimate grad_est;
};

template <Manifold M>
W1pSample w1p_sample(const std::vector<double>& a, const std::vector<double>& b, double p) {
  std::vector<double> av;
  std::vector<double> bv;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::isnan(a[i])) continue;
    av.push_back(a[i]);
    bv.push_back(b[i]);
  }
  W1pSample s;
  s.lp_est = lp_from_powers(av, M::volume, p);
  s.grad_est = lp_from_powers(bv, M::volume, p);
  s.lp = s.lp_est.value;
  s.grad = s.grad_est.value;
  const double ca = s.lp > 0.0 ? M::volume * std::pow(s.lp, 1.0 - p) / p : 0.0;
  const double cb = s.grad > 0.0 ? M::volume * std::pow(s.grad, 1.0 - p) / p : 0.0;
  s.linear.resize(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!std::isnan(a[i])) s.linear[i] = ca * a[i] + cb * b[i];
  }
  return s;
}

/// max [div X_n]^- / (||[div X]^-||_inf + ||X||_inf) over a point set.
template <Manifold M>
double pp1_ratio(const VectorField<M>& rough, const VectorField<M>& mollified, const std::vector<Point<M>>& pts,
                 int threads, double& neg_div_sup) {
  std::vector<double> neg(pts.size(), 0.0);
  std::vector<double> base(pts.size(), 0.0);
  parallel_for(pts.size(), threads, [&](std::size_t i) {
    neg[i] = std::max(0.0, -mollified.divergence(pts[i]));
    base[i] = std::max(0.0, -rough.divergence(pts[i]));
  });
  neg_div_sup = *std::max_element(neg.begin(), neg.end());
  const double sup_x = rough_sup_norm<M>(rough).value();
  return neg_div_sup / (*std::max_element(base.begin(), base.end()) + sup_x);
}

}  // namespace detail

/// ||X - X_n||_{1,p} along the level grid on common quadrature points, and
/// the negative-divergence ratio on both manifolds.
template <Manifold M>
ExperimentReport exp_mollify_convergence(const Config& cfg) {
  Stopwatch clock;
  const auto& mp = cfg.mollify;
  const int threads = cfg.general.threads;
  const double p = cfg.rough.p;
  ExperimentReport rep;
  rep.id = "mollify-conv";
  rep.manifold = std::string(to_string(M::kind));
  const auto atlas = make_atlas<M>(cfg.atlas);
  const auto rough = make_rough_field<M>(cfg.rough);
  MollifyOptions opt;
  opt.quadrature_order = mp.quadrature_order;
  opt.threads = threads;

  const auto pts = sample_uniform<M>(static_cast<std::size_t>(mp.quadrature_n), cfg.general.seed,
                                     static_cast<std::uint64_t>(Stream::points));
  auto& csv = rep.table("mollify_convergence.csv", {"manifold", "n", "lp_norm", "lp_se", "grad_norm", "grad_se",
                                                    "w1p_norm", "w1p_se", "step_change", "step_change_se"});
  std::vector<detail::W1pSample> samples;
  std::size_t skipped = 0;
  bool monotone = true;
  for (int n : mp.levels) {
    std::vector<double> a;
    std::vector<double> b;
    detail::sobolev_powers(difference(rough, mollify(rough, atlas, n, opt)), pts, p, threads, a, b);
    skipped = static_cast<std::size_t>(std::count_if(a.begin(), a.end(), [](double v) { return std::isnan(v); }));
    samples.push_back(detail::w1p_sample<M>(a, b, p));
    const auto& s = samples.back();
    const double total = s.lp + s.grad;
    Estimate change{0.0, 0.0};
    if (samples.size() > 1) {
      const auto& prev = samples[samples.size() - 2];
      std::vector<double> d(pts.size());
      for (std::size_t i = 0; i < pts.size(); ++i) d[i] = s.linear[i] - prev.linear[i];
      change = {total - (prev.lp + prev.grad), mean_se(d).se};
      // Decrease within Monte Carlo error: no significant increase.
      if (change.value > 2.0 * change.se) monotone = false;
    }
    const double se = std::hypot(s.lp_est.se, s.grad_est.se);
    rep.metric("w1p_distance_n" + std::to_string(n), total, se);
    csv.add(rep.manifold, n, s.lp, s.lp_est.se, s.grad, s.grad_est.se, total, se, change.value, change.se);
  }
  const double initial = samples.front().lp + samples.front().grad;
  const double final_v = samples.back().lp + samples.back().grad;
  const double reduction = final_v / initial;
  rep.metric("final_over_initial", reduction);
  rep.metric("singular_points_skipped", static_cast<double>(skipped));
  const double fitted_rate = [&] {
    std::vector<double> x;
    std::vector<double> y;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      x.push_back(mp.levels[i]);
      y.push_back(samples[i].lp + samples[i].grad);
    }
    return fit_loglog(x, y).slope;
  }();
  rep.metric("fitted_loglog_slope", fitted_rate);
  rep.metric("asymptotic_slope", -(1.0 - p * (1.0 - cfg.rough.gamma)) / p);

  // Negative-divergence ratio on both built-in manifolds.
  auto& pp1_csv = rep.table("mollify_pp1.csv", {"manifold", "n", "neg_div_sup", "ratio"});
  double pp1_max = 0.0;
  std::vector<double> pp1_all;
  auto pp1_on = [&]<Manifold N>() {
    const auto at = make_atlas<N>(cfg.atlas);
    const auto rf = make_rough_field<N>(cfg.rough);
    const auto q = sample_uniform<N>(static_cast<std::size_t>(mp.pp1_points), cfg.general.seed, 0x991ULL);
    for (int n : mp.levels) {
      double neg = 0.0;
      const double r = detail::pp1_ratio<N>(rf, mollify(rf, at, n, opt), q, threads, neg);
      pp1_max = std::max(pp1_max, r);
      pp1_all.push_back(r);
      pp1_csv.add(std::string(to_string(N::kind)), n, neg, r);
    }
  };
  pp1_on.template operator()<Sphere2>();
  pp1_on.template operator()<Torus2>();
  rep.metric("pp1_max_ratio", pp1_max);
  rep.timing("total", clock.seconds());

  rep.verdict("mollifier_monotone", monotone, "no level increases ||X - X_n||_{1,p} by more than 2 SE");
  rep.verdict("mollifier_reduction", reduction < mp.required_reduction,
              "final/initial " + CsvTable::cell(reduction) + " < " + CsvTable::cell(mp.required_reduction));
  rep.verdict("mollifier_pp1", std::isfinite(pp1_max) && pp1_max <= mp.pp1_constant,
              "max ratio " + CsvTable::cell(pp1_max) + " <= " + CsvTable::cell(mp.pp1_constant) +
                  " on both manifolds");
  return rep;
}

}  // namespace manistoch

#endif  // MANISTOCH_EXPERIMENTS_MOLLIFY_HPP
