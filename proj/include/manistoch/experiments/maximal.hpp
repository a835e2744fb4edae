#ifndef MANISTOCH_EXPERIMENTS_MAXIMAL_HPP
#define MANISTOCH_EXPERIMENTS_MAXIMAL_HPP

#include <algorithm>
#include <cmath>

#include "manistoch/experiments/common.hpp"
#include "manistoch/maximal.hpp"

namespace manistoch {

namespace detail {

template <Manifold M>
Point<M> family_center() {
  if constexpr (M::kind == ManifoldKind::sphere2) {
    return sphere_point(0.3, 0.2, 0.9);
  } else {
    return torus_point(2.0, 1.0);
  }
}

/// Caps of three sizes and two smooth bumps around a fixed center.
template <Manifold M>
std::vector<TestFunction<M>> maximal_test_family() {
  const Point<M> c = family_center<M>();
  std::vector<TestFunction<M>> fam;
  for (double r : {0.2, 0.5, 1.0}) {
    fam.push_back({"cap_" + CsvTable::cell(r), [c, r](const Point<M>& x) { return distance(x, c) < r ? 1.0 : 0.0; }});
  }
  for (double r : {0.4, 1.2}) {
    fam.push_back({"bump_" + CsvTable::cell(r), [c, r](const Point<M>& x) {
                     const double t = distance(x, c) / r;
                     return t < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - t * t)) : 0.0;
                   }});
  }
  return fam;
}

/// Smooth u with |grad u| known in closed form, and the Hoelder profile.
template <Manifold M>
GradedFunction<M> smooth_graded() {
  if constexpr (M::kind == ManifoldKind::sphere2) {
    return {"polar_angle", [](const Point<M>& x) { return Sphere2::polar_angle(x.coords()); },
            [](const Point<M>&) { return 1.0; }};
  } else {
    return {"sin_theta1", [](const Point<M>& x) { return std::sin(x.coords().x()); },
            [](const Point<M>& x) { return std::abs(std::cos(x.coords().x())); }};
  }
}

template <Manifold M>
GradedFunction<M> holder_graded(double gamma) {
  auto offset = [](const Point<M>& x) {
    if constexpr (M::kind == ManifoldKind::sphere2) {
      return Sphere2::polar_angle(x.coords()) - pi / 2.0;
    } else {
      return x.coords().x() - pi;
    }
  };
  return {"holder_" + CsvTable::cell(gamma), [=](const Point<M>& x) { return std::pow(std::abs(offset(x)), gamma); },
          [=](const Point<M>& x) { return gamma * std::pow(std::abs(offset(x)), gamma - 1.0); }};
}

}  // namespace detail

/// Maximal-function invariants, the L^p bound and the Lipschitz-type estimate.
template <Manifold M>
ExperimentReport exp_maximal(const Config& cfg) {
  Stopwatch clock;
  const auto& mp = cfg.maximal;
  const int threads = cfg.general.threads;
  const std::uint64_t seed = cfg.general.seed;
  ExperimentReport rep;
  rep.id = "maximal";
  rep.manifold = std::string(to_string(M::kind));
  const auto atlas = make_atlas<M>(cfg.atlas);
  const auto cloud_n = static_cast<std::size_t>(mp.cloud_n);
  const auto eval_n = static_cast<std::size_t>(mp.eval_n);

  // Invariants on one cloud: f a cap, g a bump, c a constant.
  const auto fam = detail::maximal_test_family<M>();
  const auto cloud = sample_uniform<M>(cloud_n, seed, 11);
  const auto eval = sample_uniform<M>(eval_n, seed, 12);
  const auto f = tabulate<M>(cloud, fam[1].f);
  const auto g = tabulate<M>(cloud, fam[4].f);
  auto fg = f;
  for (std::size_t i = 0; i < fg.size(); ++i) fg.values[i] += g.values[i];
  auto cst = f;
  std::fill(cst.values.begin(), cst.values.end(), 0.7);
  const RadiusGrid grid{mp.R, mp.levels};
  std::vector<std::array<std::size_t, 5>> bad(eval_n);
  parallel_for(eval_n, threads, [&](std::size_t i) {
    auto& b = bad[i];
    b.fill(0);
    const auto& x = eval[i];
    const double mf = maximal_function(f, x, mp.R, grid);
    const double mg = maximal_function(g, x, mp.R, grid);
    const double mfg = maximal_function(fg, x, mp.R, grid);
    // monotone in R on the nested grid
    double prev = -1.0;
    for (int j = mp.levels - 1; j >= 0; --j) {
      try {
        const double v = maximal_function(f, x, grid.radius(j), grid);
        if (v < prev) ++b[0];
        prev = v;
      } catch (const InsufficientSamplesError&) {
      }
    }
    if (mfg > (mf + mg) * (1.0 + 1e-12)) ++b[1];
    if (mf > mfg * (1.0 + 1e-12)) ++b[2];
    const auto avg = ball_averages(f, x, grid);
    if (!std::isnan(avg[0]) && avg[0] > mf) ++b[3];
    if (std::abs(maximal_function(cst, x, mp.R, grid) - 0.7) > 1e-12) ++b[4];
  });
  std::array<std::size_t, 5> viol{};
  for (const auto& b : bad) {
    for (std::size_t k = 0; k < 5; ++k) viol[k] += b[k];
  }
  const char* names[] = {"monotonicity", "sublinearity", "order", "dominates_average", "constant"};
  std::size_t total_viol = 0;
  for (std::size_t k = 0; k < 5; ++k) {
    rep.metric(std::string("violations_") + names[k], static_cast<double>(viol[k]));
    total_viol += viol[k];
  }

  // L^p bound over the family, then the same on a doubled cloud.
  auto& lp_csv = rep.table("maximal_ratios.csv", {"function_id", "p", "R", "samples", "maximal_norm", "function_norm",
                                                  "ratio"});
  auto run_lp = [&](const std::vector<TestFunction<M>>& family, double p, std::size_t n) {
    const auto r = verify_lp_bound(family, p, mp.R, n, eval_n, seed, threads, mp.levels);
    for (const auto& row : r.rows) {
      lp_csv.add(row.function_id, row.p, row.R, row.samples, row.maximal_norm, row.function_norm, row.ratio);
    }
    return r;
  };
  const auto lp1 = run_lp(fam, mp.p, cloud_n);
  const auto lp2 = run_lp(fam, mp.p, 2 * cloud_n);
  const std::vector<TestFunction<M>> cap_only{fam[1]};
  const auto cap1 = run_lp(cap_only, mp.cap_p, cloud_n);
  const auto cap2 = run_lp(cap_only, mp.cap_p, 2 * cloud_n);
  double lp_drift = 0.0;
  bool lp_finite = true;
  for (std::size_t i = 0; i < lp1.rows.size(); ++i) {
    lp_finite = lp_finite && std::isfinite(lp1.rows[i].ratio) && std::isfinite(lp2.rows[i].ratio);
    lp_drift = std::max(lp_drift, std::abs(lp2.rows[i].ratio / lp1.rows[i].ratio - 1.0));
  }
  const double cap_drift = std::abs(cap2.max_ratio / cap1.max_ratio - 1.0);
  rep.metric("lp_max_ratio", lp1.max_ratio);
  rep.metric("lp_max_ratio_doubled", lp2.max_ratio);
  rep.metric("lp_max_relative_change", lp_drift);
  rep.metric("cap_ratio_p" + CsvTable::cell(mp.cap_p), cap1.max_ratio);
  rep.metric("cap_ratio_doubled", cap2.max_ratio);
  rep.metric("cap_relative_change", cap_drift);

  // Constant family gives ratio 1.
  const std::vector<TestFunction<M>> constant{{"constant", [](const Point<M>&) { return 1.0; }}};
  const auto one = verify_lp_bound(constant, mp.p, mp.R, cloud_n / 10, eval_n, seed, threads, mp.levels);
  rep.metric("constant_ratio", one.max_ratio);

  // Lipschitz-type estimate: smooth u, and the Hoelder profile under refinement.
  auto& lip_csv = rep.table("lipschitz.csv", {"function_id", "pairs", "cloud", "skipped", "violations", "p999", "max",
                                              "mean"});
  const auto pairs = static_cast<std::size_t>(mp.lipschitz_pairs);
  auto run_lip = [&](const GradedFunction<M>& u, std::size_t n) {
    const auto r = verify_lipschitz_estimate(u, atlas, pairs, n, seed, threads, mp.levels);
    lip_csv.add(r.function_id, r.pairs, n, r.skipped, r.violations, r.p999, r.max_k, r.mean_k);
    return r;
  };
  const auto smooth = run_lip(detail::smooth_graded<M>(), cloud_n);
  const auto h1 = run_lip(detail::holder_graded<M>(cfg.rough.gamma), cloud_n);
  const auto h2 = run_lip(detail::holder_graded<M>(cfg.rough.gamma), 2 * cloud_n);
  const double holder_drift = std::abs(h2.p999 / h1.p999 - 1.0);
  rep.metric("lipschitz_smooth_p999", smooth.p999);
  rep.metric("lipschitz_smooth_max", smooth.max_k);
  rep.metric("lipschitz_smooth_violations", static_cast<double>(smooth.violations));
  rep.metric("lipschitz_holder_p999", h1.p999);
  rep.metric("lipschitz_holder_p999_doubled", h2.p999);
  rep.metric("lipschitz_holder_relative_change", holder_drift);
  rep.timing("total", clock.seconds());

  rep.verdict("maximal_invariants", total_viol == 0 && std::abs(one.max_ratio - 1.0) < 1e-12,
              CsvTable::cell(total_viol) + " invariant violations over " + CsvTable::cell(eval_n) + " points");
  rep.verdict("maximal_lp_bound",
              lp_finite && lp1.max_ratio < mp.family_bound && lp_drift <= mp.stability_band &&
                  cap_drift <= mp.stability_band,
              "max ratio " + CsvTable::cell(lp1.max_ratio) + " < " + CsvTable::cell(mp.family_bound) +
                  ", change under doubling " + CsvTable::cell(lp_drift) + " and cap " + CsvTable::cell(cap_drift) +
                  " <= " + CsvTable::cell(mp.stability_band));
  rep.verdict("maximal_lipschitz", smooth.violations == 0 && smooth.p999 <= mp.lipschitz_bound,
              "smooth 99.9th percentile " + CsvTable::cell(smooth.p999) + " <= " +
                  CsvTable::cell(mp.lipschitz_bound));
  rep.verdict("maximal_lipschitz_holder",
              h1.violations == 0 && std::isfinite(h1.p999) && holder_drift <= mp.stability_band,
              "Hoelder 99.9th percentile " + CsvTable::cell(h1.p999) + ", change under doubling " +
                  CsvTable::cell(holder_drift));
  return rep;
}

}  // namespace manistoch

#endif  // MANISTOCH_EXPERIMENTS_MAXIMAL_HPP
