#ifndef MANISTOCH_EXPERIMENTS_PUSHFORWARD_HPP
#define MANISTOCH_EXPERIMENTS_PUSHFORWARD_HPP

#include <algorithm>
#include <cmath>

#include "manistoch/experiments/common.hpp"
#include "manistoch/maximal.hpp"

namespace manistoch {

/// f == 1 followed by six smooth bumps (1 - dis^2/r^2)_+^2 of radius 1.
template <Manifold M>
std::vector<TestFunction<M>> bump_dictionary() {
  std::vector<Point<M>> centers;
  if constexpr (M::kind == ManifoldKind::sphere2) {
    for (const Vec3& v : {Vec3(1, 0, 0), Vec3(-1, 0, 0), Vec3(0, 1, 0), Vec3(0, -1, 0), Vec3(0, 0, 1), Vec3(0, 0, -1)}) {
      centers.push_back(Point<Sphere2>(v));
    }
  } else {
    for (int k = 0; k < 6; ++k) centers.push_back(torus_point(two_pi * k / 6.0, std::fmod(2.0 * k + 0.5, two_pi)));
  }
  std::vector<TestFunction<M>> out{{"one", [](const Point<M>&) { return 1.0; }}};
  for (std::size_t k = 0; k < centers.size(); ++k) {
    out.push_back({"bump" + std::to_string(k), [c = centers[k]](const Point<M>& y) {
                     const double d = distance(c, y);
                     const double u = std::max(0.0, 1.0 - d * d);
                     return u * u;
                   }});
  }
  return out;
}

namespace detail {

/// ratio[t][f] = E int f(x_t) dnu / int f dnu over the checkpoints t = T k / checkpoints.
struct PushforwardTable {
  std::vector<double> times;
  std::vector<std::vector<Estimate>> ratio;

  double sup() const {
    double k = 0.0;
    for (const auto& row : ratio) {
      for (const auto& e : row) k = std::max(k, e.value);
    }
    return k;
  }
};

template <Manifold M>
PushforwardTable pushforward_ratios(const FlowModel<M>& model, const std::vector<TestFunction<M>>& dict,
                                    const PushforwardParams& pp, int n_paths, std::uint64_t seed, int threads) {
  const int steps = step_count(pp.T, pp.dt);
  const auto np = static_cast<std::size_t>(pp.n_points);
  const auto pts = sample_uniform<M>(np, seed, 1);
  const int m = static_cast<int>(model.noise.size());
  const auto nc = static_cast<std::size_t>(pp.checkpoints);
  const std::size_t nf = dict.size();
  // a[t][f][i] = mean over paths of f(x_t(x_i))
  std::vector<std::vector<std::vector<double>>> a(nc, std::vector<std::vector<double>>(nf, std::vector<double>(np, 0.0)));
  parallel_for(np, threads, [&](std::size_t i) {
    for (int j = 0; j < n_paths; ++j) {
      const auto drv = make_driver(m, pp.T, steps, seed, i * static_cast<std::size_t>(n_paths) + static_cast<std::size_t>(j));
      auto s = initial_state(model.atlas, pts[i]);
      int k0 = 0;
      for (std::size_t t = 0; t < nc; ++t) {
        const int k1 = static_cast<int>(std::lround(static_cast<double>(t + 1) / static_cast<double>(nc) * steps));
        advance(model, s, drv, k0, k1);
        k0 = k1;
        for (std::size_t f = 0; f < nf; ++f) a[t][f][i] += dict[f].f(s.position);
      }
    }
    for (auto& row : a) {
      for (auto& v : row) v[i] /= n_paths;
    }
  });
  PushforwardTable out;
  for (std::size_t t = 0; t < nc; ++t) {
    out.times.push_back(pp.T * static_cast<double>(t + 1) / static_cast<double>(nc));
    std::vector<Estimate> row;
    for (std::size_t f = 0; f < nf; ++f) {
      double sa = 0.0;
      double sb = 0.0;
      std::vector<double> b(np);
      for (std::size_t i = 0; i < np; ++i) {
        b[i] = dict[f].f(pts[i]);
        sa += a[t][f][i];
        sb += b[i];
      }
      const double r = sa / sb;
      // delta-method SE of a ratio of paired means
      std::vector<double> lin(np);
      for (std::size_t i = 0; i < np; ++i) lin[i] = (a[t][f][i] - r * b[i]) / (sb / static_cast<double>(np));
      row.push_back({r, mean_se(lin).se});
    }
    out.ratio.push_back(std::move(row));
  }
  return out;
}

}  // namespace detail

/// K_T = sup over the bump dictionary and the time grid of
/// E int f(x_t) dnu / int f dnu.
template <Manifold M>
ExperimentReport exp_pushforward_constant(const Config& cfg) {
  Stopwatch clock;
  const auto& pp = cfg.pushforward;
  const std::uint64_t seed = stream_seed(cfg.general.seed, Stream::pushforward);
  const int threads = cfg.general.threads;
  ExperimentReport rep;
  rep.id = "pushforward";
  rep.manifold = std::string(to_string(M::kind));
  const auto dict = bump_dictionary<M>();
  const auto model = make_model<M>(cfg);
  auto& csv = rep.table("pushforward.csv", {"configuration", "paths", "function", "t", "ratio", "ratio_se"});
  auto record = [&](const std::string& name, int paths, const detail::PushforwardTable& tab) {
    for (std::size_t t = 0; t < tab.times.size(); ++t) {
      for (std::size_t f = 0; f < dict.size(); ++f) {
        csv.add(name, paths, dict[f].id, tab.times[t], tab.ratio[t][f].value, tab.ratio[t][f].se);
      }
    }
  };

  // f == 1 must give exactly 1 in every configuration.
  bool normalized = true;
  auto check_one = [&](const detail::PushforwardTable& tab) {
    for (const auto& row : tab.ratio) normalized = normalized && row.front().value == 1.0;
  };

  const auto preserving = model.with_drift(make_drift<M>("divergence_free", cfg.model.drift_strength, cfg.rough));
  const auto mp = detail::pushforward_ratios(preserving, dict, pp, pp.n_paths, seed, threads);
  record("divergence_free", pp.n_paths, mp);
  check_one(mp);
  double mp_z = 0.0;
  for (const auto& row : mp.ratio) {
    for (const auto& e : row) {
      if (e.se > 0.0) mp_z = std::max(mp_z, std::abs(e.value - 1.0) / e.se);
    }
  }
  rep.metric("divergence_free_K_T", mp.sup());
  rep.metric("divergence_free_max_standardized_deviation", mp_z);

  const auto smooth = model.with_drift(make_drift<M>("compressible", cfg.model.drift_strength, cfg.rough));
  const auto base = detail::pushforward_ratios(smooth, dict, pp, pp.n_paths, seed, threads);
  const auto doubled = detail::pushforward_ratios(smooth, dict, pp, 2 * pp.n_paths, seed, threads);
  record("compressible", pp.n_paths, base);
  record("compressible", 2 * pp.n_paths, doubled);
  check_one(base);
  check_one(doubled);
  const double k_base = base.sup();
  const double k_doubled = doubled.sup();
  const double change = std::abs(k_doubled / k_base - 1.0);
  rep.metric("compressible_K_T", k_base);
  rep.metric("compressible_K_T_doubled_paths", k_doubled);
  rep.metric("compressible_relative_change", change);

  double k_lo = std::numeric_limits<double>::infinity();
  double k_hi = 0.0;
  for (int n : pp.mollified_levels) {
    const auto mm = model.with_drift(cached_mollified_rough<M>(cfg, n, threads));
    const auto tab = detail::pushforward_ratios(mm, dict, pp, pp.n_paths, seed, threads);
    record("mollified_n" + std::to_string(n), pp.n_paths, tab);
    check_one(tab);
    const double k = tab.sup();
    rep.metric("mollified_K_T_n" + std::to_string(n), k);
    k_lo = std::min(k_lo, k);
    k_hi = std::max(k_hi, k);
  }
  const bool uniform = std::isfinite(k_hi) && k_hi <= (1.0 + pp.stability_band) * k_lo;
  rep.timing("total", clock.seconds());

  rep.verdict("pushforward_normalization", normalized, "f == 1 gives ratio exactly 1");
  rep.verdict("pushforward_measure_preserving", mp_z <= pp.z_max,
              "divergence-free drift: max |ratio - 1| / SE " + CsvTable::cell(mp_z) + " <= " + CsvTable::cell(pp.z_max));
  rep.verdict("pushforward_finite_stable", std::isfinite(k_base) && change <= pp.stability_band,
              "compressible K_T " + CsvTable::cell(k_base) + " changes by " + CsvTable::cell(change) +
                  " under path doubling (band " + CsvTable::cell(pp.stability_band) + ")");
  rep.verdict("pushforward_mollified_uniform", uniform,
              "K_T over mollified levels within [" + CsvTable::cell(k_lo) + ", " + CsvTable::cell(k_hi) + "]");
  return rep;
}

}  // namespace manistoch

#endif  // MANISTOCH_EXPERIMENTS_PUSHFORWARD_HPP
