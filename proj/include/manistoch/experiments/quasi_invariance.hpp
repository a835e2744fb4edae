#ifndef MANISTOCH_EXPERIMENTS_QUASI_INVARIANCE_HPP
#define MANISTOCH_EXPERIMENTS_QUASI_INVARIANCE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

#include "manistoch/experiments/common.hpp"

namespace manistoch {

inline constexpr std::size_t dictionary_size = 9;

template <Manifold M>
struct DictionaryEntry {
  std::string id;
  std::function<double(const typename M::Vec&)> f;
};

/// Real spherical harmonics up to degree 2 on the sphere, trigonometric
/// monomials up to frequency 2 on the torus.
template <Manifold M>
std::array<DictionaryEntry<M>, dictionary_size> test_dictionary() {
  using V = typename M::Vec;
  if constexpr (M::kind == ManifoldKind::sphere2) {
    return {{{"1", [](const V&) { return 1.0; }},
             {"x", [](const V& p) { return p.x(); }},
             {"y", [](const V& p) { return p.y(); }},
             {"z", [](const V& p) { return p.z(); }},
             {"xy", [](const V& p) { return p.x() * p.y(); }},
             {"yz", [](const V& p) { return p.y() * p.z(); }},
             {"xz", [](const V& p) { return p.x() * p.z(); }},
             {"x2-y2", [](const V& p) { return p.x() * p.x() - p.y() * p.y(); }},
             {"3z2-1", [](const V& p) { return 3.0 * p.z() * p.z() - 1.0; }}}};
  } else {
    return {{{"1", [](const V&) { return 1.0; }},
             {"cos1", [](const V& p) { return std::cos(p.x()); }},
             {"sin1", [](const V& p) { return std::sin(p.x()); }},
             {"cos2", [](const V& p) { return std::cos(p.y()); }},
             {"sin2", [](const V& p) { return std::sin(p.y()); }},
             {"cos1+2", [](const V& p) { return std::cos(p.x() + p.y()); }},
             {"sin1-2", [](const V& p) { return std::sin(p.x() - p.y()); }},
             {"cos21", [](const V& p) { return std::cos(2.0 * p.x()); }},
             {"sin22", [](const V& p) { return std::sin(2.0 * p.y()); }}}};
  }
}

struct DualityEstimate {
  std::array<Estimate, dictionary_size> lhs;
  std::array<Estimate, dictionary_size> rhs;
  std::array<Estimate, dictionary_size> diff;
  double max_abs_log_density = 0.0;
  double max_z = 0.0;
};

/// Both sides of  int f(y_T(x)) g(x) dnu = int f(x) g(x_T(x)) rho_T(x) dnu
/// for the pairs (f_k, f_k); one forward and one backward flow per
/// (point, path) under the same Brownian path, SE by per-point batching.
template <Manifold M>
DualityEstimate estimate_duality(const FlowModel<M>& model, int n_points, int n_paths, double T, int steps,
                                 std::uint64_t seed, int threads) {
  const auto dict = test_dictionary<M>();
  const auto pts = sample_uniform<M>(static_cast<std::size_t>(n_points), seed, 1);
  const auto np = static_cast<std::size_t>(n_points);
  std::vector<std::array<double, dictionary_size>> l(np);
  std::vector<std::array<double, dictionary_size>> r(np);
  std::vector<double> maxlog(np, 0.0);
  const int m = static_cast<int>(model.noise.size());
  parallel_for(np, threads, [&](std::size_t i) {
    std::array<double, dictionary_size> al{};
    std::array<double, dictionary_size> ar{};
    const auto& x = pts[i].coords();
    for (int j = 0; j < n_paths; ++j) {
      const auto drv = make_driver(m, T, steps, seed, i * static_cast<std::size_t>(n_paths) + static_cast<std::size_t>(j));
      const auto fw = flow_endpoint(model, pts[i], drv);
      const auto bw = backward_endpoint(model, pts[i], drv);
      const double rho = fw.density();
      maxlog[i] = std::max(maxlog[i], std::abs(fw.log_density));
      for (std::size_t k = 0; k < dictionary_size; ++k) {
        const double g = dict[k].f(x);
        al[k] += dict[k].f(bw.position.coords()) * g;
        ar[k] += dict[k].f(x) * dict[k].f(fw.position.coords()) * rho;
      }
    }
    for (std::size_t k = 0; k < dictionary_size; ++k) {
      l[i][k] = M::volume * al[k] / n_paths;
      r[i][k] = M::volume * ar[k] / n_paths;
    }
  });
  DualityEstimate out;
  out.max_abs_log_density = *std::max_element(maxlog.begin(), maxlog.end());
  for (std::size_t k = 0; k < dictionary_size; ++k) {
    std::vector<double> a(np);
    std::vector<double> b(np);
    std::vector<double> d(np);
    for (std::size_t i = 0; i < np; ++i) {
      a[i] = l[i][k];
      b[i] = r[i][k];
      d[i] = a[i] - b[i];
    }
    out.lhs[k] = mean_se(a);
    out.rhs[k] = mean_se(b);
    out.diff[k] = mean_se(d);
    if (out.diff[k].se > 0.0) {
      out.max_z = std::max(out.max_z, std::abs(out.diff[k].value) / out.diff[k].se);
    } else if (out.diff[k].value != 0.0) {
      out.max_z = std::numeric_limits<double>::infinity();
    }
  }
  return out;
}

/// Duality identity for the compressible configuration, a measure-preserving
/// control and the identity flow.
template <Manifold M>
ExperimentReport exp_quasi_invariance(const Config& cfg) {
  Stopwatch clock;
  const auto& qp = cfg.quasi_invariance;
  const std::uint64_t seed = stream_seed(cfg.general.seed, Stream::quasi_invariance);
  const int steps = step_count(qp.T, qp.dt);
  const int threads = cfg.general.threads;
  ExperimentReport rep;
  rep.id = "quasi-invariance";
  rep.manifold = std::string(to_string(M::kind));
  const auto dict = test_dictionary<M>();
  auto& csv = rep.table("quasi_invariance.csv", {"configuration", "f", "g", "lhs", "lhs_se", "rhs", "rhs_se", "diff",
                                                 "diff_se", "z"});
  auto emit = [&](const std::string& name, const DualityEstimate& e) {
    for (std::size_t k = 0; k < dictionary_size; ++k) {
      const double z = e.diff[k].se > 0.0 ? e.diff[k].value / e.diff[k].se : 0.0;
      csv.add(name, dict[k].id, dict[k].id, e.lhs[k].value, e.lhs[k].se, e.rhs[k].value, e.rhs[k].se,
              e.diff[k].value, e.diff[k].se, z);
    }
  };

  const auto model = make_model<M>(cfg);
  const auto main = estimate_duality(model, qp.n_points, qp.n_paths, qp.T, steps, seed, threads);
  emit("compressible", main);
  for (std::size_t k = 0; k < dictionary_size; ++k) {
    rep.metric("diff_" + dict[k].id, main.diff[k].value, main.diff[k].se);
  }
  rep.metric("max_standardized_discrepancy", main.max_z);

  const auto preserving = model.with_drift(make_drift<M>("divergence_free", cfg.model.drift_strength, cfg.rough));
  const auto ctl = estimate_duality(preserving, qp.control_points, qp.control_paths, qp.T, steps, seed + 1, threads);
  emit("measure_preserving", ctl);
  rep.metric("control_max_abs_log_density", ctl.max_abs_log_density);
  rep.metric("control_max_standardized_discrepancy", ctl.max_z);

  const FlowModel<M> identity{model.atlas, zero_field<M>(), {}};
  const auto idf = estimate_duality(identity, qp.control_points, 1, qp.T, steps, seed + 2, threads);
  emit("identity", idf);
  double id_max = 0.0;
  for (const auto& d : idf.diff) id_max = std::max(id_max, std::abs(d.value));
  rep.metric("identity_max_abs_discrepancy", id_max);
  rep.notes.push_back("the identity is tested on a fixed dictionary; existence of a measurable inverse is not tested");
  rep.timing("total", clock.seconds());

  rep.verdict("quasi_invariance_duality", main.max_z <= qp.z_max,
              "max |LHS - RHS| / SE " + CsvTable::cell(main.max_z) + " <= " + CsvTable::cell(qp.z_max) + " over " +
                  std::to_string(dictionary_size) + " pairs");
  rep.verdict("quasi_invariance_measure_preserving",
              ctl.max_abs_log_density == 0.0 && ctl.max_z <= qp.z_max && id_max == 0.0,
              "control rho == 1 exactly (max |log rho| " + CsvTable::cell(ctl.max_abs_log_density) +
                  "), control max z " + CsvTable::cell(ctl.max_z) + ", identity discrepancy " +
                  CsvTable::cell(id_max));
  return rep;
}

}  // namespace manistoch

#endif  // MANISTOCH_EXPERIMENTS_QUASI_INVARIANCE_HPP
