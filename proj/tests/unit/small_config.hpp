#ifndef MANISTOCH_TESTS_SMALL_CONFIG_HPP
#define MANISTOCH_TESTS_SMALL_CONFIG_HPP

#include <string>
#include <vector>

// Overrides that shrink every experiment to a few seconds.
inline const std::vector<std::string>& small_overrides() {
  static const std::vector<std::string> s{
      "geometry.oracle_pairs=100",      "geometry.cert_pairs=500",        "geometry.partition_points=500",
      "mollify.levels=4,8",             "mollify.quadrature_n=2000",      "mollify.pp1_points=1000",
      "mollify.quadrature_order=8",     "mollify.nodes_per_radius=2",     "maximal.cloud_n=5000",
      "maximal.eval_n=100",             "maximal.lipschitz_pairs=100",    "flow.dt=0.01",
      "flow.n_paths=4",                 "flow.demo_paths=2",              "wong_zakai.levels=8,16,32",
      "wong_zakai.fine_steps=256",      "wong_zakai.n_paths=20",          "quasi_invariance.n_points=40",
      "quasi_invariance.n_paths=20",    "quasi_invariance.control_points=10", "quasi_invariance.control_paths=10",
      "density.n_points=10",            "density.n_paths=20",             "density.dt=0.01",
      "density.mollified_levels=4",     "density.mollified_points=4",     "density.mollified_paths=4",
      "stability.n_points=20",          "stability.n_paths=10",           "stability.level=4",
      "stability.second_level=8",       "stability.l1_samples=1000",      "stability.dt=0.05",
      "cauchy.levels=4,8,16",           "cauchy.n_points=20",             "cauchy.n_paths=2",
      "cauchy.dt=0.05",                 "cauchy.l1_samples=1000",         "cauchy.inversion_paths=10",
      "cauchy.inversion_steps=20,40",   "distance.n_pairs=100",           "distance.cloud_n=2000",
      "pushforward.n_points=40",        "pushforward.n_paths=4",          "pushforward.dt=0.05",
      "pushforward.mollified_levels=4,8"};
  return s;
}

inline manistoch::Config small_config() {
  manistoch::Config cfg;
  for (const auto& s : small_overrides()) manistoch::apply_override(cfg, s);
  return cfg;
}

#endif  // MANISTOCH_TESTS_SMALL_CONFIG_HPP
