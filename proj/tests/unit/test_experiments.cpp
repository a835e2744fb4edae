#include <gtest/gtest.h>

#include "manistoch.hpp"
#include "manistoch/cli.hpp"
#include "small_config.hpp"

using namespace manistoch;

namespace {

bool verdict(const ExperimentReport& r, const std::string& name) {
  const auto* v = r.find_verdict(name);
  EXPECT_NE(v, nullptr) << name;
  return v && v->passed;
}

double metric(const ExperimentReport& r, const std::string& name) {
  const auto* m = r.find_metric(name);
  EXPECT_NE(m, nullptr) << name;
  return m ? m->value : std::nan("");
}

std::string dump(const ExperimentReport& r) { return to_json(r, "h", 0).dump(); }

}  // namespace

class Experiments : public ::testing::TestWithParam<std::string> {};

TEST_P(Experiments, RunsOnBothManifoldsAndIsDeterministic) {
  for (const char* m : {"sphere2", "torus2"}) {
    auto cfg = small_config();
    cfg.general.manifold = m;
    const auto a = cli::run_experiment(GetParam(), cfg);
    const auto b = cli::run_experiment(GetParam(), cfg);
    EXPECT_EQ(a.id, GetParam());
    EXPECT_FALSE(a.verdicts.empty());
    EXPECT_FALSE(a.tables.empty());
    EXPECT_EQ(dump(a), dump(b)) << m;
    for (const auto& t : a.tables) {
      EXPECT_FALSE(t.rows.empty()) << t.name;
      for (const auto& row : t.rows) EXPECT_EQ(row.size(), t.header.size()) << t.name;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(All, Experiments, ::testing::ValuesIn(cli::experiment_names()),
                         [](const auto& info) {
                           std::string s = info.param;
                           for (char& c : s) c = c == '-' ? '_' : c;
                           return s;
                         });

TEST(ExperimentChecks, GeometryOraclesPass) {
  const auto r = exp_geometry_cert<Sphere2>(small_config());
  EXPECT_TRUE(verdict(r, "geometry_oracles"));
  EXPECT_TRUE(verdict(r, "geometry_invariants"));
  EXPECT_TRUE(verdict(r, "atlas_certification"));
}

TEST(ExperimentChecks, FlowExactCases) {
  const auto r = exp_flow_demo<Sphere2>(small_config());
  EXPECT_TRUE(verdict(r, "flow_flat_exact"));
  EXPECT_TRUE(verdict(r, "flow_divergence_free_density"));
  EXPECT_TRUE(verdict(r, "flow_property"));
  EXPECT_TRUE(verdict(r, "flow_density_positive"));
}

TEST(ExperimentChecks, WongZakaiDivergenceFree) {
  const auto r = exp_wong_zakai<Sphere2>(small_config());
  EXPECT_TRUE(verdict(r, "wong_zakai_divergence_free"));
}

TEST(ExperimentChecks, QuasiInvarianceControls) {
  const auto r = exp_quasi_invariance<Sphere2>(small_config());
  EXPECT_TRUE(verdict(r, "quasi_invariance_measure_preserving"));
  EXPECT_EQ(metric(r, "control_max_abs_log_density"), 0.0);
  EXPECT_EQ(metric(r, "identity_max_abs_discrepancy"), 0.0);
}

TEST(ExperimentChecks, DensityDeterministicCase) {
  const auto r = exp_density_moments<Sphere2>(small_config());
  EXPECT_TRUE(verdict(r, "density_deterministic"));
  EXPECT_LT(metric(r, "deterministic_max_relative_error"), 1e-6);
}

TEST(ExperimentChecks, StabilityStructure) {
  const auto r = exp_stability<Sphere2>(small_config());
  EXPECT_TRUE(verdict(r, "stability_monotone"));
  EXPECT_TRUE(verdict(r, "stability_identical_drift"));
  EXPECT_TRUE(std::isfinite(metric(r, "envelope_a")));
  EXPECT_TRUE(std::isfinite(metric(r, "envelope_b")));
}

TEST(ExperimentChecks, CauchyStructure) {
  const auto r = exp_cauchy<Sphere2>(small_config());
  EXPECT_TRUE(verdict(r, "cauchy_symmetric"));
  EXPECT_TRUE(verdict(r, "cauchy_chebyshev_bound"));
  EXPECT_DOUBLE_EQ(metric(r, "diameter"), std::numbers::pi);
}

TEST(ExperimentChecks, DistanceZeroField) {
  const auto r = exp_distance_estimates<Sphere2>(small_config());
  EXPECT_TRUE(verdict(r, "distance_zero_field"));
  EXPECT_TRUE(verdict(r, "distance_smooth_majorant"));
  EXPECT_LT(metric(r, "divergence_free_first_p999"), 1e-8);
}

TEST(ExperimentChecks, PushforwardNormalization) {
  const auto r = exp_pushforward_constant<Sphere2>(small_config());
  EXPECT_TRUE(verdict(r, "pushforward_normalization"));
  EXPECT_TRUE(std::isfinite(metric(r, "compressible_K_T")));
}

TEST(ExperimentChecks, MaximalInvariantsExact) {
  const auto r = exp_maximal<Sphere2>(small_config());
  EXPECT_TRUE(verdict(r, "maximal_invariants"));
}

TEST(ExperimentChecks, ThreadCountDoesNotChangeResults) {
  auto one = small_config();
  auto two = small_config();
  two.general.threads = 2;
  EXPECT_EQ(dump(exp_cauchy<Sphere2>(one)), dump(exp_cauchy<Sphere2>(two)));
  EXPECT_EQ(dump(exp_pushforward_constant<Torus2>(one)), dump(exp_pushforward_constant<Torus2>(two)));
}

TEST(ExperimentChecks, ConstantsReproducibleAcrossSeeds) {
  auto a = small_config();
  auto b = small_config();
  a.general.seed = 101;
  b.general.seed = 202;
  a.pushforward.n_paths = b.pushforward.n_paths = 10;
  a.pushforward.n_points = b.pushforward.n_points = 200;
  const double ka = metric(exp_pushforward_constant<Sphere2>(a), "compressible_K_T");
  const double kb = metric(exp_pushforward_constant<Sphere2>(b), "compressible_K_T");
  EXPECT_NEAR(ka / kb, 1.0, 0.2);
}
