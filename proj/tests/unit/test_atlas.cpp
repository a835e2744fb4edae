#include <gtest/gtest.h>

#include "manistoch.hpp"

using namespace manistoch;

template <class M>
class AtlasTest : public ::testing::Test {};

using Manifolds = ::testing::Types<Sphere2, Torus2>;
TYPED_TEST_SUITE(AtlasTest, Manifolds);

TYPED_TEST(AtlasTest, PartitionSumsToOne) {
  const auto atlas = make_default_atlas<TypeParam>();
  for (const auto& x : sample_uniform<TypeParam>(5000, 1)) {
    const auto w = atlas.partition_weights(x);
    double s = 0.0;
    for (int k = 0; k < w.count; ++k) {
      EXPECT_GT(w.weights[static_cast<std::size_t>(k)], 0.0);
      EXPECT_TRUE(atlas.chart(w.ids[static_cast<std::size_t>(k)]).contains(x.coords()));
      s += w.weights[static_cast<std::size_t>(k)];
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TYPED_TEST(AtlasTest, CertificationPasses) {
  const auto atlas = make_default_atlas<TypeParam>();
  const auto rep = certify_atlas(atlas, 10000, 3);
  EXPECT_TRUE(rep.passed);
  EXPECT_EQ(rep.pairs_without_common_chart, 0u);
  EXPECT_EQ(rep.bilipschitz_violations, 0u);
  EXPECT_GE(rep.empirical_lambda, rep.declared_lambda * (1.0 - 1e-9));
}

TYPED_TEST(AtlasTest, ChartRoundTrip) {
  const auto atlas = make_default_atlas<TypeParam>();
  for (const auto& x : sample_uniform<TypeParam>(1000, 2)) {
    const auto& c = atlas.chart(atlas.best_chart(x));
    EXPECT_LT(TypeParam::distance(c.from_chart(c.to_chart(x.coords())), x.coords()), 1e-12);
  }
}

TYPED_TEST(AtlasTest, ClosePairsShareAChart) {
  const auto atlas = make_default_atlas<TypeParam>();
  Rng rng(4);
  for (int i = 0; i < 2000; ++i) {
    auto [x, y] = random_close_pair<TypeParam>(atlas.rho(), rng);
    EXPECT_TRUE(atlas.common_chart(x, y).has_value());
  }
}

TEST(Atlas, OverstatedLambdaFailsCertification) {
  const auto atlas = make_default_atlas<Sphere2>().with_lambda(0.999);
  const auto rep = certify_atlas(atlas, 2000, 5);
  EXPECT_FALSE(rep.passed);
  EXPECT_FALSE(rep.witnesses.empty());
}

TEST(Atlas, SphereChristoffelMatchesMetricDerivative) {
  const auto atlas = make_default_atlas<Sphere2>();
  const auto& c = atlas.chart(0);
  const Vec2 xi(0.2, -0.1);
  const double h = 1e-6;
  // Conformal metric g = f I: Gamma^k_ij = (d_i f delta_jk + d_j f delta_ik - d_k f delta_ij) / (2 f).
  const double f = c.conformal_factor(xi);
  const Vec2 df((c.conformal_factor(xi + Vec2(h, 0)) - c.conformal_factor(xi - Vec2(h, 0))) / (2 * h),
                (c.conformal_factor(xi + Vec2(0, h)) - c.conformal_factor(xi - Vec2(0, h))) / (2 * h));
  const auto gamma = c.christoffel_at(xi);
  for (int k = 0; k < 2; ++k) {
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        const double expect = (df(i) * (j == k) + df(j) * (i == k) - df(k) * (i == j)) / (2 * f);
        EXPECT_NEAR(gamma[static_cast<std::size_t>(k)](i, j), expect, 1e-6);
      }
    }
  }
}
