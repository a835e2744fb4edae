#include <gtest/gtest.h>

#include <cmath>

#include "manistoch.hpp"

using namespace manistoch;

TEST(Quadrature, GaussLegendreIntegratesPolynomials) {
  const auto g = gauss_legendre(8);
  double s0 = 0.0;
  double s14 = 0.0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    s0 += g.weights[i];
    s14 += g.weights[i] * std::pow(g.nodes[i], 14);
  }
  EXPECT_NEAR(s0, 2.0, 1e-14);
  EXPECT_NEAR(s14, 2.0 / 15.0, 1e-14);
}

TEST(Quadrature, MollifierRuleIsNormalized) {
  const MollifierRule rule(16);
  double s = 0.0;
  Vec2 g = Vec2::Zero();
  for (std::size_t i = 0; i < rule.size(); ++i) {
    s += rule.weights[i];
    g += rule.grad_weights[i];
  }
  EXPECT_NEAR(s, 1.0, 1e-14);
  EXPECT_LT(g.norm(), 1e-12);
}

TEST(Quadrature, ContinuousNormalization) {
  // int zeta over the disc in polar coordinates: 2 pi int_0^1 c e^{-1/(1-r^2)} r dr.
  const auto g = gauss_legendre(200);
  double s = 0.0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const double r = 0.5 * (g.nodes[i] + 1.0);
    s += 0.5 * g.weights[i] * 2.0 * std::numbers::pi * r * mollifier(Vec2(r, 0.0));
  }
  EXPECT_NEAR(s, 1.0, 1e-9);
}

TEST(Mollify, ConstantTorusFieldReproduced) {
  const auto atlas = make_default_atlas<Torus2>();
  const auto c = make_field<Torus2, TorusConstant>(Vec2(0.4, -0.3));
  const auto m = mollify(c, atlas, 8);
  for (const auto& x : sample_uniform<Torus2>(50, 1)) {
    EXPECT_LT((m.value(x) - c.value(x)).norm(), 1e-12);
    EXPECT_LT(m.jet(x).nabla.norm(), 1e-10);
  }
}

TEST(Mollify, SmoothDriftFlowsCoincide) {
  // Mollification of a constant field is the identity up to quadrature, so
  // coupled flows across levels agree to integrator tolerance.
  Config cfg;
  const auto atlas = make_default_atlas<Torus2>();
  const auto c = make_field<Torus2, TorusConstant>(Vec2(0.4, -0.3));
  const FlowModel<Torus2> base{atlas, c, torus_translation_noise(0.5)};
  std::vector<FlowModel<Torus2>> models;
  for (int n : {4, 8, 16}) models.push_back(base.with_drift(mollify(c, atlas, n)));
  for (std::uint64_t p = 0; p < 5; ++p) {
    const auto r = simulate_coupled<Torus2>(models, torus_point(1.0, 1.0), make_driver(2, 0.5, 50, 2, p));
    EXPECT_LT(r.sup_dist_sq.maxCoeff(), 1e-6);
  }
}

TEST(Mollify, RoughFieldDistanceShrinks) {
  const auto atlas = make_default_atlas<Sphere2>();
  const auto rough = make_field<Sphere2, SphereRough>(0.6, 1.0);
  const auto pts = sample_uniform<Sphere2>(2000, 3);
  double prev = 1e300;
  for (int n : {4, 8, 16}) {
    MollifyOptions opt;
    opt.quadrature_order = 12;
    const auto d = l1_distance(rough, mollify(rough, atlas, n, opt), pts, 1);
    EXPECT_LT(d.value, prev);
    prev = d.value;
  }
}

TEST(Mollify, TabulatedMatchesDirectOnSmoothField) {
  const auto atlas = make_default_atlas<Sphere2>();
  const auto smooth = make_field<Sphere2, SphereHeightGradient>(Vec3(0.3, -0.5, 0.8));
  MollifyOptions tab;
  tab.tabulate = true;
  tab.nodes_per_radius = 8;
  const auto a = mollify(smooth, atlas, 8);
  const auto b = mollify(smooth, atlas, 8, tab);
  double worst = 0.0;
  for (const auto& x : sample_uniform<Sphere2>(200, 4)) worst = std::max(worst, (a.value(x) - b.value(x)).norm());
  EXPECT_LT(worst, 1e-8);
}

// For a rough field the quadrature sum is itself rough at node scale, so the
// table is held to the direct evaluation's own quadrature resolution.
TEST(Mollify, TabulatedWithinQuadratureResolutionOnRoughField) {
  const auto atlas = make_default_atlas<Sphere2>();
  const auto rough = make_field<Sphere2, SphereRough>(0.6, 1.0);
  MollifyOptions tab;
  tab.tabulate = true;
  tab.nodes_per_radius = 8;
  MollifyOptions fine;
  fine.quadrature_order = 24;
  const auto a = mollify(rough, atlas, 8);
  const auto b = mollify(rough, atlas, 8, tab);
  const auto c = mollify(rough, atlas, 8, fine);
  double table_gap = 0.0;
  double quadrature_gap = 0.0;
  for (const auto& x : sample_uniform<Sphere2>(60, 4)) {
    table_gap = std::max(table_gap, (a.value(x) - b.value(x)).norm());
    quadrature_gap = std::max(quadrature_gap, (a.value(x) - c.value(x)).norm());
  }
  EXPECT_LT(table_gap, 1e-2);
  EXPECT_LT(table_gap, 2.0 * quadrature_gap);
}

TEST(Sobolev, RoughNormFiniteAndFlagged) {
  const auto rough = make_field<Sphere2, SphereRough>(0.6, 1.0);
  const auto ok = sobolev_norms(rough, 1.5, 20000, 5);
  EXPECT_TRUE(std::isfinite(ok.w1p_norm.value));
  EXPECT_FALSE(ok.non_sobolev_flag);
  const auto smooth = sobolev_norms(killing_field(Vec3::UnitZ()), 2.0, 20000, 5);
  // |omega x p| = sin(theta): ||X||_2^2 = int sin^2 = 8 pi / 3.
  EXPECT_NEAR(smooth.l_p_norm.value, std::sqrt(8.0 * std::numbers::pi / 3.0), 4.0 * smooth.l_p_norm.se + 1e-12);
}
