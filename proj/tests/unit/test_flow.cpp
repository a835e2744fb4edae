#include <gtest/gtest.h>

#include <cmath>

#include "manistoch.hpp"

using namespace manistoch;

namespace {

FlowModel<Torus2> flat_model(const Vec2& c, double s) {
  return {make_default_atlas<Torus2>(), make_field<Torus2, TorusConstant>(c), torus_translation_noise(s)};
}

}  // namespace

TEST(Flow, FlatTorusMatchesClosedForm) {
  const Vec2 c(0.3, -0.7);
  const double s = 0.4;
  const auto model = flat_model(c, s);
  const auto x0 = torus_point(1.0, 2.0);
  for (std::uint64_t p = 0; p < 10; ++p) {
    const auto drv = make_driver(2, 1.0, 1000, 1, p);
    const auto w = drv.endpoint();
    const auto end = flow_endpoint(model, x0, drv);
    const Point<Torus2> exact(Vec2(x0.coords() + c + s * Vec2(w[0], w[1])));
    EXPECT_LT(distance(end.position, exact), 1e-12);
    EXPECT_EQ(end.log_density, 0.0);
  }
}

TEST(Flow, WongZakaiEqualsHeunForConstantCoefficients) {
  const auto model = flat_model(Vec2(0.1, 0.2), 0.5);
  const auto drv = make_driver(2, 1.0, 64, 2, 0);
  const auto a = flow_endpoint(model, torus_point(0.5, 0.5), drv);
  for (int level : {8, 16, 64}) {
    const auto b = wong_zakai_endpoint(model, torus_point(0.5, 0.5), drv.coarsened(level), 1);
    EXPECT_LT(distance(a.position, b.position), 1e-12);
  }
}

TEST(Flow, DivergenceFreeKeepsUnitDensity) {
  const FlowModel<Sphere2> model{make_default_atlas<Sphere2>(), killing_field(Vec3(0, 0, 0.5)), sphere_killing_noise(0.5)};
  for (std::uint64_t p = 0; p < 5; ++p) {
    const auto end = flow_endpoint(model, sphere_point(0.6, 0.0, 0.8), make_driver(3, 1.0, 200, 3, p));
    EXPECT_EQ(end.log_density, 0.0);
  }
}

TEST(Flow, DeterministicDensityOnInvariantCircle) {
  const double a = 0.7;
  const FlowModel<Torus2> model{make_default_atlas<Torus2>(), make_field<Torus2, TorusSinDrift>(a), {}};
  const auto end = flow_endpoint(model, torus_point(0.0, 1.3), make_driver(0, 1.0, 400, 0, 0));
  EXPECT_NEAR(end.density(), std::exp(a), 1e-9);
}

TEST(Flow, KillingNoisePreservesDistances) {
  const FlowModel<Sphere2> model{make_default_atlas<Sphere2>(), zero_field<Sphere2>(), sphere_killing_noise(0.5)};
  const auto x = sphere_point(1, 0, 0);
  const auto y = sphere_point(0, 0.6, 0.8);
  const auto drv = make_driver(3, 1.0, 1000, 4, 0);
  const auto a = flow_endpoint(model, x, drv);
  const auto b = flow_endpoint(model, y, drv);
  // Heun's one-step map is orthogonal only up to O(dt^2) per step.
  EXPECT_NEAR(distance(a.position, b.position), distance(x, y), 1e-3);
}

TEST(Flow, FlowPropertyIsBitwise) {
  const FlowModel<Sphere2> model{make_default_atlas<Sphere2>(),
                                 make_field<Sphere2, SphereHeightGradient>(Vec3(0, 0, 0.5)), sphere_killing_noise(0.5)};
  const auto drv = make_driver(3, 1.0, 100, 5, 0);
  const auto whole = flow_endpoint(model, sphere_point(0.6, 0, 0.8), drv);
  auto s = initial_state(model.atlas, sphere_point(0.6, 0, 0.8));
  advance(model, s, drv, 0, 37);
  advance(model, s, drv, 37, 100);
  EXPECT_EQ(whole.position.coords(), s.position.coords());
  EXPECT_EQ(whole.log_density, s.log_density);
}

TEST(Flow, BackwardUndoesForwardToFirstOrder) {
  const FlowModel<Sphere2> model{make_default_atlas<Sphere2>(),
                                 make_field<Sphere2, SphereHeightGradient>(Vec3(0, 0, 0.5)), sphere_killing_noise(0.5)};
  double prev = 1.0;
  for (int n : {50, 100, 200, 400}) {
    double err = 0.0;
    for (std::uint64_t p = 0; p < 20; ++p) {
      const auto x = sphere_point(0.6, 0, 0.8);
      const auto drv = make_driver(3, 0.5, n, 6, p);
      const auto fw = flow_endpoint(model, x, drv);
      err += distance(backward_endpoint(model, fw.position, drv).position, x) / 20.0;
    }
    EXPECT_LT(err, prev);
    prev = err;
  }
  EXPECT_LT(prev, 1e-3);
}

TEST(Flow, RecordsStrideAndFinalState) {
  const auto model = flat_model(Vec2(0.1, 0.0), 0.0);
  const auto rec = simulate_flow(model, torus_point(0, 0), make_driver(2, 1.0, 25, 0, 0), 10);
  ASSERT_EQ(rec.size(), 4u);
  EXPECT_DOUBLE_EQ(rec.times.back(), 1.0);
  EXPECT_NEAR(rec.final_position().coords().x(), 0.1, 1e-14);
}

TEST(Flow, ChannelMismatchRejected) {
  const auto model = flat_model(Vec2(0.1, 0.0), 1.0);
  EXPECT_THROW(flow_endpoint(model, torus_point(0, 0), make_driver(3, 1.0, 10, 0, 0)), UsageError);
  EXPECT_THROW(wong_zakai_endpoint(model, torus_point(0, 0), make_driver(1, 1.0, 10, 0, 0)), UsageError);
}

TEST(Flow, CoupledIdenticalModelsStayTogether) {
  const FlowModel<Sphere2> model{make_default_atlas<Sphere2>(),
                                 make_field<Sphere2, SphereRough>(0.6, 1.0), sphere_killing_noise(0.5)};
  const auto r = simulate_pair(model, model.drift, sphere_point(0.6, 0, 0.8), make_driver(3, 0.5, 50, 7, 0));
  EXPECT_EQ(r.sup_dist_sq, 0.0);
}
