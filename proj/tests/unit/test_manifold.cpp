#include <gtest/gtest.h>

#include <cmath>

#include "manistoch.hpp"

using namespace manistoch;

TEST(Sphere, DistanceMatchesArccos) {
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const Vec3 a = Sphere2::random_point(rng);
    const Vec3 b = Sphere2::random_point(rng);
    EXPECT_NEAR(Sphere2::distance(a, b), std::acos(std::clamp(a.dot(b), -1.0, 1.0)), 1e-12);
  }
}

TEST(Sphere, AntipodalDistanceIsDiameter) {
  EXPECT_NEAR(distance(sphere_point(0, 0, 1), sphere_point(0, 0, -1)), pi, 1e-15);
  EXPECT_DOUBLE_EQ(Sphere2::diameter, pi);
}

TEST(Sphere, ExpInvertsLog) {
  Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    const Vec3 x = Sphere2::random_point(rng);
    const Vec3 y = Sphere2::random_point(rng);
    if (Sphere2::distance(x, y) > 3.0) continue;
    EXPECT_LT((Sphere2::exp(x, Sphere2::log(x, y)) - y).norm(), 1e-12);
  }
}

TEST(Torus, DistanceWrapsAround) {
  EXPECT_NEAR(distance(torus_point(0.1, 0.0), torus_point(2 * pi - 0.1, 0.0)), 0.2, 1e-14);
  EXPECT_NEAR(distance(torus_point(0.0, 0.0), torus_point(pi, pi)), pi * std::sqrt(2.0), 1e-14);
}

TEST(Geodesic, ShootingMatchesClosedForm) {
  const auto atlas = make_default_atlas<Sphere2>();
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    auto [x, y] = random_close_pair<Sphere2>(atlas.rho(), rng);
    EXPECT_NEAR(shooting_distance(atlas, x, y), distance(x, y), 1e-6);
  }
}

TEST(Geodesic, SegmentLengthAndEndpoints) {
  const auto x = sphere_point(1, 0, 0);
  const auto y = sphere_point(0, 1, 0);
  const auto seg = minimizing_geodesic(x, y);
  EXPECT_NEAR(seg.length(), pi / 2, 1e-14);
  EXPECT_LT((seg.point_at(seg.length()).coords() - y.coords()).norm(), 1e-12);
}

TEST(Geodesic, CutLocusRejected) {
  EXPECT_THROW(minimizing_geodesic(sphere_point(0, 0, 1), sphere_point(0, 0, -1)), DegeneratePairError);
}

TEST(Transport, MatchesRotationOracle) {
  const auto atlas = make_default_atlas<Sphere2>();
  Rng rng(4);
  for (int i = 0; i < 30; ++i) {
    auto [x, y] = random_close_pair<Sphere2>(atlas.rho(), rng);
    const TangentVector<Sphere2> v{x, Sphere2::random_unit_tangent(x.coords(), rng)};
    const auto seg = minimizing_geodesic(x, y);
    const auto a = parallel_transport(atlas, v, seg);
    const auto b = transport_closed_form(v, y);
    EXPECT_LT((a.components - b.components).norm(), 1e-7);
    EXPECT_NEAR(a.norm(), 1.0, 1e-7);
  }
}

TEST(GradDistSq, MatchesFiniteDifference) {
  Rng rng(5);
  const double h = 1e-6;
  for (int i = 0; i < 30; ++i) {
    auto [x, y] = random_close_pair<Sphere2>(1.0, rng);
    const Vec3 v = Sphere2::random_unit_tangent(x.coords(), rng);
    const double fd = (std::pow(distance(Point<Sphere2>(Sphere2::exp(x.coords(), h * v)), y), 2) -
                       std::pow(distance(Point<Sphere2>(Sphere2::exp(x.coords(), -h * v)), y), 2)) /
                      (2 * h);
    EXPECT_NEAR(grad_dist_sq(x, y).components.dot(v), fd, 1e-6);
  }
}

TEST(GradDistSq, AntisymmetryUnderTransport) {
  // grad_x d^2(x, y) + transport of grad_y d^2(x, y) back to x vanishes.
  Rng rng(6);
  for (int i = 0; i < 30; ++i) {
    auto [x, y] = random_close_pair<Sphere2>(1.0, rng);
    const auto gy = grad_dist_sq(y, x);
    const auto back = transport_closed_form(gy, x);
    EXPECT_LT((grad_dist_sq(x, y).components + back.components).norm(), 1e-12);
  }
}

TEST(Sampling, ClosePairsRespectBound) {
  Rng rng(7);
  for (int i = 0; i < 500; ++i) {
    auto [x, y] = random_close_pair<Torus2>(0.3, rng);
    EXPECT_LT(distance(x, y), 0.3 + 1e-12);
  }
}

TEST(Sampling, UniformSphereHasZeroMean) {
  const auto pts = sample_uniform<Sphere2>(20000, 8);
  Vec3 mean = Vec3::Zero();
  for (const auto& p : pts) mean += p.coords() / 20000.0;
  EXPECT_LT(mean.norm(), 4.0 * std::sqrt(3.0 / 20000.0));
}
