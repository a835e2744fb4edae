#include <gtest/gtest.h>

#include <cmath>

#include "manistoch.hpp"

using namespace manistoch;

namespace {


// Divergence by the flux of X through a small geodesic circle around x.
double flux_divergence(const VectorField<Sphere2>& f, const Point<Sphere2>& x, double r) {
  const Vec3 p = x.coords();
  Vec3 e1 = p.unitOrthogonal();
  Vec3 e2 = p.cross(e1);
  const int n = 400;
  double flux = 0.0;
  for (int i = 0; i < n; ++i) {
    const double a = 2 * pi * (i + 0.5) / n;
    const Vec3 dir = std::cos(a) * e1 + std::sin(a) * e2;
    const Point<Sphere2> y(Sphere2::exp(p, r * dir));
    const Vec3 normal = -Sphere2::log(y.coords(), p).normalized();
    flux += f.value(y).dot(normal) * (2 * pi * std::sin(r) / n);
  }
  return flux / (2 * pi * (1 - std::cos(r)));
}

}  // namespace

TEST(Field, KillingIsDivergenceFree) {
  const auto k = killing_field(Vec3(0.3, -0.2, 0.9));
  for (const auto& x : sample_uniform<Sphere2>(50, 1)) {
    EXPECT_EQ(k.divergence(x), 0.0);
    EXPECT_NEAR(flux_divergence(k, x, 1e-3), 0.0, 1e-9);
    EXPECT_NEAR(k.value(x).dot(x.coords()), 0.0, 1e-15);
  }
}

TEST(Field, HeightGradientDivergence) {
  const Vec3 a(0.0, 0.0, 0.5);
  const auto g = make_field<Sphere2, SphereHeightGradient>(a);
  for (const auto& x : sample_uniform<Sphere2>(50, 2)) {
    EXPECT_NEAR(g.divergence(x), -2.0 * a.dot(x.coords()), 1e-14);
    EXPECT_NEAR(flux_divergence(g, x, 1e-3), g.divergence(x), 1e-5);
    EXPECT_NEAR(g.jet(x).divergence(), g.divergence(x), 1e-12);
  }
}

TEST(Field, JetMatchesFiniteDifferences) {
  const auto g = make_field<Sphere2, SphereHeightGradient>(Vec3(0.2, 0.4, -0.3));
  Rng rng(3);
  const double h = 1e-6;
  for (const auto& x : sample_uniform<Sphere2>(20, 3)) {
    const Vec3 v = Sphere2::random_unit_tangent(x.coords(), rng);
    const Point<Sphere2> xp(Sphere2::exp(x.coords(), h * v));
    const Point<Sphere2> xm(Sphere2::exp(x.coords(), -h * v));
    const Vec3 fd = Sphere2::tangent_projector(x.coords()) * (g.value(xp) - g.value(xm)) / (2 * h);
    EXPECT_LT((g.jet(x).nabla * v - fd).norm(), 1e-6);
  }
}

TEST(Field, RoughSphereSingularOnEquator) {
  const auto r = make_field<Sphere2, SphereRough>(0.6, 1.0);
  const auto eq = sphere_point(1, 0, 0);
  EXPECT_TRUE(r.singular_at(eq));
  EXPECT_THROW(r.jet(eq), SingularPointError);
  EXPECT_EQ(r.value(eq).norm(), 0.0);
  EXPECT_EQ(r.divergence(sphere_point(0.6, 0, 0.8)), 0.0);
  EXPECT_EQ(*r.roughness_exponent(), 0.6);
}

TEST(Field, RoughTorusHoelderProfile) {
  const auto r = make_field<Torus2, TorusRough>(0.5, 2.0);
  EXPECT_NEAR(r.value(torus_point(pi + 0.25, 1.0)).y(), 2.0 * 0.5, 1e-14);
  EXPECT_THROW(r.jet(torus_point(pi, 0.3)), SingularPointError);
}

TEST(Field, SobolevMembership) {
  EXPECT_TRUE(rough_field_in_sobolev(0.6, 1.5));
  EXPECT_FALSE(rough_field_in_sobolev(0.2, 2.0));
}

TEST(Field, CombinationsAreLinear) {
  const auto a = killing_field(Vec3::UnitZ());
  const auto b = make_field<Sphere2, SphereHeightGradient>(Vec3::UnitX());
  const auto s = sum(a, scaled(b, 2.0));
  const auto d = difference(s, s);
  for (const auto& x : sample_uniform<Sphere2>(20, 4)) {
    EXPECT_LT((s.value(x) - a.value(x) - 2.0 * b.value(x)).norm(), 1e-15);
    EXPECT_EQ(d.value(x).norm(), 0.0);
  }
}
