#include <gtest/gtest.h>

#include <cmath>

#include "manistoch.hpp"

using namespace manistoch;

namespace {

struct Cloud {
  std::vector<Point<Sphere2>> pts = sample_uniform<Sphere2>(20000, 1);
  ScalarFieldSamples<Sphere2> of(const std::function<double(const Point<Sphere2>&)>& f) const {
    return tabulate<Sphere2>(pts, f);
  }
};

double height(const Point<Sphere2>& p) { return 1.0 + p.coords().z(); }
double cap(const Point<Sphere2>& p) { return distance(p, sphere_point(0, 0, 1)) < 0.5 ? 1.0 : 0.0; }

}  // namespace

TEST(Maximal, ConstantIsFixed) {
  Cloud c;
  const auto f = c.of([](const Point<Sphere2>&) { return 0.7; });
  for (const auto& x : sample_uniform<Sphere2>(50, 2)) EXPECT_NEAR(maximal_function(f, x, 0.5), 0.7, 1e-12);
}

TEST(Maximal, InvariantsHoldExactly) {
  Cloud c;
  const auto f = c.of(height);
  const auto g = c.of(cap);
  const auto fg = c.of([](const Point<Sphere2>& p) { return height(p) + cap(p); });
  const RadiusGrid grid{0.5, 16};
  for (const auto& x : sample_uniform<Sphere2>(100, 3)) {
    const double mf = maximal_function(f, x, 0.5, grid);
    const double mg = maximal_function(g, x, 0.5, grid);
    EXPECT_LE(maximal_function(fg, x, 0.5, grid), mf + mg);
    EXPECT_GE(mf, height(x) - 0.5);  // ball averages of a 1-Lipschitz function
    EXPECT_LE(maximal_function(f, x, 0.25, grid), mf);
    EXPECT_GE(maximal_function(fg, x, 0.5, grid), mf);
  }
}

TEST(Maximal, DominatesBallAverage) {
  Cloud c;
  const auto f = c.of(height);
  const RadiusGrid grid{0.5, 16};
  const auto x = sphere_point(0.6, 0, 0.8);
  const auto avg = ball_averages(f, x, grid);
  const double m = maximal_function(f, x, 0.5, grid);
  for (int j = 0; j < grid.levels; ++j) {
    if (!std::isnan(avg[static_cast<std::size_t>(j)])) EXPECT_LE(avg[static_cast<std::size_t>(j)], m);
  }
}

TEST(Maximal, EmptyBallsReported) {
  ScalarFieldSamples<Sphere2> one{{sphere_point(0, 0, 1)}, {1.0}};
  EXPECT_THROW(maximal_function(one, sphere_point(0, 0, -1), 0.5), InsufficientSamplesError);
}

TEST(Maximal, LpRatioOfConstantIsOne) {
  const std::vector<TestFunction<Sphere2>> fam{{"one", [](const Point<Sphere2>&) { return 1.0; }}};
  const auto rep = verify_lp_bound(fam, 1.5, 0.5, 5000, 200, 4);
  EXPECT_NEAR(rep.max_ratio, 1.0, 1e-12);
}

TEST(Maximal, LipschitzConstantForSmoothFunction) {
  const GradedFunction<Sphere2> u{"polar", [](const Point<Sphere2>& p) { return Sphere2::polar_angle(p.coords()); },
                                  [](const Point<Sphere2>&) { return 1.0; }};
  const auto rep = verify_lipschitz_estimate(u, make_default_atlas<Sphere2>(), 500, 5000, 5);
  // |grad u| = 1: K = |u(x) - u(y)| / (2 dis) <= 1/2.
  EXPECT_LE(rep.max_k, 0.5 + 1e-9);
}
