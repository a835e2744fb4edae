#include <gtest/gtest.h>

#include <cmath>

#include "manistoch.hpp"

using namespace manistoch;

TEST(Stats, MeanAndStandardError) {
  const std::vector<double> x{1, 2, 3, 4};
  const auto e = mean_se(x);
  EXPECT_DOUBLE_EQ(e.value, 2.5);
  EXPECT_NEAR(e.se, std::sqrt((2.25 + 0.25 + 0.25 + 2.25) / 3.0 / 4.0), 1e-15);
  EXPECT_THROW(mean_se(std::vector<double>{}), UsageError);
}

TEST(Stats, PercentileInterpolates) {
  const std::vector<double> x{4, 1, 3, 2};
  EXPECT_DOUBLE_EQ(percentile(x, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(percentile(x, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(percentile(x, 0.5), 2.5);
}

TEST(Stats, LineFitRecoversExactLine) {
  const std::vector<double> x{0, 1, 2, 3};
  const std::vector<double> y{1, 3, 5, 7};
  const auto f = fit_line(x, y);
  EXPECT_NEAR(f.intercept, 1.0, 1e-14);
  EXPECT_NEAR(f.slope, 2.0, 1e-14);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-14);
}

TEST(Stats, LogLogSlope) {
  const std::vector<double> x{1, 2, 4, 8};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 / std::sqrt(v));
  EXPECT_NEAR(fit_loglog(x, y).slope, -0.5, 1e-14);
}

TEST(Stats, DominatingLineDominatesAndIsTight) {
  const std::vector<double> x{0.2, 0.6, 2.0, 6.0};
  const std::vector<double> y{0.01, 0.05, 0.2, 0.61};
  const auto e = dominating_line(x, y);
  EXPECT_GE(e.intercept, 0.0);
  EXPECT_GE(e.slope, 0.0);
  int touching = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_GE(e(x[i]), y[i] - 1e-15);
    touching += std::abs(e(x[i]) - y[i]) < 1e-12;
  }
  EXPECT_GE(touching, 1);
}

TEST(Stats, DominatingLineThroughOrigin) {
  const std::vector<double> x{1, 2, 3};
  const std::vector<double> y{0.5, 1.0, 1.5};
  const auto e = dominating_line(x, y);
  EXPECT_NEAR(e.intercept, 0.0, 1e-14);
  EXPECT_NEAR(e.slope, 0.5, 1e-14);
}
