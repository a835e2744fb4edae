#ifndef MANISTOCH_STATS_HPP
#define MANISTOCH_STATS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "manistoch/errors.hpp"

namespace manistoch {

struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

/// Sample mean and its standard error.
inline Estimate mean_se(std::span<const double> xs) {
  if (xs.empty()) throw UsageError("mean_se: empty sample");
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

/// Linear interpolation percentile, q in [0, 1].
inline double percentile(std::vector<double> xs, double q) {
  if (xs.empty()) throw UsageError("percentile: empty sample");
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r_squared = 0.0;
  double max_abs_residual = 0.0;
};

/// Ordinary least squares y ~ a + b x.
inline LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw UsageError("fit_line: need >= 2 paired points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw UsageError("fit_line: degenerate abscissae");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ss_res += r * r;
    f.max_abs_residual = std::max(f.max_abs_residual, std::abs(r));
  }
  f.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : (ss_res == 0.0 ? 1.0 : 0.0);
  return f;
}

/// Slope of log y against log x.
inline LinearFit fit_loglog(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return fit_line(lx, ly);
}

struct Envelope {
  double intercept = 0.0;
  double slope = 0.0;

  double operator()(double x) const { return intercept + slope * x; }
};

/// Line a + b x with a, b >= 0 and a + b x_i >= y_i for all i, minimizing
/// the total gap sum(a + b x_i - y_i). x must be nonnegative.
inline Envelope dominating_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty()) throw UsageError("dominating_line: need paired points");
  std::vector<Envelope> cand;
  double ymax = 0.0;
  for (double v : y) ymax = std::max(ymax, v);
  cand.push_back({ymax, 0.0});
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0) cand.push_back({0.0, std::max(0.0, y[i]) / x[i]});
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      if (x[i] == x[j]) continue;
      const double b = (y[j] - y[i]) / (x[j] - x[i]);
      const double a = y[i] - b * x[i];
      if (a >= 0.0 && b >= 0.0) cand.push_back({a, b});
    }
  }
  Envelope best{ymax, 0.0};
  double best_gap = std::numeric_limits<double>::infinity();
  for (const auto& e : cand) {
    double gap = 0.0;
    bool ok = true;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = e(x[i]) - y[i];
      if (r < -1e-12 * std::max(1.0, std::abs(y[i]))) ok = false;
      gap += r;
    }
    if (ok && gap < best_gap) {
      best_gap = gap;
      best = e;
    }
  }
  return best;
}

}  // namespace manistoch

#endif  // MANISTOCH_STATS_HPP
