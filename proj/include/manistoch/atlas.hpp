#ifndef MANISTOCH_ATLAS_HPP
#define MANISTOCH_ATLAS_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "manistoch/chart.hpp"
#include "manistoch/sampling.hpp"

namespace manistoch {

inline constexpr int max_charts = 8;

/// Partition-of-unity values at a point. Only charts with psi > 0 appear.
template <Manifold M>
struct PartitionWeights {
  std::array<int, max_charts> ids{};
  std::array<double, max_charts> weights{};
  std::array<typename M::Vec, max_charts> gradients{};  // filled by partition_jet only
  int count = 0;
};

/// Finite atlas with declared covering constants.
///
/// `lambda` bounds the chart metric and the chart bi-Lipschitz distortion;
/// every pair with dis < rho lies in a common chart. The partition of unity
/// uses psi_a ~ b(dis(x, c_a) / r_a) with b(t) = exp(-sharpness / (1 - t^2)).
template <Manifold M>
class Atlas {
 public:
  using ChartType = Chart<M>;

  Atlas(std::vector<ChartType> charts, double lambda, double rho, double bump_sharpness = 1.0,
        double safe_fraction = 0.8)
      : charts_(std::move(charts)),
        lambda_(lambda),
        rho_(rho),
        bump_sharpness_(bump_sharpness),
        safe_fraction_(safe_fraction) {
    if (charts_.empty() || charts_.size() > max_charts) throw UsageError("atlas needs 1..8 charts");
    if (!(lambda_ > 0.0 && lambda_ <= 1.0)) throw UsageError("atlas lambda must lie in (0, 1]");
    if (!(rho_ > 0.0)) throw UsageError("atlas rho must be positive");
    for (std::size_t i = 0; i < charts_.size(); ++i) {
      if (charts_[i].id() != static_cast<int>(i)) throw UsageError("chart ids must be 0..n-1 in order");
    }
  }

  const std::vector<ChartType>& charts() const { return charts_; }
  const ChartType& chart(int id) const { return charts_[static_cast<std::size_t>(id)]; }
  int size() const { return static_cast<int>(charts_.size()); }
  double lambda() const { return lambda_; }
  double rho() const { return rho_; }
  double bump_sharpness() const { return bump_sharpness_; }
  double safe_fraction() const { return safe_fraction_; }

  Atlas with_lambda(double lambda) const { return Atlas(charts_, lambda, rho_, bump_sharpness_, safe_fraction_); }

  double bump(double t) const {
    if (t >= 1.0) return 0.0;
    return std::exp(-bump_sharpness_ / (1.0 - t * t));
  }

  PartitionWeights<M> partition_weights(const Point<M>& x) const { return partition(x, false); }

  /// Weights together with their Riemannian gradients.
  PartitionWeights<M> partition_jet(const Point<M>& x) const { return partition(x, true); }

  /// Chart of maximal partition weight (the chart used after a re-chart).
  int best_chart(const Point<M>& x) const {
    int best = -1;
    double best_t = std::numeric_limits<double>::infinity();
    for (const auto& c : charts_) {
      const double t = M::distance(x.coords(), c.center_coords()) / c.radius();
      if (t < best_t) {
        best_t = t;
        best = c.id();
      }
    }
    if (best_t >= 1.0) throw IntegratorFailure("point outside every chart domain");
    return best;
  }

  /// True while x is well inside chart `id` (no re-chart needed).
  bool in_safe_region(int id, const Point<M>& x) const {
    const auto& c = chart(id);
    return M::distance(x.coords(), c.center_coords()) < safe_fraction_ * c.radius();
  }

  /// Chart containing both points with the largest margin, if any.
  std::optional<int> common_chart(const Point<M>& x, const Point<M>& y) const {
    std::optional<int> best;
    double best_margin = 0.0;
    for (const auto& c : charts_) {
      const double m = c.radius() - std::max(M::distance(x.coords(), c.center_coords()),
                                             M::distance(y.coords(), c.center_coords()));
      if (m > best_margin) {
        best_margin = m;
        best = c.id();
      }
    }
    return best;
  }

 private:
  PartitionWeights<M> partition(const Point<M>& x, bool with_gradient) const {
    PartitionWeights<M> w;
    double total = 0.0;
    typename M::Vec grad_total = M::Vec::Zero();
    for (const auto& c : charts_) {
      const double d = M::distance(x.coords(), c.center_coords());
      const double t = d / c.radius();
      if (t >= 1.0) continue;
      const double b = bump(t);
      if (b <= 0.0) continue;
      const int slot = w.count++;
      w.ids[slot] = c.id();
      w.weights[slot] = b;
      total += b;
      if (with_gradient) {
        // grad b = b'(t) / r * grad dis(., c); grad dis = -log_x(c) / dis.
        typename M::Vec g = M::Vec::Zero();
        if (d > 1e-300) {
          const double db = b * (-bump_sharpness_ * 2.0 * t / ((1.0 - t * t) * (1.0 - t * t)));
          g = -(db / c.radius() / d) * M::log(x.coords(), c.center_coords());
        }
        w.gradients[slot] = g;
        grad_total += g;
      }
    }
    if (w.count == 0 || !(total > 0.0)) throw IntegratorFailure("point not covered by the atlas");
    for (int i = 0; i < w.count; ++i) {
      const double b = w.weights[i];
      w.weights[i] = b / total;
      if (with_gradient) w.gradients[i] = (w.gradients[i] * total - b * grad_total) / (total * total);
    }
    return w;
  }

  std::vector<ChartType> charts_;
  double lambda_;
  double rho_;
  double bump_sharpness_;
  double safe_fraction_;
};

struct AtlasParams {
  double radius = 0.0;  // 0 = manifold default
  double lambda = 0.0;
  double rho = 0.0;
  double bump_sharpness = 1.0;
  double safe_fraction = 0.8;
};

/// Six stereographic caps of radius 1.2 around +-e_i; lambda = 0.5, rho = 0.5.
inline Atlas<Sphere2> make_sphere_atlas(AtlasParams p = {}) {
  const double r = p.radius > 0.0 ? p.radius : 1.2;
  std::vector<SphereChart> charts;
  const std::array<Vec3, 3> axes{Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
  int id = 0;
  for (int a = 0; a < 3; ++a) {
    for (double sign : {1.0, -1.0}) {
      const Vec3 c = sign * axes[a];
      const Vec3 e1 = axes[(a + 1) % 3];
      charts.emplace_back(id++, c, e1, r);
    }
  }
  return Atlas<Sphere2>(std::move(charts), p.lambda > 0.0 ? p.lambda : 0.5, p.rho > 0.0 ? p.rho : 0.5,
                        p.bump_sharpness, p.safe_fraction);
}

/// Four translated fundamental squares with identity charts; the chart
/// domains are geodesic discs of radius 2.8 (inside the squares).
inline Atlas<Torus2> make_torus_atlas(AtlasParams p = {}) {
  const double r = p.radius > 0.0 ? p.radius : 2.8;
  std::vector<TorusChart> charts;
  int id = 0;
  for (double b : {0.0, pi}) {
    for (double a : {0.0, pi}) charts.emplace_back(id++, Vec2(a, b), r);
  }
  return Atlas<Torus2>(std::move(charts), p.lambda > 0.0 ? p.lambda : 1.0, p.rho > 0.0 ? p.rho : 0.5,
                       p.bump_sharpness, p.safe_fraction);
}

template <Manifold M>
Atlas<M> make_default_atlas(AtlasParams p = {}) {
  if constexpr (M::kind == ManifoldKind::sphere2) {
    return make_sphere_atlas(p);
  } else {
    return make_torus_atlas(p);
  }
}

struct CertificationReport {
  bool passed = false;
  std::size_t n_pairs = 0;
  std::size_t pairs_without_common_chart = 0;
  std::size_t bilipschitz_violations = 0;
  std::size_t metric_violations = 0;
  double declared_lambda = 0.0;
  double empirical_lambda = 1.0;  // tightest lambda consistent with all samples
  std::vector<std::string> witnesses;
};

/// Empirical check of the covering constants: pairs with dis < rho share a
/// chart, lambda |phi(x)-phi(y)| <= dis(x,y) <= |phi(x)-phi(y)| / lambda in
/// every common chart, and lambda I <= g <= I / lambda at both points.
template <Manifold M>
CertificationReport certify_atlas(const Atlas<M>& atlas, std::size_t n_pairs, std::uint64_t seed,
                                  std::size_t max_witnesses = 16) {
  if (n_pairs < 1) throw UsageError("certify_atlas: n_pairs must be >= 1");
  CertificationReport rep;
  rep.n_pairs = n_pairs;
  rep.declared_lambda = atlas.lambda();
  const double lam = atlas.lambda();
  Rng rng(seed, 0xce27ULL);
  auto witness = [&](const std::string& s) {
    if (rep.witnesses.size() < max_witnesses) rep.witnesses.push_back(s);
  };
  auto describe = [](const Point<M>& p) {
    std::ostringstream os;
    os.precision(6);
    os << "(" << p.coords().transpose() << ")";
    return os.str();
  };
  for (std::size_t i = 0; i < n_pairs; ++i) {
    auto [x, y] = random_close_pair<M>(atlas.rho(), rng);
    const double d = distance(x, y);
    bool any_common = false;
    for (const auto& c : atlas.charts()) {
      if (!c.contains(x.coords()) || !c.contains(y.coords())) continue;
      any_common = true;
      const Vec2 xi = c.to_chart(x.coords());
      const Vec2 eta = c.to_chart(y.coords());
      for (const Vec2& z : {xi, eta}) {
        Eigen::SelfAdjointEigenSolver<Mat2> es(c.metric_at(z));
        const double lo = es.eigenvalues()(0);
        const double hi = es.eigenvalues()(1);
        rep.empirical_lambda = std::min({rep.empirical_lambda, lo, 1.0 / hi});
        if (lo < lam || hi > 1.0 / lam) {
          ++rep.metric_violations;
          witness("metric eigenvalues [" + std::to_string(lo) + ", " + std::to_string(hi) + "] in chart " +
                  std::to_string(c.id()));
        }
      }
      const double e = (xi - eta).norm();
      if (d > 0.0 && e > 0.0) {
        rep.empirical_lambda = std::min({rep.empirical_lambda, d / e, e / d});
        if (lam * e > d * (1.0 + 1e-12) + 1e-15 || d > e / lam * (1.0 + 1e-12) + 1e-15) {
          ++rep.bilipschitz_violations;
          witness("bi-Lipschitz: dis=" + std::to_string(d) + " chart=" + std::to_string(e) + " x=" + describe(x) +
                  " y=" + describe(y) + " chart " + std::to_string(c.id()));
        }
      }
    }
    if (!any_common) {
      ++rep.pairs_without_common_chart;
      witness("no common chart for x=" + describe(x) + " y=" + describe(y));
    }
  }
  rep.passed = rep.pairs_without_common_chart == 0 && rep.bilipschitz_violations == 0 && rep.metric_violations == 0;
  return rep;
}

}  // namespace manistoch

#endif  // MANISTOCH_ATLAS_HPP
