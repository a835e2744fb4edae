#ifndef MANISTOCH_GEODESIC_HPP
#define MANISTOCH_GEODESIC_HPP

#include <cmath>
#include <variant>
#include <vector>

#include "manistoch/atlas.hpp"

namespace manistoch {

inline constexpr double cut_locus_margin = 1e-6;

/// Unit-speed minimizing geodesic gamma : [0, length] -> M.
template <Manifold M>
class GeodesicSegment {
 public:
  using Vec = typename M::Vec;

  GeodesicSegment(Point<M> from, Point<M> to, double length, Vec unit_tangent, std::vector<Point<M>> samples)
      : from_(from), to_(to), length_(length), tangent_(std::move(unit_tangent)), samples_(std::move(samples)) {}

  const Point<M>& from() const { return from_; }
  const Point<M>& to() const { return to_; }
  double length() const { return length_; }
  const std::vector<Point<M>>& samples() const { return samples_; }
  double sample_param(std::size_t i) const {
    return samples_.size() < 2 ? 0.0 : length_ * static_cast<double>(i) / static_cast<double>(samples_.size() - 1);
  }

  Point<M> point_at(double s) const { return Point<M>(M::exp(from_.coords(), s * tangent_)); }

  /// gamma'(s) in ambient coordinates.
  Vec velocity_at(double s) const {
    if constexpr (M::kind == ManifoldKind::sphere2) {
      return -std::sin(s) * from_.coords() + std::cos(s) * tangent_;
    } else {
      (void)s;
      return tangent_;
    }
  }

  /// Checks the endpoint and unit-speed invariants.
  void validate() const {
    if (samples_.size() < 2) throw InvalidSegmentError("segment needs at least 2 samples");
    if (M::distance(samples_.front().coords(), from_.coords()) > 1e-8 ||
        M::distance(samples_.back().coords(), to_.coords()) > 1e-8 ||
        M::distance(point_at(length_).coords(), to_.coords()) > 1e-8) {
      throw InvalidSegmentError("segment endpoints do not match");
    }
    if (length_ > 0.0 && std::abs(tangent_.norm() - 1.0) > 1e-6) throw InvalidSegmentError("segment is not unit speed");
  }

 private:
  Point<M> from_;
  Point<M> to_;
  double length_;
  Vec tangent_;
  std::vector<Point<M>> samples_;
};

template <Manifold M>
GeodesicSegment<M> minimizing_geodesic(const Point<M>& x, const Point<M>& y, std::size_t n_samples = 64) {
  if (n_samples < 2) throw UsageError("minimizing_geodesic: n_samples must be >= 2");
  const double len = distance(x, y);
  if (len >= M::injectivity_bound - cut_locus_margin) {
    throw DegeneratePairError("pair on the cut locus (dis = " + std::to_string(len) + ")");
  }
  typename M::Vec u = M::log(x.coords(), y.coords());
  if (len > 0.0) {
    u /= u.norm();
  } else {
    u.setZero();
  }
  std::vector<Point<M>> samples;
  samples.reserve(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double s = len * static_cast<double>(i) / static_cast<double>(n_samples - 1);
    samples.emplace_back(M::exp(x.coords(), s * u));
  }
  samples.back() = y;
  return GeodesicSegment<M>(x, y, len, u, std::move(samples));
}

/// Parallel transport by integrating dY^k/ds + Gamma^k_ij Y^i gamma'^j = 0 in
/// charts along the segment with the classical fourth-order Runge-Kutta
/// method, one step per sample interval. Charts are switched at sample
/// points when the path approaches the boundary of the active chart.
template <Manifold M>
TangentVector<M> parallel_transport(const Atlas<M>& atlas, const TangentVector<M>& v, const GeodesicSegment<M>& seg) {
  seg.validate();
  if (M::distance(v.base.coords(), seg.from().coords()) > 1e-10) {
    throw InvalidSegmentError("vector is not based at the segment start");
  }
  if (seg.length() == 0.0) return {seg.to(), v.components};

  const auto n = seg.samples().size();
  int chart_id = atlas.best_chart(seg.from());
  const auto* chart = &atlas.chart(chart_id);
  Vec2 y = chart->push(chart->to_chart(seg.from().coords()), M::project_tangent(seg.from().coords(), v.components));

  auto rhs = [&](double s, const Vec2& yy) {
    const Vec2 xi = chart->to_chart(seg.point_at(s).coords());
    const Vec2 dxi = chart->push(xi, seg.velocity_at(s));
    const Christoffel g = chart->christoffel_at(xi);
    Vec2 out;
    for (int k = 0; k < 2; ++k) out(k) = -yy.dot(g[k] * dxi);
    return out;
  };

  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double s0 = seg.sample_param(i);
    const double s1 = seg.sample_param(i + 1);
    if (!atlas.in_safe_region(chart_id, seg.samples()[i]) || !atlas.in_safe_region(chart_id, seg.samples()[i + 1])) {
      const int next = atlas.best_chart(seg.samples()[i]);
      if (next != chart_id) {
        const Vec2 xi_old = chart->to_chart(seg.samples()[i].coords());
        const auto ambient = chart->pull(xi_old, y);
        chart_id = next;
        chart = &atlas.chart(chart_id);
        y = chart->push(chart->to_chart(seg.samples()[i].coords()), ambient);
      }
    }
    const double h = s1 - s0;
    const Vec2 k1 = rhs(s0, y);
    const Vec2 k2 = rhs(s0 + 0.5 * h, y + 0.5 * h * k1);
    const Vec2 k3 = rhs(s0 + 0.5 * h, y + 0.5 * h * k2);
    const Vec2 k4 = rhs(s1, y + h * k3);
    y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  const auto ambient = chart->pull(chart->to_chart(seg.to().coords()), y);
  return {seg.to(), M::project_tangent(seg.to().coords(), ambient)};
}

/// Closed-form transport along the minimizing geodesic.
template <Manifold M>
TangentVector<M> transport_closed_form(const TangentVector<M>& v, const Point<M>& y) {
  return {y, M::transport(v.base.coords(), y.coords(), v.components)};
}

/// Gradient of dis^2(., y) at x: -2 log_x(y).
template <Manifold M>
TangentVector<M> grad_dist_sq(const Point<M>& x, const Point<M>& y) {
  const double d = distance(x, y);
  if (d == 0.0) return {x, M::Vec::Zero()};
  if (d >= M::injectivity_bound - cut_locus_margin) throw DegeneratePairError("grad_dist_sq on the cut locus");
  return {x, -2.0 * M::log(x.coords(), y.coords())};
}

/// Geodesic flow in one chart: xi'' = -Gamma(xi)(xi', xi'), integrated over
/// unit time by RK4. Returns the end point in chart coordinates.
template <class ChartT>
Vec2 shoot_in_chart(const ChartT& chart, const Vec2& xi0, const Vec2& v0, int steps) {
  using State = Eigen::Vector4d;
  auto f = [&](const State& s) {
    const Vec2 xi = s.head<2>();
    const Vec2 v = s.tail<2>();
    const Christoffel g = chart.christoffel_at(xi);
    State out;
    out.head<2>() = v;
    for (int k = 0; k < 2; ++k) out(2 + k) = -v.dot(g[k] * v);
    return out;
  };
  State s;
  s << xi0, v0;
  const double h = 1.0 / steps;
  for (int i = 0; i < steps; ++i) {
    const State k1 = f(s);
    const State k2 = f(s + 0.5 * h * k1);
    const State k3 = f(s + 0.5 * h * k2);
    const State k4 = f(s + h * k3);
    s += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return s.head<2>();
}

/// Riemannian distance computed only from chart data (metric and
/// Christoffel symbols) by Newton shooting in a common chart. Independent
/// of the closed forms; used for cross-validation.
template <Manifold M>
double shooting_distance(const Atlas<M>& atlas, const Point<M>& x, const Point<M>& y, int steps = 128) {
  const auto id = atlas.common_chart(x, y);
  if (!id) throw UsageError("shooting_distance: points share no chart");
  const auto& chart = atlas.chart(*id);
  const Vec2 a = chart.to_chart(x.coords());
  const Vec2 b = chart.to_chart(y.coords());
  Vec2 v = b - a;
  if (v.norm() == 0.0) return 0.0;
  for (int it = 0; it < 30; ++it) {
    const Vec2 r = shoot_in_chart(chart, a, v, steps) - b;
    if (r.norm() < 1e-14) break;
    Mat2 jac;
    const double h = 1e-7 * std::max(1.0, v.norm());
    for (int j = 0; j < 2; ++j) {
      Vec2 vp = v;
      Vec2 vm = v;
      vp(j) += h;
      vm(j) -= h;
      jac.col(j) = (shoot_in_chart(chart, a, vp, steps) - shoot_in_chart(chart, a, vm, steps)) / (2.0 * h);
    }
    v -= jac.lu().solve(r);
  }
  return std::sqrt(v.dot(chart.metric_at(a) * v));
}

/// Runtime-typed point, for callers that choose the manifold at run time.
using AnyPoint = std::variant<Point<Sphere2>, Point<Torus2>>;

inline double distance(const AnyPoint& x, const AnyPoint& y) {
  if (x.index() != y.index()) throw UsageError("distance: points lie on different manifolds");
  if (x.index() == 0) return distance(std::get<0>(x), std::get<0>(y));
  return distance(std::get<1>(x), std::get<1>(y));
}

}  // namespace manistoch

#endif  // MANISTOCH_GEODESIC_HPP
