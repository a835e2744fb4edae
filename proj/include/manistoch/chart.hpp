#ifndef MANISTOCH_CHART_HPP
#define MANISTOCH_CHART_HPP

#include <array>

#include "manistoch/manifold.hpp"

namespace manistoch {

/// Christoffel symbols in one chart: gamma[k](i, j) = Gamma^k_ij.
using Christoffel = std::array<Mat2, 2>;

/// Scaled stereographic chart on a geodesic cap of S^2.
///
/// Projection from the antipode of `center` with frame (e1, e2, center):
///   xi = s * (<p,e1>, <p,e2>) / (1 + <p,center>)
/// The metric is conformal, g = 4 / (s^2 w^2) I with w = 1 + |xi|^2 / s^2.
/// The scale s = 2 cos(radius / 2) makes the conformal factor range over
/// [cos^2(radius/2), 1/cos^2(radius/2)] on the cap, symmetric about 1.
class SphereChart {
 public:
  using M = Sphere2;

  SphereChart(int id, const Vec3& center, const Vec3& e1, double radius)
      : id_(id), center_(center.normalized()), radius_(radius), scale_(2.0 * std::cos(radius / 2.0)) {
    e1_ = Sphere2::project_tangent(center_, e1).normalized();
    e2_ = center_.cross(e1_);
  }

  int id() const { return id_; }
  Point<Sphere2> center() const { return Point<Sphere2>(center_); }
  const Vec3& center_coords() const { return center_; }
  double radius() const { return radius_; }
  double scale() const { return scale_; }

  bool contains(const Vec3& p) const { return Sphere2::distance(p, center_) < radius_; }

  Vec2 to_chart(const Vec3& p) const {
    const double d = 1.0 + p.dot(center_);
    return scale_ / d * Vec2(p.dot(e1_), p.dot(e2_));
  }

  Vec3 from_chart(const Vec2& xi) const {
    const Vec2 u = xi / scale_;
    const double uu = u.squaredNorm();
    const double w = 1.0 + uu;
    return ((2.0 * u.x() / w) * e1_ + (2.0 * u.y() / w) * e2_ + ((1.0 - uu) / w) * center_).normalized();
  }

  /// Columns are the coordinate vectors d/dxi^k in ambient coordinates.
  Sphere2::Jacobian basis(const Vec2& xi) const {
    const Vec2 u = xi / scale_;
    const double w = 1.0 + u.squaredNorm();
    const Vec3 radial = u.x() * e1_ + u.y() * e2_ + center_;
    Sphere2::Jacobian b;
    b.col(0) = ((2.0 / w) * e1_ - (4.0 * u.x() / (w * w)) * radial) / scale_;
    b.col(1) = ((2.0 / w) * e2_ - (4.0 * u.y() / (w * w)) * radial) / scale_;
    return b;
  }

  /// Differential of the chart map restricted to tangent vectors.
  Sphere2::CoJacobian cobasis(const Vec2& xi) const { return basis(xi).transpose() / conformal_factor(xi); }

  Vec2 push(const Vec2& xi, const Vec3& v) const { return cobasis(xi) * v; }
  Vec3 pull(const Vec2& xi, const Vec2& c) const { return basis(xi) * c; }

  double conformal_factor(const Vec2& xi) const {
    const double w = 1.0 + xi.squaredNorm() / (scale_ * scale_);
    return 4.0 / (scale_ * scale_ * w * w);
  }

  Mat2 metric_at(const Vec2& xi) const { return conformal_factor(xi) * Mat2::Identity(); }

  Christoffel christoffel_at(const Vec2& xi) const {
    // g = e^{2 sigma} I: Gamma^k_ij = d^k_i sigma_j + d^k_j sigma_i - d_ij sigma_k.
    const double w = 1.0 + xi.squaredNorm() / (scale_ * scale_);
    const Vec2 dsigma = -2.0 * xi / (scale_ * scale_ * w);
    Christoffel g;
    for (int k = 0; k < 2; ++k) {
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          g[k](i, j) = (k == i ? dsigma(j) : 0.0) + (k == j ? dsigma(i) : 0.0) - (i == j ? dsigma(k) : 0.0);
        }
      }
    }
    return g;
  }

 private:
  int id_;
  Vec3 center_;
  Vec3 e1_;
  Vec3 e2_;
  double radius_;
  double scale_;
};

/// Identity chart on the translated fundamental square around `center`:
/// xi = center + wrap(theta - center).
class TorusChart {
 public:
  using M = Torus2;

  TorusChart(int id, const Vec2& center, double radius)
      : id_(id), center_(Torus2::canonicalize(center)), radius_(radius) {}

  int id() const { return id_; }
  Point<Torus2> center() const { return Point<Torus2>(center_); }
  const Vec2& center_coords() const { return center_; }
  double radius() const { return radius_; }

  bool contains(const Vec2& p) const { return Torus2::distance(p, center_) < radius_; }

  Vec2 to_chart(const Vec2& p) const { return center_ + Torus2::difference(center_, p); }
  Vec2 from_chart(const Vec2& xi) const { return Torus2::canonicalize(xi); }

  Mat2 basis(const Vec2&) const { return Mat2::Identity(); }
  Mat2 cobasis(const Vec2&) const { return Mat2::Identity(); }
  Vec2 push(const Vec2&, const Vec2& v) const { return v; }
  Vec2 pull(const Vec2&, const Vec2& c) const { return c; }
  double conformal_factor(const Vec2&) const { return 1.0; }
  Mat2 metric_at(const Vec2&) const { return Mat2::Identity(); }
  Christoffel christoffel_at(const Vec2&) const { return {Mat2::Zero(), Mat2::Zero()}; }

 private:
  int id_;
  Vec2 center_;
  double radius_;
};

template <Manifold M>
struct ChartFor;
template <>
struct ChartFor<Sphere2> {
  using type = SphereChart;
};
template <>
struct ChartFor<Torus2> {
  using type = TorusChart;
};
template <Manifold M>
using Chart = typename ChartFor<M>::type;

}  // namespace manistoch

#endif  // MANISTOCH_CHART_HPP
