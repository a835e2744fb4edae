#ifndef MANISTOCH_MANIFOLD_HPP
#define MANISTOCH_MANIFOLD_HPP

// Built-in manifolds. Each policy stores points in an "ambient" vector
// (unit 3-vector on the sphere, angle pair on the torus) and tangent vectors
// in the same ambient coordinates, where the Riemannian metric is the
// Euclidean inner product.

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

#include "manistoch/errors.hpp"
#include "manistoch/random.hpp"

namespace manistoch {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

enum class ManifoldKind { sphere2, torus2 };

inline std::string_view to_string(ManifoldKind k) {
  return k == ManifoldKind::sphere2 ? "sphere2" : "torus2";
}

inline ManifoldKind parse_manifold(std::string_view s) {
  if (s == "sphere2" || s == "sphere" || s == "S2") return ManifoldKind::sphere2;
  if (s == "torus2" || s == "torus" || s == "T2") return ManifoldKind::torus2;
  throw UsageError("unknown manifold '" + std::string(s) + "'");
}

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

/// Reduce an angle into [0, 2pi).
inline double reduce_angle(double a) {
  double r = std::fmod(a, two_pi);
  if (r < 0.0) r += two_pi;
  if (r >= two_pi) r = 0.0;
  return r;
}

/// Wrap an angle difference into (-pi, pi].
inline double wrap_angle(double a) {
  double r = std::remainder(a, two_pi);
  if (r <= -pi) r += two_pi;
  return r;
}

/// Round unit sphere in R^3.
struct Sphere2 {
  static constexpr ManifoldKind kind = ManifoldKind::sphere2;
  static constexpr int ambient_dim = 3;
  using Vec = Vec3;
  using Mat = Mat3;
  using Jacobian = Eigen::Matrix<double, 3, 2>;
  using CoJacobian = Eigen::Matrix<double, 2, 3>;

  static constexpr double volume = 4.0 * std::numbers::pi;
  static constexpr double injectivity_bound = std::numbers::pi;
  static constexpr double diameter = std::numbers::pi;

  static Vec canonicalize(const Vec& c) {
    const double n = c.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw NumericalFailure("sphere point with zero or non-finite norm");
    return c / n;
  }

  static Mat tangent_projector(const Vec& x) { return Mat::Identity() - x * x.transpose(); }
  static Vec project_tangent(const Vec& x, const Vec& v) { return v - x.dot(v) * x; }

  static double distance(const Vec& x, const Vec& y) { return std::atan2(x.cross(y).norm(), x.dot(y)); }

  /// Monotone proxy for distance: key(x,y) < key_of_radius(r) iff dis(x,y) < r.
  static double proximity_key(const Vec& x, const Vec& y) { return -x.dot(y); }
  static double key_of_radius(double r) { return -std::cos(r); }

  /// Inverse exponential map; the caller guarantees y is not antipodal.
  static Vec log(const Vec& x, const Vec& y) {
    const Vec v = y - x.dot(y) * x;
    const double s = v.norm();
    if (s < 1e-300) return Vec::Zero();
    return distance(x, y) / s * v;
  }

  static Vec exp(const Vec& x, const Vec& v) {
    const double t = v.norm();
    if (t < 1e-300) return x;
    return canonicalize(std::cos(t) * x + std::sin(t) / t * v);
  }

  /// Transport of v in T_x along the minimizing geodesic x -> y (rotation
  /// about the great-circle normal).
  static Vec transport(const Vec& x, const Vec& y, const Vec& v) {
    const Vec axis = x.cross(y);
    const double s = axis.norm();
    if (s < 1e-300) return v;
    const Vec k = axis / s;
    const double c = x.dot(y);
    return v * c + k.cross(v) * s + k * (k.dot(v)) * (1.0 - c);
  }

  static Vec random_point(Rng& rng) {
    Vec g(rng.normal(), rng.normal(), rng.normal());
    while (g.squaredNorm() < 1e-20) g = Vec(rng.normal(), rng.normal(), rng.normal());
    return g.normalized();
  }

  /// Unit tangent at x drawn uniformly from the unit circle of T_x.
  static Vec random_unit_tangent(const Vec& x, Rng& rng) {
    Vec g;
    do {
      g = project_tangent(x, Vec(rng.normal(), rng.normal(), rng.normal()));
    } while (g.squaredNorm() < 1e-20);
    return g.normalized();
  }

  /// Polar angle in [0, pi].
  static double polar_angle(const Vec& x) { return std::atan2(std::hypot(x.x(), x.y()), x.z()); }
};

/// Flat torus [0, 2pi)^2.
struct Torus2 {
  static constexpr ManifoldKind kind = ManifoldKind::torus2;
  static constexpr int ambient_dim = 2;
  using Vec = Vec2;
  using Mat = Mat2;
  using Jacobian = Mat2;
  using CoJacobian = Mat2;

  static constexpr double volume = 4.0 * std::numbers::pi * std::numbers::pi;
  static constexpr double injectivity_bound = std::numbers::pi;
  static constexpr double diameter = std::numbers::pi * std::numbers::sqrt2;

  static Vec canonicalize(const Vec& c) {
    if (!c.allFinite()) throw NumericalFailure("non-finite torus angles");
    return Vec(reduce_angle(c.x()), reduce_angle(c.y()));
  }

  static Mat tangent_projector(const Vec&) { return Mat::Identity(); }
  static Vec project_tangent(const Vec&, const Vec& v) { return v; }

  static Vec difference(const Vec& x, const Vec& y) { return Vec(wrap_angle(y.x() - x.x()), wrap_angle(y.y() - x.y())); }
  static double distance(const Vec& x, const Vec& y) { return difference(x, y).norm(); }
  static double proximity_key(const Vec& x, const Vec& y) { return difference(x, y).squaredNorm(); }
  static double key_of_radius(double r) { return r * r; }

  static Vec log(const Vec& x, const Vec& y) { return difference(x, y); }
  static Vec exp(const Vec& x, const Vec& v) { return canonicalize(x + v); }
  static Vec transport(const Vec&, const Vec&, const Vec& v) { return v; }

  static Vec random_point(Rng& rng) { return Vec(two_pi * (1.0 - rng.uniform()), two_pi * (1.0 - rng.uniform())); }

  static Vec random_unit_tangent(const Vec&, Rng& rng) {
    const double a = two_pi * rng.uniform();
    return Vec(std::cos(a), std::sin(a));
  }
};

template <class M>
concept Manifold = requires {
  M::kind;
  M::ambient_dim;
  typename M::Vec;
};

/// Point on M in canonical coordinates. Sphere points are renormalized and
/// torus angles reduced on construction.
template <Manifold M>
class Point {
 public:
  using Vec = typename M::Vec;

  Point() : coords_(Vec::Zero()) {
    if constexpr (M::kind == ManifoldKind::sphere2) coords_.z() = 1.0;
  }
  explicit Point(const Vec& c) : coords_(M::canonicalize(c)) {}

  const Vec& coords() const { return coords_; }
  static constexpr ManifoldKind manifold() { return M::kind; }

 private:
  Vec coords_;
};

template <Manifold M>
struct TangentVector {
  Point<M> base;
  typename M::Vec components;

  /// Riemannian length |X|_x.
  double norm() const { return components.norm(); }
};

template <Manifold M>
inline double distance(const Point<M>& x, const Point<M>& y) {
  return M::distance(x.coords(), y.coords());
}

inline Point<Sphere2> sphere_point(double x, double y, double z) { return Point<Sphere2>(Vec3(x, y, z)); }
inline Point<Torus2> torus_point(double a, double b) { return Point<Torus2>(Vec2(a, b)); }

}  // namespace manistoch

#endif  // MANISTOCH_MANIFOLD_HPP
