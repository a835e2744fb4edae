#ifndef MANISTOCH_FIELD_HPP
#define MANISTOCH_FIELD_HPP

// Vector fields on the built-in manifolds. Values and covariant derivatives
// are expressed in ambient coordinates: for a tangent vector v at x,
// nabla_v X = jet.nabla * v, and jet.nabla maps T_x M into T_x M.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "manistoch/atlas.hpp"

namespace manistoch {

enum class FieldKind { analytic, chart_components, rough_sobolev, mollified, combination };

template <Manifold M>
struct FieldJet {
  typename M::Vec value;
  typename M::Mat nabla;

  double divergence() const { return nabla.trace(); }
  /// |nabla X|_x, Frobenius norm in an orthonormal frame.
  double nabla_norm() const { return nabla.norm(); }
  /// |X|_1(x) = |X|_x + |nabla X|_x.
  double first_order_norm() const { return value.norm() + nabla_norm(); }
};

template <Manifold M>
struct ValueDiv {
  typename M::Vec value;
  double divergence;
};

template <Manifold M>
class FieldImpl {
 public:
  using Vec = typename M::Vec;
  virtual ~FieldImpl() = default;
  virtual FieldKind kind() const = 0;
  virtual std::string name() const = 0;
  virtual Vec value(const Point<M>& x) const = 0;
  /// Throws SingularPointError on the singular set.
  virtual FieldJet<M> jet(const Point<M>& x) const = 0;
  virtual ValueDiv<M> value_div(const Point<M>& x) const {
    const auto j = jet(x);
    return {j.value, j.divergence()};
  }
  virtual bool singular_at(const Point<M>&) const { return false; }
  /// Hoelder exponent of the rough family, if this is one.
  virtual std::optional<double> roughness_exponent() const { return std::nullopt; }
};

/// Immutable handle to a vector field.
template <Manifold M>
class VectorField {
 public:
  using Vec = typename M::Vec;

  VectorField() = default;
  explicit VectorField(std::shared_ptr<const FieldImpl<M>> impl) : impl_(std::move(impl)) {}

  bool valid() const { return static_cast<bool>(impl_); }
  FieldKind kind() const { return impl_->kind(); }
  std::string name() const { return impl_->name(); }
  const FieldImpl<M>& impl() const { return *impl_; }
  std::shared_ptr<const FieldImpl<M>> shared() const { return impl_; }

  TangentVector<M> eval(const Point<M>& x) const { return {x, impl_->value(x)}; }
  Vec value(const Point<M>& x) const { return impl_->value(x); }
  FieldJet<M> jet(const Point<M>& x) const { return impl_->jet(x); }
  ValueDiv<M> value_div(const Point<M>& x) const { return impl_->value_div(x); }
  bool singular_at(const Point<M>& x) const { return impl_->singular_at(x); }
  std::optional<double> roughness_exponent() const { return impl_->roughness_exponent(); }

  double divergence(const Point<M>& x) const { return value_div(x).divergence; }
  double covariant_derivative_norm(const Point<M>& x) const { return jet(x).nabla_norm(); }

 private:
  std::shared_ptr<const FieldImpl<M>> impl_;
};

template <Manifold M, class Impl, class... Args>
VectorField<M> make_field(Args&&... args) {
  return VectorField<M>(std::make_shared<const Impl>(std::forward<Args>(args)...));
}

// ---------------------------------------------------------------------------
// Generic fields

template <Manifold M>
class ZeroField final : public FieldImpl<M> {
 public:
  FieldKind kind() const override { return FieldKind::analytic; }
  std::string name() const override { return "zero"; }
  typename M::Vec value(const Point<M>&) const override { return M::Vec::Zero(); }
  FieldJet<M> jet(const Point<M>&) const override { return {M::Vec::Zero(), M::Mat::Zero()}; }
};

/// Closed-form field given by an ambient evaluator F and its ambient
/// Jacobian DF. On the sphere nabla X = P DF P with P the tangent projector.
template <Manifold M>
class AnalyticField final : public FieldImpl<M> {
 public:
  using Vec = typename M::Vec;
  using Mat = typename M::Mat;

  AnalyticField(std::string name, std::function<Vec(const Vec&)> f, std::function<Mat(const Vec&)> df)
      : name_(std::move(name)), f_(std::move(f)), df_(std::move(df)) {}

  FieldKind kind() const override { return FieldKind::analytic; }
  std::string name() const override { return name_; }
  Vec value(const Point<M>& x) const override { return M::project_tangent(x.coords(), f_(x.coords())); }
  FieldJet<M> jet(const Point<M>& x) const override {
    const Mat p = M::tangent_projector(x.coords());
    return {value(x), p * df_(x.coords()) * p};
  }

 private:
  std::string name_;
  std::function<Vec(const Vec&)> f_;
  std::function<Mat(const Vec&)> df_;
};

/// sum_i c_i X_i
template <Manifold M>
class CombinationField final : public FieldImpl<M> {
 public:
  CombinationField(std::vector<std::pair<double, VectorField<M>>> terms) : terms_(std::move(terms)) {}

  FieldKind kind() const override { return FieldKind::combination; }
  std::string name() const override {
    std::string s;
    for (const auto& [c, f] : terms_) {
      if (!s.empty()) s += " + ";
      s += std::to_string(c) + "*" + f.name();
    }
    return s;
  }
  typename M::Vec value(const Point<M>& x) const override {
    typename M::Vec v = M::Vec::Zero();
    for (const auto& [c, f] : terms_) v += c * f.value(x);
    return v;
  }
  FieldJet<M> jet(const Point<M>& x) const override {
    FieldJet<M> out{M::Vec::Zero(), M::Mat::Zero()};
    for (const auto& [c, f] : terms_) {
      const auto j = f.jet(x);
      out.value += c * j.value;
      out.nabla += c * j.nabla;
    }
    return out;
  }
  ValueDiv<M> value_div(const Point<M>& x) const override {
    ValueDiv<M> out{M::Vec::Zero(), 0.0};
    for (const auto& [c, f] : terms_) {
      const auto j = f.value_div(x);
      out.value += c * j.value;
      out.divergence += c * j.divergence;
    }
    return out;
  }
  bool singular_at(const Point<M>& x) const override {
    for (const auto& t : terms_) {
      if (t.second.singular_at(x)) return true;
    }
    return false;
  }

 private:
  std::vector<std::pair<double, VectorField<M>>> terms_;
};

template <Manifold M>
VectorField<M> zero_field() {
  return make_field<M, ZeroField<M>>();
}

template <Manifold M>
VectorField<M> scaled(const VectorField<M>& f, double c) {
  return make_field<M, CombinationField<M>>(std::vector<std::pair<double, VectorField<M>>>{{c, f}});
}

template <Manifold M>
VectorField<M> difference(const VectorField<M>& a, const VectorField<M>& b) {
  return make_field<M, CombinationField<M>>(std::vector<std::pair<double, VectorField<M>>>{{1.0, a}, {-1.0, b}});
}

template <Manifold M>
VectorField<M> sum(const VectorField<M>& a, const VectorField<M>& b) {
  return make_field<M, CombinationField<M>>(std::vector<std::pair<double, VectorField<M>>>{{1.0, a}, {1.0, b}});
}

/// Field specified by its components in each chart. Evaluated through the
/// chart of maximal partition weight; derivatives by central differences in
/// that chart, combined with the Christoffel symbols.
template <Manifold M>
class ChartComponentsField final : public FieldImpl<M> {
 public:
  using Components = std::function<Vec2(int chart_id, const Vec2& xi)>;

  ChartComponentsField(std::string name, Atlas<M> atlas, Components comps, double fd_step = 1e-5)
      : name_(std::move(name)), atlas_(std::move(atlas)), comps_(std::move(comps)), h_(fd_step) {}

  FieldKind kind() const override { return FieldKind::chart_components; }
  std::string name() const override { return name_; }

  typename M::Vec value(const Point<M>& x) const override {
    const auto& c = atlas_.chart(atlas_.best_chart(x));
    const Vec2 xi = c.to_chart(x.coords());
    return c.pull(xi, comps_(c.id(), xi));
  }

  FieldJet<M> jet(const Point<M>& x) const override {
    const auto& c = atlas_.chart(atlas_.best_chart(x));
    const Vec2 xi = c.to_chart(x.coords());
    const Vec2 y = comps_(c.id(), xi);
    Mat2 dy;  // dy(k, i) = d_i Y^k
    for (int i = 0; i < 2; ++i) {
      Vec2 e = Vec2::Zero();
      e(i) = h_;
      dy.col(i) = (comps_(c.id(), xi + e) - comps_(c.id(), xi - e)) / (2.0 * h_);
    }
    const Christoffel g = c.christoffel_at(xi);
    Mat2 cov = dy;  // cov(k, i) = d_i Y^k + Y^j Gamma^k_ji
    for (int k = 0; k < 2; ++k) cov.row(k) += (g[k].transpose() * y).transpose();
    return {c.pull(xi, y), c.basis(xi) * cov * c.cobasis(xi)};
  }

  const Atlas<M>& atlas() const { return atlas_; }

 private:
  std::string name_;
  Atlas<M> atlas_;
  Components comps_;
  double h_;
};

/// Divergence of X at x by the chart formula d_k X^k + X^k Gamma^i_ki,
/// with the chart components of X differentiated numerically.
template <Manifold M>
double chart_divergence(const Atlas<M>& atlas, const VectorField<M>& field, const Point<M>& x, int chart_id,
                        double h = 1e-5) {
  const auto& c = atlas.chart(chart_id);
  const Vec2 xi = c.to_chart(x.coords());
  auto comps = [&](const Vec2& z) { return c.push(z, field.value(Point<M>(c.from_chart(z)))); };
  double div = 0.0;
  for (int k = 0; k < 2; ++k) {
    Vec2 e = Vec2::Zero();
    e(k) = h;
    div += (comps(xi + e)(k) - comps(xi - e)(k)) / (2.0 * h);
  }
  const Vec2 y = comps(xi);
  const Christoffel g = c.christoffel_at(xi);
  for (int k = 0; k < 2; ++k) {
    for (int i = 0; i < 2; ++i) div += y(k) * g[i](k, i);
  }
  return div;
}

// ---------------------------------------------------------------------------
// Sphere zoo

/// Killing field p -> omega x p (infinitesimal rotation about omega).
class SphereKilling final : public FieldImpl<Sphere2> {
 public:
  explicit SphereKilling(const Vec3& omega, std::string name = "killing") : omega_(omega), name_(std::move(name)) {
    cross_ << 0, -omega.z(), omega.y(), omega.z(), 0, -omega.x(), -omega.y(), omega.x(), 0;
  }
  FieldKind kind() const override { return FieldKind::analytic; }
  std::string name() const override { return name_; }
  Vec3 value(const Point<Sphere2>& x) const override { return omega_.cross(x.coords()); }
  FieldJet<Sphere2> jet(const Point<Sphere2>& x) const override {
    const Mat3 p = Sphere2::tangent_projector(x.coords());
    return {value(x), p * cross_ * p};
  }
  ValueDiv<Sphere2> value_div(const Point<Sphere2>& x) const override { return {value(x), 0.0}; }

 private:
  Vec3 omega_;
  Mat3 cross_;
  std::string name_;
};

/// Gradient of the height function p -> <a, p>; divergence -2 <a, p>.
class SphereHeightGradient final : public FieldImpl<Sphere2> {
 public:
  explicit SphereHeightGradient(const Vec3& a) : a_(a) {}
  FieldKind kind() const override { return FieldKind::analytic; }
  std::string name() const override { return "gradient_height"; }
  Vec3 value(const Point<Sphere2>& x) const override { return a_ - a_.dot(x.coords()) * x.coords(); }
  FieldJet<Sphere2> jet(const Point<Sphere2>& x) const override {
    return {value(x), -a_.dot(x.coords()) * Sphere2::tangent_projector(x.coords())};
  }
  ValueDiv<Sphere2> value_div(const Point<Sphere2>& x) const override {
    return {value(x), -2.0 * a_.dot(x.coords())};
  }

 private:
  Vec3 a_;
};

/// Rough Sobolev drift X = A |theta - pi/2|^gamma sin(theta) e_phi
///                     = A |theta - pi/2|^gamma (-y, x, 0),
/// theta the polar angle. Bounded, Hoelder-gamma across the equator,
/// divergence-free, in H^p_1 iff p (1 - gamma) < 1. Singular set: equator.
class SphereRough final : public FieldImpl<Sphere2> {
 public:
  SphereRough(double gamma, double amplitude = 1.0) : gamma_(gamma), amp_(amplitude) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw UsageError("rough field exponent must lie in (0, 1)");
  }
  FieldKind kind() const override { return FieldKind::rough_sobolev; }
  std::string name() const override { return "rough_sphere"; }
  std::optional<double> roughness_exponent() const override { return gamma_; }

  Vec3 value(const Point<Sphere2>& x) const override {
    const Vec3& p = x.coords();
    const double t = std::abs(Sphere2::polar_angle(p) - pi / 2.0);
    return amp_ * std::pow(t, gamma_) * Vec3(-p.y(), p.x(), 0.0);
  }
  bool singular_at(const Point<Sphere2>& x) const override {
    return std::abs(Sphere2::polar_angle(x.coords()) - pi / 2.0) < 1e-14;
  }
  FieldJet<Sphere2> jet(const Point<Sphere2>& x) const override {
    if (singular_at(x)) throw SingularPointError("rough_sphere: derivative undefined on the equator");
    const Vec3& p = x.coords();
    const double theta = Sphere2::polar_angle(p);
    const double d = theta - pi / 2.0;
    const double t = std::abs(d);
    const double h = std::pow(t, gamma_);
    const double sin_theta = std::sin(theta);
    // dh/dz = gamma t^(gamma-1) sgn(d) dtheta/dz, dtheta/dz = -1/sin(theta).
    const double dhdz = sin_theta > 1e-300 ? -gamma_ * std::pow(t, gamma_ - 1.0) * (d > 0 ? 1.0 : -1.0) / sin_theta : 0.0;
    const Vec3 r(-p.y(), p.x(), 0.0);
    Mat3 df = h * (Mat3() << 0, -1, 0, 1, 0, 0, 0, 0, 0).finished();
    df.col(2) += dhdz * r;
    const Mat3 proj = Sphere2::tangent_projector(p);
    return {amp_ * h * r, amp_ * proj * df * proj};
  }
  ValueDiv<Sphere2> value_div(const Point<Sphere2>& x) const override { return {value(x), 0.0}; }

  /// sup |X| = A max_theta |theta - pi/2|^gamma sin(theta), by dense 1-d search.
  double sup_norm() const {
    double best = 0.0;
    for (int i = 0; i <= 200000; ++i) {
      const double th = pi * i / 200000.0;
      best = std::max(best, std::pow(std::abs(th - pi / 2.0), gamma_) * std::sin(th));
    }
    return amp_ * best;
  }

 private:
  double gamma_;
  double amp_;
};

inline VectorField<Sphere2> killing_field(const Vec3& omega, std::string name = "killing") {
  return make_field<Sphere2, SphereKilling>(omega, std::move(name));
}

inline std::vector<VectorField<Sphere2>> sphere_killing_noise(double scale = 1.0) {
  return {killing_field(scale * Vec3::UnitX(), "killing_x"), killing_field(scale * Vec3::UnitY(), "killing_y"),
          killing_field(scale * Vec3::UnitZ(), "killing_z")};
}

// ---------------------------------------------------------------------------
// Torus zoo

class TorusConstant final : public FieldImpl<Torus2> {
 public:
  explicit TorusConstant(const Vec2& c, std::string name = "constant") : c_(c), name_(std::move(name)) {}
  FieldKind kind() const override { return FieldKind::analytic; }
  std::string name() const override { return name_; }
  Vec2 value(const Point<Torus2>&) const override { return c_; }
  FieldJet<Torus2> jet(const Point<Torus2>&) const override { return {c_, Mat2::Zero()}; }
  ValueDiv<Torus2> value_div(const Point<Torus2>&) const override { return {c_, 0.0}; }

 private:
  Vec2 c_;
  std::string name_;
};

/// X = (a sin(theta_1), 0); div X = a cos(theta_1). The circle theta_1 = 0
/// is invariant and has constant divergence a there.
class TorusSinDrift final : public FieldImpl<Torus2> {
 public:
  explicit TorusSinDrift(double a) : a_(a) {}
  FieldKind kind() const override { return FieldKind::analytic; }
  std::string name() const override { return "sin_drift"; }
  Vec2 value(const Point<Torus2>& x) const override { return Vec2(a_ * std::sin(x.coords().x()), 0.0); }
  FieldJet<Torus2> jet(const Point<Torus2>& x) const override {
    Mat2 d = Mat2::Zero();
    d(0, 0) = a_ * std::cos(x.coords().x());
    return {value(x), d};
  }

 private:
  double a_;
};

/// Rough shear X = (0, A |theta_1 - pi|^gamma): divergence-free, bounded,
/// Hoelder-gamma across theta_1 = pi, in H^p_1 iff p (1 - gamma) < 1.
class TorusRough final : public FieldImpl<Torus2> {
 public:
  TorusRough(double gamma, double amplitude = 1.0) : gamma_(gamma), amp_(amplitude) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw UsageError("rough field exponent must lie in (0, 1)");
  }
  FieldKind kind() const override { return FieldKind::rough_sobolev; }
  std::string name() const override { return "rough_torus"; }
  std::optional<double> roughness_exponent() const override { return gamma_; }
  Vec2 value(const Point<Torus2>& x) const override {
    return Vec2(0.0, amp_ * std::pow(std::abs(x.coords().x() - pi), gamma_));
  }
  bool singular_at(const Point<Torus2>& x) const override { return std::abs(x.coords().x() - pi) < 1e-14; }
  FieldJet<Torus2> jet(const Point<Torus2>& x) const override {
    if (singular_at(x)) throw SingularPointError("rough_torus: derivative undefined on theta_1 = pi");
    const double d = x.coords().x() - pi;
    Mat2 m = Mat2::Zero();
    m(1, 0) = amp_ * gamma_ * std::pow(std::abs(d), gamma_ - 1.0) * (d > 0 ? 1.0 : -1.0);
    return {value(x), m};
  }
  ValueDiv<Torus2> value_div(const Point<Torus2>& x) const override { return {value(x), 0.0}; }
  double sup_norm() const { return amp_ * std::pow(pi, gamma_); }

 private:
  double gamma_;
  double amp_;
};

inline std::vector<VectorField<Torus2>> torus_translation_noise(double scale = 1.0) {
  return {make_field<Torus2, TorusConstant>(Vec2(scale, 0.0), "e1"),
          make_field<Torus2, TorusConstant>(Vec2(0.0, scale), "e2")};
}

/// Sup norm of a rough field, when the closed form is known.
template <Manifold M>
std::optional<double> rough_sup_norm(const VectorField<M>& f) {
  if constexpr (M::kind == ManifoldKind::sphere2) {
    if (auto* r = dynamic_cast<const SphereRough*>(&f.impl())) return r->sup_norm();
  } else {
    if (auto* r = dynamic_cast<const TorusRough*>(&f.impl())) return r->sup_norm();
  }
  return std::nullopt;
}

}  // namespace manistoch

#endif  // MANISTOCH_FIELD_HPP
