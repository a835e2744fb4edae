#ifndef MANISTOCH_MOLLIFY_HPP
#define MANISTOCH_MOLLIFY_HPP

// Partition-of-unity mollification of vector fields:
//
//   X_{a,n}(x) = (X^k_a o phi_a^{-1} * zeta_n)(phi_a(x)),   zeta_n = n^2 zeta(n .)
//   X_n        = sum_a psi_a X^k_{a,n} d/dxi^k_a
//
// with zeta(xi) = c exp(-1 / (1 - |xi|^2)) on the unit disc. The chart-wise
// convolutions are evaluated with a tensor Gauss-Legendre rule on the
// kernel support. Stereographic and torus charts extend smoothly beyond
// their domains, so windows reaching past a chart boundary read the field
// through the extended chart map.

#include <cmath>
#include <memory>
#include <vector>

#include "manistoch/field.hpp"
#include "manistoch/parallel.hpp"

namespace manistoch {

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
inline GaussRule gauss_legendre(int n) {
  if (n < 1) throw UsageError("gauss_legendre: n must be >= 1");
  GaussRule r;
  r.nodes.resize(static_cast<std::size_t>(n));
  r.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[static_cast<std::size_t>(i)] = -x;
    r.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    r.weights[static_cast<std::size_t>(i)] = w;
    r.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  return r;
}

/// int_0^1 exp(-1/v) dv = e^{-1} - E_1(1).
inline constexpr double bump_integral_1d = 0.148495506775922;

/// Normalization c with int_{R^2} zeta = 1.
inline constexpr double mollifier_constant = 1.0 / (std::numbers::pi * bump_integral_1d);

/// zeta(eta) with the continuous normalization.
inline double mollifier(const Vec2& eta) {
  const double r2 = eta.squaredNorm();
  if (r2 >= 1.0) return 0.0;
  return mollifier_constant * std::exp(-1.0 / (1.0 - r2));
}

/// Discrete convolution rule on the unit disc. Weights are renormalized so
/// the rule integrates zeta to exactly 1, which makes the discrete
/// convolution reproduce constants; derivative weights integrate grad zeta.
struct MollifierRule {
  std::vector<Vec2> nodes;
  std::vector<double> weights;
  std::vector<Vec2> grad_weights;

  explicit MollifierRule(int order = 16) {
    const GaussRule g = gauss_legendre(order);
    double total = 0.0;
    for (std::size_t a = 0; a < g.nodes.size(); ++a) {
      for (std::size_t b = 0; b < g.nodes.size(); ++b) {
        const Vec2 eta(g.nodes[a], g.nodes[b]);
        const double r2 = eta.squaredNorm();
        if (r2 >= 1.0) continue;
        const double z = std::exp(-1.0 / (1.0 - r2));
        const double w = g.weights[a] * g.weights[b];
        nodes.push_back(eta);
        weights.push_back(w * z);
        grad_weights.push_back(w * z * (-2.0 / ((1.0 - r2) * (1.0 - r2))) * eta);
        total += w * z;
      }
    }
    for (auto& w : weights) w /= total;
    for (auto& w : grad_weights) w /= total;
  }

  std::size_t size() const { return nodes.size(); }
};

struct MollifyOptions {
  int quadrature_order = 16;
  /// Build interpolation tables (recommended for flow integration).
  bool tabulate = false;
  /// Table nodes per kernel radius 1/n.
  int nodes_per_radius = 4;
  int threads = 1;
};

/// Chart-wise mollification with partition-of-unity gluing.
template <Manifold M>
class MollifiedField final : public FieldImpl<M> {
 public:
  using Vec = typename M::Vec;
  using Mat = typename M::Mat;

  MollifiedField(VectorField<M> base, Atlas<M> atlas, int n, MollifyOptions opt = {})
      : base_(std::move(base)), atlas_(std::move(atlas)), n_(n), rule_(opt.quadrature_order) {
    if (n < 1) throw UsageError("mollify: level n must be >= 1");
    if (opt.tabulate) build_tables(opt);
  }

  FieldKind kind() const override { return FieldKind::mollified; }
  std::string name() const override { return "mollified(" + base_.name() + ", n=" + std::to_string(n_) + ")"; }
  int level() const { return n_; }
  const VectorField<M>& base() const { return base_; }
  bool tabulated() const { return !tables_.empty(); }

  /// Chart components X_{a,n} and their chart derivatives dY(k, i) = d_i Y^k.
  struct ChartJet {
    Vec2 y;
    Mat2 dy;
  };

  /// Direct quadrature of the chart-wise convolution at chart point xi.
  ChartJet chart_convolution(int chart_id, const Vec2& xi) const {
    const auto& c = atlas_.chart(chart_id);
    ChartJet out{Vec2::Zero(), Mat2::Zero()};
    const double inv_n = 1.0 / n_;
    for (std::size_t j = 0; j < rule_.size(); ++j) {
      const Vec2 z = xi - inv_n * rule_.nodes[j];
      const Vec2 comp = c.push(z, base_.value(Point<M>(c.from_chart(z))));
      out.y += rule_.weights[j] * comp;
      out.dy += (n_ * comp) * rule_.grad_weights[j].transpose();
    }
    return out;
  }

  ChartJet chart_jet(int chart_id, const Vec2& xi) const {
    if (!tables_.empty()) return interpolate(chart_id, xi);
    return chart_convolution(chart_id, xi);
  }

  Vec value(const Point<M>& x) const override {
    const auto w = atlas_.partition_weights(x);
    Vec v = Vec::Zero();
    for (int i = 0; i < w.count; ++i) {
      const auto& c = atlas_.chart(w.ids[i]);
      const Vec2 xi = c.to_chart(x.coords());
      v += w.weights[i] * c.pull(xi, chart_value(w.ids[i], xi));
    }
    return v;
  }

  FieldJet<M> jet(const Point<M>& x) const override {
    const auto w = atlas_.partition_jet(x);
    FieldJet<M> out{Vec::Zero(), Mat::Zero()};
    for (int i = 0; i < w.count; ++i) {
      const auto& c = atlas_.chart(w.ids[i]);
      const Vec2 xi = c.to_chart(x.coords());
      const ChartJet cj = chart_jet(w.ids[i], xi);
      const Christoffel g = c.christoffel_at(xi);
      Mat2 cov = cj.dy;
      for (int k = 0; k < 2; ++k) cov.row(k) += (g[k].transpose() * cj.y).transpose();
      const Vec y_amb = c.pull(xi, cj.y);
      out.value += w.weights[i] * y_amb;
      out.nabla += w.weights[i] * (c.basis(xi) * cov * c.cobasis(xi)) + y_amb * w.gradients[i].transpose();
    }
    return out;
  }

  /// div X_n = sum_a [psi_a (d_k X^k_{a,n} + X^k_{a,n} Gamma^i_ki) + X^k_{a,n} d_k psi_a]
  ValueDiv<M> value_div(const Point<M>& x) const override {
    const auto w = atlas_.partition_jet(x);
    ValueDiv<M> out{Vec::Zero(), 0.0};
    for (int i = 0; i < w.count; ++i) {
      const auto& c = atlas_.chart(w.ids[i]);
      const Vec2 xi = c.to_chart(x.coords());
      const ChartJet cj = chart_jet(w.ids[i], xi);
      const Christoffel g = c.christoffel_at(xi);
      double div = cj.dy.trace();
      for (int k = 0; k < 2; ++k) {
        for (int j = 0; j < 2; ++j) div += cj.y(k) * g[j](k, j);
      }
      const Vec y_amb = c.pull(xi, cj.y);
      out.value += w.weights[i] * y_amb;
      out.divergence += w.weights[i] * div + y_amb.dot(w.gradients[i]);
    }
    return out;
  }

 private:
  struct Table {
    Vec2 origin;
    double h = 0.0;
    int size = 0;
    bool periodic = false;
    // channels: y1, y2, d1y1, d2y1, d1y2, d2y2
    std::vector<std::array<double, 6>> data;
    const std::array<double, 6>& at(int i, int j) const {
      if (periodic) {
        i = ((i % size) + size) % size;
        j = ((j % size) + size) % size;
      }
      return data[static_cast<std::size_t>(i) * static_cast<std::size_t>(size) + static_cast<std::size_t>(j)];
    }
  };

  Vec2 chart_value(int chart_id, const Vec2& xi) const {
    if (!tables_.empty()) return interpolate(chart_id, xi).y;
    const auto& c = atlas_.chart(chart_id);
    Vec2 y = Vec2::Zero();
    const double inv_n = 1.0 / n_;
    for (std::size_t j = 0; j < rule_.size(); ++j) {
      const Vec2 z = xi - inv_n * rule_.nodes[j];
      y += rule_.weights[j] * c.push(z, base_.value(Point<M>(c.from_chart(z))));
    }
    return y;
  }

  void build_tables(const MollifyOptions& opt) {
    const double h_target = 1.0 / (opt.nodes_per_radius * n_);
    const bool shared = M::kind == ManifoldKind::torus2;  // identity charts: one periodic table
    const int n_tables = shared ? 1 : atlas_.size();
    tables_.resize(static_cast<std::size_t>(n_tables));
    for (int t = 0; t < n_tables; ++t) {
      Table& tab = tables_[static_cast<std::size_t>(t)];
      if (shared) {
        tab.periodic = true;
        tab.size = static_cast<int>(std::ceil(two_pi / h_target));
        tab.h = two_pi / tab.size;
        tab.origin = Vec2::Zero();
      } else {
        // Chart image of the cap where psi_a > 0, plus the interpolation stencil.
        double half = 0.0;
        if constexpr (M::kind == ManifoldKind::sphere2) {
          const auto& c = atlas_.chart(t);
          half = c.scale() * std::tan(c.radius() / 2.0) + 3.0 * h_target;
        }
        tab.size = static_cast<int>(std::ceil(2.0 * half / h_target)) + 1;
        tab.h = 2.0 * half / (tab.size - 1);
        tab.origin = Vec2(-half, -half);
      }
      tab.data.resize(static_cast<std::size_t>(tab.size) * static_cast<std::size_t>(tab.size));
      const int chart_id = shared ? 0 : t;
      parallel_for(static_cast<std::size_t>(tab.size), opt.threads, [&](std::size_t i) {
        for (int j = 0; j < tab.size; ++j) {
          const Vec2 xi = tab.origin + tab.h * Vec2(static_cast<double>(i), static_cast<double>(j));
          const ChartJet cj = chart_convolution(chart_id, xi);
          tab.data[i * static_cast<std::size_t>(tab.size) + static_cast<std::size_t>(j)] = {
              cj.y(0), cj.y(1), cj.dy(0, 0), cj.dy(0, 1), cj.dy(1, 0), cj.dy(1, 1)};
        }
      });
    }
  }

  static std::array<double, 4> catmull_rom(double t) {
    const double t2 = t * t;
    const double t3 = t2 * t;
    return {0.5 * (-t3 + 2.0 * t2 - t), 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0), 0.5 * (-3.0 * t3 + 4.0 * t2 + t),
            0.5 * (t3 - t2)};
  }

  ChartJet interpolate(int chart_id, const Vec2& xi) const {
    const bool shared = tables_.size() == 1 && M::kind == ManifoldKind::torus2;
    const Table& tab = tables_[shared ? 0 : static_cast<std::size_t>(chart_id)];
    Vec2 local = (xi - tab.origin) / tab.h;
    if (tab.periodic) {
      const double period = static_cast<double>(tab.size);
      local = Vec2(local.x() - period * std::floor(local.x() / period), local.y() - period * std::floor(local.y() / period));
    }
    const int i0 = static_cast<int>(std::floor(local.x()));
    const int j0 = static_cast<int>(std::floor(local.y()));
    if (!tab.periodic && (i0 < 1 || j0 < 1 || i0 + 2 >= tab.size || j0 + 2 >= tab.size)) {
      return chart_convolution(chart_id, xi);
    }
    const auto wx = catmull_rom(local.x() - i0);
    const auto wy = catmull_rom(local.y() - j0);
    std::array<double, 6> acc{};
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        const double w = wx[static_cast<std::size_t>(a)] * wy[static_cast<std::size_t>(b)];
        const auto& d = tab.at(i0 - 1 + a, j0 - 1 + b);
        for (std::size_t ch = 0; ch < 6; ++ch) acc[ch] += w * d[ch];
      }
    }
    ChartJet out;
    out.y = Vec2(acc[0], acc[1]);
    out.dy << acc[2], acc[3], acc[4], acc[5];
    return out;
  }

  VectorField<M> base_;
  Atlas<M> atlas_;
  int n_;
  MollifierRule rule_;
  std::vector<Table> tables_;
};

/// X_n for the given level. The returned field is smooth; it is glued from
/// chart-wise convolutions and is not chart-compatible on overlaps.
template <Manifold M>
VectorField<M> mollify(const VectorField<M>& field, const Atlas<M>& atlas, int n, MollifyOptions opt = {}) {
  return make_field<M, MollifiedField<M>>(field, atlas, n, opt);
}

}  // namespace manistoch

#endif  // MANISTOCH_MOLLIFY_HPP
