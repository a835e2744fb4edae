#ifndef MANISTOCH_FLOW_HPP
#define MANISTOCH_FLOW_HPP

#include <cmath>
#include <ostream>
#include <span>
#include <vector>

#include "manistoch/brownian.hpp"
#include "manistoch/field.hpp"

namespace manistoch {

/// dx = s X_0 dt + X_k o dW^k on an atlas, s = drift_scale.
template <Manifold M>
struct FlowModel {
  Atlas<M> atlas;
  VectorField<M> drift;
  std::vector<VectorField<M>> noise;
  double drift_scale = 1.0;

  FlowModel with_drift(VectorField<M> d) const { return {atlas, std::move(d), noise, drift_scale}; }
  /// Model of the backward flow: drift -X_0 (drive it with driver.reversed()).
  FlowModel backward() const { return {atlas, drift, noise, -drift_scale}; }
};

/// Position, log-density L_t (rho_t = exp L_t), time, and the active chart.
template <Manifold M>
struct FlowState {
  Point<M> position;
  double log_density = 0.0;
  double time = 0.0;
  int chart = -1;

  double density() const { return std::exp(log_density); }
};

template <Manifold M>
FlowState<M> initial_state(const Atlas<M>& atlas, const Point<M>& x0) {
  return {x0, 0.0, 0.0, atlas.best_chart(x0)};
}

namespace detail {

struct ChartIncrement {
  Vec2 dxi;
  double dlog;
};

/// Chart components of s X_0 dt + X_k dW^k at xi, and the matching
/// increment s div X_0 dt + div X_k dW^k of the log-density.
template <Manifold M>
ChartIncrement chart_increment(const FlowModel<M>& model, const Chart<M>& c, const Vec2& xi, double dt,
                               std::span<const double> dw) {
  const Point<M> p(c.from_chart(xi));
  typename M::Vec v = M::Vec::Zero();
  double dl = 0.0;
  if (dt != 0.0 && model.drift_scale != 0.0) {
    const auto d = model.drift.value_div(p);
    v += (model.drift_scale * dt) * d.value;
    dl += model.drift_scale * dt * d.divergence;
  }
  for (std::size_t k = 0; k < model.noise.size(); ++k) {
    if (dw[k] == 0.0) continue;
    const auto d = model.noise[k].value_div(p);
    v += dw[k] * d.value;
    dl += dw[k] * d.divergence;
  }
  return {c.push(xi, v), dl};
}

template <Manifold M>
void finish_step(const Atlas<M>& atlas, const Chart<M>& c, FlowState<M>& s, const Vec2& xi) {
  if (!xi.allFinite() || !std::isfinite(s.log_density)) throw NumericalFailure("flow step produced a non-finite value");
  s.position = Point<M>(c.from_chart(xi));
  if (!atlas.in_safe_region(s.chart, s.position)) s.chart = atlas.best_chart(s.position);
}

}  // namespace detail

/// One Heun (predictor-corrector) step of the Stratonovich SDE in the active
/// chart, advancing the log-density by the same rule.
template <Manifold M>
void step_stratonovich(const FlowModel<M>& model, FlowState<M>& s, std::span<const double> dw, double dt) {
  if (dw.size() != model.noise.size()) throw UsageError("step: driver channels do not match the noise fields");
  const auto& c = model.atlas.chart(s.chart);
  const Vec2 xi = c.to_chart(s.position.coords());
  const auto a = detail::chart_increment(model, c, xi, dt, dw);
  const auto b = detail::chart_increment(model, c, Vec2(xi + a.dxi), dt, dw);
  s.log_density += 0.5 * (a.dlog + b.dlog);
  s.time += dt;
  detail::finish_step(model.atlas, c, s, Vec2(xi + 0.5 * (a.dxi + b.dxi)));
}

/// Runs steps [from, to) of the driver.
template <Manifold M>
void advance(const FlowModel<M>& model, FlowState<M>& s, const BrownianDriver& driver, int from, int to) {
  const double dt = driver.dt();
  for (int k = from; k < to; ++k) step_stratonovich(model, s, driver.increment(k), dt);
}

template <Manifold M>
struct PathRecord {
  std::vector<double> times;
  std::vector<Point<M>> positions;
  std::vector<double> log_density;
  std::uint64_t driver_seed = 0;
  std::uint64_t path_index = 0;

  const Point<M>& final_position() const { return positions.back(); }
  double final_log_density() const { return log_density.back(); }
  std::size_t size() const { return times.size(); }
};

/// Flow from x0 over the first `n_steps` driver steps (all when negative),
/// recording every `record_stride`-th state and the final one.
template <Manifold M>
PathRecord<M> simulate_flow(const FlowModel<M>& model, const Point<M>& x0, const BrownianDriver& driver,
                            int record_stride = 1, int n_steps = -1) {
  if (record_stride < 1) throw UsageError("simulate_flow: record_stride must be >= 1");
  const int steps = n_steps < 0 ? driver.n_steps() : n_steps;
  if (steps > driver.n_steps()) throw UsageError("simulate_flow: driver grid too short");
  PathRecord<M> rec;
  rec.driver_seed = driver.seed();
  rec.path_index = driver.path_index();
  auto s = initial_state(model.atlas, x0);
  auto push = [&] {
    rec.times.push_back(s.time);
    rec.positions.push_back(s.position);
    rec.log_density.push_back(s.log_density);
  };
  push();
  const double dt = driver.dt();
  for (int k = 0; k < steps; ++k) {
    step_stratonovich(model, s, driver.increment(k), dt);
    if ((k + 1) % record_stride == 0 || k + 1 == steps) push();
  }
  return rec;
}

/// Final state only.
template <Manifold M>
FlowState<M> flow_endpoint(const FlowModel<M>& model, const Point<M>& x0, const BrownianDriver& driver) {
  auto s = initial_state(model.atlas, x0);
  advance(model, s, driver, 0, driver.n_steps());
  return s;
}

/// y-flow of the time-reversed equation: drift -X_0, increments of W^T.
template <Manifold M>
PathRecord<M> simulate_backward(const FlowModel<M>& model, const Point<M>& x0, const BrownianDriver& driver,
                                int record_stride = 1) {
  return simulate_flow(model.backward(), x0, driver.reversed(), record_stride);
}

template <Manifold M>
FlowState<M> backward_endpoint(const FlowModel<M>& model, const Point<M>& x0, const BrownianDriver& driver) {
  return flow_endpoint(model.backward(), x0, driver.reversed());
}

/// Several flows driven by the same noise from the same start.
/// sup_dist_sq(i, j) = sup over grid times of dis^2 between flows i and j.
template <Manifold M>
struct CoupledResult {
  std::vector<FlowState<M>> finals;
  Eigen::MatrixXd sup_dist_sq;
};

template <Manifold M>
CoupledResult<M> simulate_coupled(std::span<const FlowModel<M>> models, const Point<M>& x0,
                                  const BrownianDriver& driver) {
  const std::size_t n = models.size();
  CoupledResult<M> out;
  out.sup_dist_sq = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (const auto& m : models) out.finals.push_back(initial_state(m.atlas, x0));
  const double dt = driver.dt();
  for (int k = 0; k < driver.n_steps(); ++k) {
    for (std::size_t i = 0; i < n; ++i) step_stratonovich(models[i], out.finals[i], driver.increment(k), dt);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double d = distance(out.finals[i].position, out.finals[j].position);
        auto& e = out.sup_dist_sq(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        e = std::max(e, d * d);
        out.sup_dist_sq(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = e;
      }
    }
  }
  return out;
}

template <Manifold M>
struct PairResult {
  FlowState<M> a;
  FlowState<M> b;
  double sup_dist_sq = 0.0;
};

/// Flows of (X_0, X_k) and (X^_0, X_k) under common noise.
template <Manifold M>
PairResult<M> simulate_pair(const FlowModel<M>& model, const VectorField<M>& drift_b, const Point<M>& x0,
                            const BrownianDriver& driver) {
  const std::vector<FlowModel<M>> models{model, model.with_drift(drift_b)};
  auto r = simulate_coupled<M>(models, x0, driver);
  return {r.finals[0], r.finals[1], r.sup_dist_sq(0, 1)};
}

/// Random ODE dx = X_0 dt + X_k (dW^k_n / h) dt for the piecewise-linear
/// interpolation W_n of the driver on its own grid, integrated by RK4 with
/// `substeps` steps per interpolation interval; the log-density solves
/// dL = (div X_0 + div X_k dW^k_n / h) dt.
template <Manifold M>
FlowState<M> wong_zakai_endpoint(const FlowModel<M>& model, const Point<M>& x0, const BrownianDriver& driver,
                                 int substeps = 8, std::vector<FlowState<M>>* trace = nullptr) {
  if (substeps < 1) throw UsageError("wong_zakai: substeps must be >= 1");
  if (static_cast<std::size_t>(driver.channels()) != model.noise.size()) {
    throw UsageError("wong_zakai: driver channels do not match the noise fields");
  }
  auto s = initial_state(model.atlas, x0);
  if (trace) trace->push_back(s);
  const double h = driver.dt();
  const double tau = h / substeps;
  std::vector<double> rate(model.noise.size());
  for (int k = 0; k < driver.n_steps(); ++k) {
    const auto dw = driver.increment(k);
    for (std::size_t i = 0; i < rate.size(); ++i) rate[i] = dw[i] / h * tau;
    for (int sub = 0; sub < substeps; ++sub) {
      const auto& c = model.atlas.chart(s.chart);
      const Vec2 xi = c.to_chart(s.position.coords());
      auto f = [&](const Vec2& z) { return detail::chart_increment(model, c, z, tau, rate); };
      const auto k1 = f(xi);
      const auto k2 = f(Vec2(xi + 0.5 * k1.dxi));
      const auto k3 = f(Vec2(xi + 0.5 * k2.dxi));
      const auto k4 = f(Vec2(xi + k3.dxi));
      s.log_density += (k1.dlog + 2.0 * k2.dlog + 2.0 * k3.dlog + k4.dlog) / 6.0;
      s.time += tau;
      detail::finish_step(model.atlas, c, s, Vec2(xi + (k1.dxi + 2.0 * k2.dxi + 2.0 * k3.dxi + k4.dxi) / 6.0));
    }
    if (trace) trace->push_back(s);
  }
  return s;
}

template <Manifold M>
PathRecord<M> wong_zakai_flow(const FlowModel<M>& model, const Point<M>& x0, const BrownianDriver& driver,
                              int substeps = 8) {
  std::vector<FlowState<M>> trace;
  wong_zakai_endpoint(model, x0, driver, substeps, &trace);
  PathRecord<M> rec;
  rec.driver_seed = driver.seed();
  rec.path_index = driver.path_index();
  for (const auto& s : trace) {
    rec.times.push_back(s.time);
    rec.positions.push_back(s.position);
    rec.log_density.push_back(s.log_density);
  }
  return rec;
}

/// CSV header and rows: path_index, t, coordinates, log_density.
template <Manifold M>
void write_path_header(std::ostream& os) {
  os << "path_index,t,";
  if constexpr (M::kind == ManifoldKind::sphere2) {
    os << "x,y,z";
  } else {
    os << "theta1,theta2";
  }
  os << ",log_density\n";
}

template <Manifold M>
void write_path_rows(std::ostream& os, const PathRecord<M>& rec) {
  for (std::size_t i = 0; i < rec.size(); ++i) {
    os << rec.path_index << ',' << rec.times[i];
    const auto& c = rec.positions[i].coords();
    for (int k = 0; k < M::ambient_dim; ++k) os << ',' << c(k);
    os << ',' << rec.log_density[i] << '\n';
  }
}

}  // namespace manistoch

#endif  // MANISTOCH_FLOW_HPP
