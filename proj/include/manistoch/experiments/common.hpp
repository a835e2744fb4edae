#ifndef MANISTOCH_EXPERIMENTS_COMMON_HPP
#define MANISTOCH_EXPERIMENTS_COMMON_HPP

#include <chrono>
#include <map>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "manistoch/config.hpp"
#include "manistoch/flow.hpp"
#include "manistoch/mollify.hpp"
#include "manistoch/parallel.hpp"
#include "manistoch/report.hpp"
#include "manistoch/sobolev.hpp"
#include "manistoch/stats.hpp"

namespace manistoch {

template <Manifold M>
Atlas<M> make_atlas(const AtlasConfig& a) {
  return make_default_atlas<M>(AtlasParams{a.radius, a.lambda, a.rho, a.bump_sharpness, a.safe_fraction});
}

template <Manifold M>
VectorField<M> make_rough_field(const RoughParams& r) {
  if constexpr (M::kind == ManifoldKind::sphere2) {
    return make_field<Sphere2, SphereRough>(r.gamma, r.amplitude);
  } else {
    return make_field<Torus2, TorusRough>(r.gamma, r.amplitude);
  }
}

template <Manifold M>
VectorField<M> make_drift(const std::string& name, double strength, const RoughParams& rough) {
  if (name == "zero") return zero_field<M>();
  if (name == "rough") return make_rough_field<M>(rough);
  if constexpr (M::kind == ManifoldKind::sphere2) {
    if (name == "compressible") return make_field<Sphere2, SphereHeightGradient>(Vec3(0.0, 0.0, strength));
    if (name == "divergence_free") return killing_field(Vec3(0.0, 0.0, strength), "rotation_z");
  } else {
    if (name == "compressible") return make_field<Torus2, TorusSinDrift>(strength);
    if (name == "divergence_free") return make_field<Torus2, TorusConstant>(Vec2(strength, 0.0));
  }
  throw ConfigError("unknown drift '" + name + "'");
}

template <Manifold M>
std::vector<VectorField<M>> make_noise(const std::string& name, double scale) {
  if (name == "none") return {};
  if (name == "isometric") {
    if constexpr (M::kind == ManifoldKind::sphere2) {
      return sphere_killing_noise(scale);
    } else {
      return torus_translation_noise(scale);
    }
  }
  throw ConfigError("unknown noise '" + name + "'");
}

template <Manifold M>
FlowModel<M> make_model(const Config& cfg) {
  return {make_atlas<M>(cfg.atlas), make_drift<M>(cfg.model.drift, cfg.model.drift_strength, cfg.rough),
          make_noise<M>(cfg.model.noise, cfg.model.noise_scale)};
}

/// Tabulated mollifications of the configured rough field, shared between
/// experiments of one process.
template <Manifold M>
VectorField<M> cached_mollified_rough(const Config& cfg, int n, int threads) {
  using Key = std::tuple<double, double, int, int, int, double, double>;
  static std::mutex mutex;
  static std::map<Key, VectorField<M>> cache;
  const Key key{cfg.rough.gamma, cfg.rough.amplitude, n, cfg.mollify.quadrature_order, cfg.mollify.nodes_per_radius,
                cfg.atlas.radius, cfg.atlas.bump_sharpness};
  std::lock_guard<std::mutex> lock(mutex);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  MollifyOptions opt;
  opt.quadrature_order = cfg.mollify.quadrature_order;
  opt.nodes_per_radius = cfg.mollify.nodes_per_radius;
  opt.tabulate = true;
  opt.threads = threads;
  auto f = mollify(make_rough_field<M>(cfg.rough), make_atlas<M>(cfg.atlas), n, opt);
  cache.emplace(key, f);
  return f;
}

/// Monte Carlo ||a - b||_1 = int |a - b| dnu.
template <Manifold M>
Estimate l1_distance(const VectorField<M>& a, const VectorField<M>& b, const std::vector<Point<M>>& pts, int threads) {
  std::vector<double> v(pts.size());
  parallel_for(pts.size(), threads, [&](std::size_t i) { v[i] = M::volume * (a.value(pts[i]) - b.value(pts[i])).norm(); });
  return mean_se(v);
}

/// Grid steps for horizon T at step dt (rounded to the nearest integer).
inline int step_count(double T, double dt) {
  const int n = static_cast<int>(std::lround(T / dt));
  if (n < 1) throw UsageError("time grid: T / dt must be >= 1");
  return n;
}

/// Distinct stream ids for the experiments' drivers.
enum class Stream : std::uint64_t {
  quasi_invariance = 1,
  density,
  stability,
  cauchy,
  inversion,
  wong_zakai,
  flow_demo,
  pushforward,
  points,
};

inline std::uint64_t stream_seed(std::uint64_t seed, Stream s) { return hash_words(seed, static_cast<std::uint64_t>(s)); }

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace manistoch

#endif  // MANISTOCH_EXPERIMENTS_COMMON_HPP
