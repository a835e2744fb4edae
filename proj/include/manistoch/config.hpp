#ifndef MANISTOCH_CONFIG_HPP
#define MANISTOCH_CONFIG_HPP

// Run configuration. A config file is a list of sections
//
//   [section]
//   key = value        # comment
//
// Lists are comma separated. Every parameter has a default equal to the
// desk-scale acceptance setting, so an empty file is a valid config.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <type_traits>
#include <vector>

#include "manistoch/errors.hpp"

namespace manistoch {

struct GeneralParams {
  std::string manifold = "sphere2";
  std::uint64_t seed = 20240601;
  int threads = 1;

  template <class V>
  void visit(V&& v) {
    v("manifold", manifold);
    v("seed", seed);
    v("threads", threads);
  }
};

/// Drift and noise used by the smooth-field experiments. Drift names:
/// zero, compressible (sphere: gradient of the height z; torus: (a sin t1, 0)),
/// divergence_free (sphere: rotation about z; torus: constant), rough.
/// Noise names: none, isometric (sphere: rotations about the axes; torus:
/// coordinate translations).
struct ModelParams {
  std::string drift = "compressible";
  double drift_strength = 0.5;
  std::string noise = "isometric";
  double noise_scale = 0.5;

  template <class V>
  void visit(V&& v) {
    v("drift", drift);
    v("drift_strength", drift_strength);
    v("noise", noise);
    v("noise_scale", noise_scale);
  }
};

struct RoughParams {
  double gamma = 0.6;
  double p = 1.5;
  double amplitude = 1.0;
  bool sobolev_claim = true;

  template <class V>
  void visit(V&& v) {
    v("gamma", gamma);
    v("p", p);
    v("amplitude", amplitude);
    v("sobolev_claim", sobolev_claim);
  }
};

struct AtlasConfig {
  double radius = 0.0;
  double lambda = 0.0;
  double rho = 0.0;
  double bump_sharpness = 1.0;
  double safe_fraction = 0.8;

  template <class V>
  void visit(V&& v) {
    v("radius", radius);
    v("lambda", lambda);
    v("rho", rho);
    v("bump_sharpness", bump_sharpness);
    v("safe_fraction", safe_fraction);
  }
};

struct GeometryParams {
  int oracle_pairs = 1000;
  int cert_pairs = 10000;
  int partition_points = 10000;
  int shooting_steps = 128;
  int geodesic_samples = 64;

  template <class V>
  void visit(V&& v) {
    v("oracle_pairs", oracle_pairs);
    v("cert_pairs", cert_pairs);
    v("partition_points", partition_points);
    v("shooting_steps", shooting_steps);
    v("geodesic_samples", geodesic_samples);
  }
};

struct MollifyParams {
  std::vector<int> levels{4, 8, 16, 32, 64};
  int quadrature_n = 40000;
  int pp1_points = 20000;
  double pp1_constant = 1.0;
  double required_reduction = 0.25;
  int quadrature_order = 16;
  int nodes_per_radius = 4;

  template <class V>
  void visit(V&& v) {
    v("levels", levels);
    v("quadrature_n", quadrature_n);
    v("pp1_points", pp1_points);
    v("pp1_constant", pp1_constant);
    v("required_reduction", required_reduction);
    v("quadrature_order", quadrature_order);
    v("nodes_per_radius", nodes_per_radius);
  }
};

struct MaximalParams {
  int cloud_n = 200000;
  int eval_n = 1000;
  double R = 0.5;
  int levels = 16;
  double p = 1.5;
  double cap_p = 2.0;
  double family_bound = 10.0;
  double stability_band = 0.2;
  int lipschitz_pairs = 2000;
  double lipschitz_bound = 1.1;

  template <class V>
  void visit(V&& v) {
    v("cloud_n", cloud_n);
    v("eval_n", eval_n);
    v("R", R);
    v("levels", levels);
    v("p", p);
    v("cap_p", cap_p);
    v("family_bound", family_bound);
    v("stability_band", stability_band);
    v("lipschitz_pairs", lipschitz_pairs);
    v("lipschitz_bound", lipschitz_bound);
  }
};

struct FlowParams {
  double T = 1.0;
  double dt = 1e-3;
  int n_paths = 20;
  int demo_paths = 4;
  int record_stride = 10;
  double isometry_tolerance = 1e-6;

  template <class V>
  void visit(V&& v) {
    v("T", T);
    v("dt", dt);
    v("n_paths", n_paths);
    v("demo_paths", demo_paths);
    v("record_stride", record_stride);
    v("isometry_tolerance", isometry_tolerance);
  }
};

struct WongZakaiParams {
  std::vector<int> levels{8, 16, 32, 64, 128};
  int fine_steps = 4096;
  int n_paths = 200;
  double T = 1.0;
  int substeps = 8;
  double slope_min = -0.75;
  double slope_max = -0.25;

  template <class V>
  void visit(V&& v) {
    v("levels", levels);
    v("fine_steps", fine_steps);
    v("n_paths", n_paths);
    v("T", T);
    v("substeps", substeps);
    v("slope_min", slope_min);
    v("slope_max", slope_max);
  }
};

struct QuasiInvarianceParams {
  int n_points = 2000;
  int n_paths = 2000;
  double T = 0.5;
  double dt = 0.02;
  double z_max = 4.0;
  int control_points = 200;
  int control_paths = 200;

  template <class V>
  void visit(V&& v) {
    v("n_points", n_points);
    v("n_paths", n_paths);
    v("T", T);
    v("dt", dt);
    v("z_max", z_max);
    v("control_points", control_points);
    v("control_paths", control_paths);
  }
};

struct DensityParams {
  std::vector<double> q_list{1.0, 2.0, 4.0};
  std::vector<double> T_grid{0.25, 0.5, 1.0};
  double dt = 0.0025;
  int n_points = 100;
  int n_paths = 200;
  double deterministic_rate = 0.7;
  double deterministic_tolerance = 1e-6;
  double r2_min = 0.95;
  std::vector<int> mollified_levels{4, 8, 16};
  int mollified_points = 20;
  int mollified_paths = 50;

  template <class V>
  void visit(V&& v) {
    v("q_list", q_list);
    v("T_grid", T_grid);
    v("dt", dt);
    v("n_points", n_points);
    v("n_paths", n_paths);
    v("deterministic_rate", deterministic_rate);
    v("deterministic_tolerance", deterministic_tolerance);
    v("r2_min", r2_min);
    v("mollified_levels", mollified_levels);
    v("mollified_points", mollified_points);
    v("mollified_paths", mollified_paths);
  }
};

struct StabilityParams {
  std::vector<double> delta_grid{0.01, 0.03, 0.1, 0.3};
  int level = 8;
  int second_level = 32;
  int n_points = 500;
  int n_paths = 500;
  double T = 0.5;
  double dt = 0.01;
  int l1_samples = 20000;
  double se_slack = 2.0;

  template <class V>
  void visit(V&& v) {
    v("delta_grid", delta_grid);
    v("level", level);
    v("second_level", second_level);
    v("n_points", n_points);
    v("n_paths", n_paths);
    v("T", T);
    v("dt", dt);
    v("l1_samples", l1_samples);
    v("se_slack", se_slack);
  }
};

struct CauchyParams {
  std::vector<int> levels{4, 8, 16, 32};
  int n_points = 400;
  int n_paths = 5;
  double T = 0.5;
  double dt = 0.01;
  std::vector<double> R_grid{1.0, 2.0, 4.0};
  int l1_samples = 20000;
  double se_slack = 2.0;
  std::vector<int> inversion_steps{50, 100, 200, 400};
  int inversion_paths = 100;
  double inversion_T = 0.5;
  double inversion_order_min = 0.8;

  template <class V>
  void visit(V&& v) {
    v("levels", levels);
    v("n_points", n_points);
    v("n_paths", n_paths);
    v("T", T);
    v("dt", dt);
    v("R_grid", R_grid);
    v("l1_samples", l1_samples);
    v("se_slack", se_slack);
    v("inversion_steps", inversion_steps);
    v("inversion_paths", inversion_paths);
    v("inversion_T", inversion_T);
    v("inversion_order_min", inversion_order_min);
  }
};

struct DistanceParams {
  int n_pairs = 4000;
  int cloud_n = 50000;
  double fd_step = 1e-3;

  template <class V>
  void visit(V&& v) {
    v("n_pairs", n_pairs);
    v("cloud_n", cloud_n);
    v("fd_step", fd_step);
  }
};

struct PushforwardParams {
  int n_points = 500;
  int n_paths = 20;
  double T = 1.0;
  double dt = 0.01;
  int checkpoints = 4;
  double stability_band = 0.2;
  double z_max = 4.0;
  std::vector<int> mollified_levels{4, 8, 16};

  template <class V>
  void visit(V&& v) {
    v("n_points", n_points);
    v("n_paths", n_paths);
    v("T", T);
    v("dt", dt);
    v("checkpoints", checkpoints);
    v("stability_band", stability_band);
    v("z_max", z_max);
    v("mollified_levels", mollified_levels);
  }
};

struct Config {
  GeneralParams general;
  ModelParams model;
  RoughParams rough;
  AtlasConfig atlas;
  GeometryParams geometry;
  MollifyParams mollify;
  MaximalParams maximal;
  FlowParams flow;
  WongZakaiParams wong_zakai;
  QuasiInvarianceParams quasi_invariance;
  DensityParams density;
  StabilityParams stability;
  CauchyParams cauchy;
  DistanceParams distance;
  PushforwardParams pushforward;

  template <class V>
  void visit_sections(V&& v) {
    v("general", general);
    v("model", model);
    v("rough", rough);
    v("atlas", atlas);
    v("geometry", geometry);
    v("mollify", mollify);
    v("maximal", maximal);
    v("flow", flow);
    v("wong_zakai", wong_zakai);
    v("quasi_invariance", quasi_invariance);
    v("density", density);
    v("stability", stability);
    v("cauchy", cauchy);
    v("distance", distance);
    v("pushforward", pushforward);
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
bool parse_scalar(std::string_view text, T& out) {
  text = trim(text);
  if constexpr (std::is_same_v<T, std::string>) {
    if (text.size() >= 2 && text.front() == '"' && text.back() == '"') text = text.substr(1, text.size() - 2);
    out = std::string(text);
    return true;
  } else if constexpr (std::is_same_v<T, bool>) {
    if (text == "true" || text == "1") {
      out = true;
      return true;
    }
    if (text == "false" || text == "0") {
      out = false;
      return true;
    }
    return false;
  } else {
    if (text.empty()) return false;
    T v{};
    const auto* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end) return false;
    out = v;
    return true;
  }
}

template <class T>
bool parse_value(std::string_view text, T& out) {
  return parse_scalar(text, out);
}

template <class T>
bool parse_value(std::string_view text, std::vector<T>& out) {
  text = trim(text);
  if (text.size() >= 2 && text.front() == '[' && text.back() == ']') text = text.substr(1, text.size() - 2);
  std::vector<T> v;
  while (!trim(text).empty()) {
    const auto comma = text.find(',');
    T item{};
    if (!parse_scalar(text.substr(0, comma), item)) return false;
    v.push_back(item);
    if (comma == std::string_view::npos) break;
    text = text.substr(comma + 1);
  }
  out = std::move(v);
  return true;
}

inline std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

template <class T>
std::string format_value(const T& v) {
  if constexpr (std::is_same_v<T, std::string>) {
    return v;
  } else if constexpr (std::is_same_v<T, bool>) {
    return v ? "true" : "false";
  } else if constexpr (std::is_floating_point_v<T>) {
    return format_double(v);
  } else {
    return std::to_string(v);
  }
}

template <class T>
std::string format_value(const std::vector<T>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += format_value(v[i]);
  }
  return s;
}

}  // namespace detail

/// Sets section.key = text; false if the key does not exist, throws
/// ConfigError(line) if the value does not parse.
inline bool assign(Config& cfg, std::string_view section, std::string_view key, std::string_view text, int line) {
  bool found = false;
  cfg.visit_sections([&](std::string_view sec, auto& params) {
    if (sec != section) return;
    params.visit([&](std::string_view k, auto& field) {
      if (k != key) return;
      found = true;
      if (!detail::parse_value(text, field)) {
        throw ConfigError("invalid value '" + std::string(detail::trim(text)) + "' for " + std::string(section) + "." +
                              std::string(key),
                          line);
      }
    });
  });
  return found;
}

inline void apply_config_text(Config& cfg, std::istream& in) {
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view s = raw;
    if (const auto hash = s.find_first_of("#;"); hash != std::string_view::npos) s = s.substr(0, hash);
    s = detail::trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("unterminated section header", line);
      section = std::string(detail::trim(s.substr(1, s.size() - 2)));
      bool known = false;
      cfg.visit_sections([&](std::string_view sec, auto&) { known = known || sec == section; });
      if (!known) throw ConfigError("unknown section [" + section + "]", line);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line);
    if (section.empty()) throw ConfigError("key outside of any section", line);
    const auto key = detail::trim(s.substr(0, eq));
    if (!assign(cfg, section, key, s.substr(eq + 1), line)) {
      throw ConfigError("unknown key '" + std::string(key) + "' in [" + section + "]", line);
    }
  }
}

inline Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  Config cfg;
  apply_config_text(cfg, in);
  return cfg;
}

inline Config parse_config(const std::string& text) {
  std::istringstream in(text);
  Config cfg;
  apply_config_text(cfg, in);
  return cfg;
}

/// Applies a "section.key=value" override.
inline void apply_override(Config& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
    throw ConfigError("override must look like section.key=value: '" + assignment + "'");
  }
  const std::string section = assignment.substr(0, dot);
  const std::string key = assignment.substr(dot + 1, eq - dot - 1);
  if (!assign(cfg, section, key, std::string_view(assignment).substr(eq + 1), 0)) {
    throw ConfigError("unknown override key '" + section + "." + key + "'");
  }
}

/// Canonical text of the resolved configuration (also the hash input).
inline std::string to_text(Config cfg) {
  std::string out;
  cfg.visit_sections([&](std::string_view sec, auto& params) {
    out += "[" + std::string(sec) + "]\n";
    params.visit([&](std::string_view k, auto& field) {
      out += std::string(k) + " = " + detail::format_value(field) + "\n";
    });
  });
  return out;
}

struct Diagnostic {
  bool error = false;
  std::string message;
};

/// Semantic checks beyond parsing.
inline std::vector<Diagnostic> validate(const Config& cfg) {
  std::vector<Diagnostic> out;
  auto err = [&](std::string m) { out.push_back({true, std::move(m)}); };
  auto warn = [&](std::string m) { out.push_back({false, std::move(m)}); };
  if (cfg.general.manifold != "sphere2" && cfg.general.manifold != "torus2") {
    err("general.manifold must be sphere2 or torus2");
  }
  if (cfg.general.threads < 1) err("general.threads must be >= 1");
  const auto& r = cfg.rough;
  if (!(r.gamma > 0.0 && r.gamma < 1.0)) err("rough.gamma must lie in (0, 1)");
  if (!(r.p >= 1.0)) err("rough.p must be >= 1");
  if (r.sobolev_claim && r.p * (1.0 - r.gamma) >= 1.0) err("p(1-gamma) >= 1: field not in H^p_1");
  for (const auto& [name, T, dt] : {std::tuple{"flow", cfg.flow.T, cfg.flow.dt},
                                    std::tuple{"quasi_invariance", cfg.quasi_invariance.T, cfg.quasi_invariance.dt},
                                    std::tuple{"stability", cfg.stability.T, cfg.stability.dt},
                                    std::tuple{"cauchy", cfg.cauchy.T, cfg.cauchy.dt},
                                    std::tuple{"pushforward", cfg.pushforward.T, cfg.pushforward.dt}}) {
    if (!(T > 0.0)) err(std::string(name) + ".T must be positive");
    if (!(dt > 0.0)) err(std::string(name) + ".dt must be positive");
    if (dt > T) err(std::string(name) + ": dt > T");
  }
  for (double t : cfg.density.T_grid) {
    if (!(t > 0.0)) err("density.T_grid entries must be positive");
    if (cfg.density.dt > t) err("density: dt > T");
  }
  for (double q : cfg.density.q_list) {
    if (q < 1.0) err("density.q_list entries must be >= 1");
  }
  auto positive = [&](const char* name, long long v) {
    if (v < 1) err(std::string(name) + " must be >= 1");
  };
  positive("geometry.oracle_pairs", cfg.geometry.oracle_pairs);
  positive("geometry.cert_pairs", cfg.geometry.cert_pairs);
  positive("mollify.quadrature_n", cfg.mollify.quadrature_n);
  positive("maximal.cloud_n", cfg.maximal.cloud_n);
  positive("wong_zakai.n_paths", cfg.wong_zakai.n_paths);
  positive("quasi_invariance.n_points", cfg.quasi_invariance.n_points);
  positive("quasi_invariance.n_paths", cfg.quasi_invariance.n_paths);
  positive("stability.n_points", cfg.stability.n_points);
  positive("stability.n_paths", cfg.stability.n_paths);
  positive("cauchy.n_points", cfg.cauchy.n_points);
  positive("cauchy.n_paths", cfg.cauchy.n_paths);
  positive("distance.n_pairs", cfg.distance.n_pairs);
  positive("distance.cloud_n", cfg.distance.cloud_n);
  positive("pushforward.n_points", cfg.pushforward.n_points);
  positive("pushforward.n_paths", cfg.pushforward.n_paths);
  positive("pushforward.checkpoints", cfg.pushforward.checkpoints);
  if (!(cfg.distance.fd_step > 0.0)) err("distance.fd_step must be positive");
  if (cfg.pushforward.mollified_levels.empty()) err("pushforward.mollified_levels must not be empty");
  if (cfg.mollify.levels.empty()) err("mollify.levels must not be empty");
  if (cfg.cauchy.levels.size() < 3) err("cauchy.levels needs at least 3 entries");
  for (std::size_t i = 1; i < cfg.cauchy.levels.size(); ++i) {
    if (cfg.cauchy.levels[i] <= cfg.cauchy.levels[i - 1]) err("cauchy.levels must be increasing");
  }
  for (std::size_t i = 1; i < cfg.wong_zakai.levels.size(); ++i) {
    if (cfg.wong_zakai.levels[i] <= cfg.wong_zakai.levels[i - 1]) err("wong_zakai.levels must be increasing");
  }
  for (int l : cfg.wong_zakai.levels) {
    if (l < 1 || cfg.wong_zakai.fine_steps % l != 0) err("wong_zakai.levels must divide fine_steps");
  }
  for (double d : cfg.stability.delta_grid) {
    if (!(d > 0.0)) err("stability.delta_grid entries must be positive");
  }
  if (!(cfg.maximal.p > 1.0)) err("maximal.p must be > 1");
  const double qi_work = static_cast<double>(cfg.quasi_invariance.n_points) * cfg.quasi_invariance.n_paths *
                         (cfg.quasi_invariance.T / cfg.quasi_invariance.dt);
  if (qi_work > 2e8) warn("quasi_invariance: sample budget exceeds desk scale");
  if (cfg.maximal.cloud_n > 2000000) warn("maximal.cloud_n exceeds desk scale");
  if (!cfg.mollify.levels.empty() && cfg.mollify.levels.back() > 128) warn("mollify.levels above 128 are slow");
  return out;
}

inline bool has_errors(const std::vector<Diagnostic>& d) {
  for (const auto& x : d) {
    if (x.error) return true;
  }
  return false;
}

}  // namespace manistoch

#endif  // MANISTOCH_CONFIG_HPP
