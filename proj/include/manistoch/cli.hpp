#ifndef MANISTOCH_CLI_HPP
#define MANISTOCH_CLI_HPP

#include <chrono>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "manistoch/config.hpp"
#include "manistoch/experiments/cauchy.hpp"
#include "manistoch/experiments/density.hpp"
#include "manistoch/experiments/distance.hpp"
#include "manistoch/experiments/flow_demo.hpp"
#include "manistoch/experiments/geometry.hpp"
#include "manistoch/experiments/maximal.hpp"
#include "manistoch/experiments/mollify.hpp"
#include "manistoch/experiments/pushforward.hpp"
#include "manistoch/experiments/quasi_invariance.hpp"
#include "manistoch/experiments/stability.hpp"
#include "manistoch/experiments/wong_zakai.hpp"
#include "manistoch/report.hpp"

namespace manistoch::cli {

/// Experiment subcommands in the order `all` runs them.
inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"geometry-cert", "mollify-conv",     "maximal",      "flow-demo",
                                              "quasi-invariance", "stability",     "wz-conv",      "density-moments",
                                              "distance-est",  "cauchy",           "pushforward"};
  return names;
}

template <Manifold M>
ExperimentReport run_on(const std::string& name, const Config& cfg) {
  if (name == "geometry-cert") return exp_geometry_cert<M>(cfg);
  if (name == "mollify-conv") return exp_mollify_convergence<M>(cfg);
  if (name == "maximal") return exp_maximal<M>(cfg);
  if (name == "flow-demo") return exp_flow_demo<M>(cfg);
  if (name == "quasi-invariance") return exp_quasi_invariance<M>(cfg);
  if (name == "stability") return exp_stability<M>(cfg);
  if (name == "wz-conv") return exp_wong_zakai<M>(cfg);
  if (name == "density-moments") return exp_density_moments<M>(cfg);
  if (name == "distance-est") return exp_distance_estimates<M>(cfg);
  if (name == "cauchy") return exp_cauchy<M>(cfg);
  if (name == "pushforward") return exp_pushforward_constant<M>(cfg);
  throw UsageError("unknown experiment '" + name + "'");
}

inline ExperimentReport run_experiment(const std::string& name, const Config& cfg) {
  if (cfg.general.manifold == "torus2") return run_on<Torus2>(name, cfg);
  return run_on<Sphere2>(name, cfg);
}

/// Runs one experiment; a numerical failure yields a partial report with a failing verdict.
inline ExperimentReport run_guarded(const std::string& name, const Config& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    return run_experiment(name, cfg);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    ExperimentReport rep;
    rep.id = name;
    rep.manifold = cfg.general.manifold;
    rep.notes.push_back(std::string("aborted: ") + e.what());
    rep.verdict("completed", false, e.what());
    rep.timing("total", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    return rep;
  }
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline nlohmann::ordered_json config_json(Config cfg) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  cfg.visit_sections([&](std::string_view sec, auto& params) {
    auto& s = j[std::string(sec)];
    s = nlohmann::ordered_json::object();
    params.visit([&](std::string_view k, auto& field) { s[std::string(k)] = detail::format_value(field); });
  });
  return j;
}

struct RunOptions {
  std::string command;
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> manifold;
  std::string out_dir = "manistoch-out";
  std::vector<std::string> overrides;
};

/// Loads the config file (or defaults) and applies flags and --set overrides.
inline Config resolve_config(const RunOptions& o) {
  Config cfg = o.config_path ? load_config(*o.config_path) : Config{};
  if (o.seed) cfg.general.seed = *o.seed;
  if (o.threads) cfg.general.threads = *o.threads;
  if (o.manifold) cfg.general.manifold = *o.manifold;
  for (const auto& s : o.overrides) apply_override(cfg, s);
  return cfg;
}

inline std::string config_label(const RunOptions& o) { return o.config_path ? *o.config_path : "<defaults>"; }

inline int validate_command(const RunOptions& o, std::ostream& out, std::ostream& err) {
  Config cfg;
  try {
    cfg = resolve_config(o);
  } catch (const ConfigError& e) {
    err << "error: " << config_label(o) << ": " << e.what() << "\n";
    return 2;
  }
  const auto diags = validate(cfg);
  int errors = 0;
  for (const auto& d : diags) {
    (d.error ? err : out) << (d.error ? "error: " : "warning: ") << d.message << "\n";
    errors += d.error ? 1 : 0;
  }
  out << config_label(o) << ": " << errors << " error(s), " << diags.size() - static_cast<std::size_t>(errors)
      << " warning(s)\n";
  return errors ? 2 : 0;
}

/// Executes an experiment subcommand or `all`; exit 0 iff every verdict passes,
/// 1 on a failing verdict, 2 on a configuration error.
inline int run_command(const RunOptions& o, std::ostream& out, std::ostream& err) {
  Config cfg;
  try {
    cfg = resolve_config(o);
  } catch (const ConfigError& e) {
    err << "error: " << config_label(o) << ": " << e.what() << "\n";
    return 2;
  }
  const auto diags = validate(cfg);
  for (const auto& d : diags) err << (d.error ? "error: " : "warning: ") << config_label(o) << ": " << d.message << "\n";
  if (has_errors(diags)) return 2;

  std::vector<std::string> names;
  if (o.command == "all") {
    names = experiment_names();
  } else {
    names.push_back(o.command);
  }
  const std::filesystem::path root(o.out_dir);
  const std::string cfg_text = to_text(cfg);
  const std::string hash = fnv1a_hex(cfg_text);

  nlohmann::ordered_json manifest;
  manifest["tool_version"] = std::string(tool_version);
  manifest["command"] = o.command;
  manifest["config_path"] = o.config_path ? nlohmann::ordered_json(*o.config_path) : nlohmann::ordered_json(nullptr);
  manifest["config_hash"] = hash;
  manifest["config"] = config_json(cfg);
  manifest["seed"] = cfg.general.seed;
  manifest["threads"] = cfg.general.threads;
  manifest["output_dir"] = root.string();
  manifest["started"] = utc_timestamp();
  manifest["finished"] = nullptr;
  manifest["experiments"] = nlohmann::ordered_json::array();
  write_atomic(root / "manifest.json", manifest.dump(2) + "\n");

  bool all_passed = true;
  for (const auto& name : names) {
    const auto dir = o.command == "all" ? root / name : root;
    ExperimentReport rep;
    try {
      rep = run_guarded(name, cfg);
    } catch (const ConfigError& e) {
      err << "error: " << config_label(o) << ": " << e.what() << "\n";
      return 2;
    }
    write_report(dir, rep, hash, cfg.general.seed);
    nlohmann::ordered_json entry;
    entry["experiment"] = name;
    entry["passed"] = rep.passed();
    auto files = nlohmann::ordered_json::array();
    const auto rel = std::filesystem::relative(dir, root);
    for (const auto& t : rep.tables) files.push_back((rel / t.name).lexically_normal().string());
    files.push_back((rel / "report.json").lexically_normal().string());
    entry["files"] = files;
    auto timings = nlohmann::ordered_json::object();
    for (const auto& t : rep.timings) timings[t.name] = t.value;
    entry["seconds"] = timings;
    manifest["experiments"].push_back(entry);
    for (const auto& v : rep.verdicts) {
      out << (v.passed ? "PASS " : "FAIL ") << name << " " << v.criterion;
      if (!v.detail.empty()) out << ": " << v.detail;
      out << "\n";
    }
    all_passed = all_passed && rep.passed();
  }
  manifest["finished"] = utc_timestamp();
  write_atomic(root / "manifest.json", manifest.dump(2) + "\n");
  return all_passed ? 0 : 1;
}

inline int main_entry(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<std::string> args(argv + 1, argv + argc);
  if (!args.empty() && args.front() == "run") args.erase(args.begin());

  CLI::App app{"Stochastic flows of rough vector fields on compact surfaces"};
  app.name("manistoch");
  RunOptions o;
  std::vector<std::string> positional;
  std::string config;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string manifold;
  std::vector<std::string> commands = experiment_names();
  commands.push_back("all");
  commands.push_back("validate");
  app.add_option("command", positional, "experiment, all, or validate [FILE]")->required()->expected(1, 2);
  auto* config_opt = app.add_option("--config", config, "INI configuration file");
  auto* seed_opt = app.add_option("--seed", seed, "master seed");
  auto* threads_opt = app.add_option("--threads", threads, "worker threads (1 is bit-exact)")->check(CLI::PositiveNumber);
  auto* manifold_opt = app.add_option("--manifold", manifold, "sphere2 or torus2")->check(CLI::IsMember({"sphere2", "torus2"}));
  app.add_option("--out", o.out_dir, "output directory");
  app.add_option("--set", o.overrides, "section.key=value override")->take_all();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  o.command = positional.front();
  if (std::find(commands.begin(), commands.end(), o.command) == commands.end()) {
    err << "error: unknown command '" << o.command << "'\n";
    return 2;
  }
  if (positional.size() > 1) {
    if (o.command != "validate" || *config_opt) {
      err << "error: unexpected argument '" << positional[1] << "'\n";
      return 2;
    }
    o.config_path = positional[1];
  }
  if (*config_opt) o.config_path = config;
  if (*seed_opt) o.seed = seed;
  if (*threads_opt) o.threads = threads;
  if (*manifold_opt) o.manifold = manifold;
  if (o.command == "validate") return validate_command(o, out, err);
  return run_command(o, out, err);
}

}  // namespace manistoch::cli

#endif  // MANISTOCH_CLI_HPP
