// Desk-scale acceptance run: one PASS/FAIL line per criterion, each at its
// pinned tolerance and runtime budget, all single-threaded.

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "manistoch/cli.hpp"

using namespace manistoch;

namespace {

struct Criterion {
  std::string title;
  std::string experiment;
  std::vector<std::string> verdicts;
  double budget_seconds;
  std::string timing;  // empty: the whole experiment
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> c{
      {"Geometry oracles", "geometry-cert", {"geometry_oracles"}, 10.0, "oracles"},
      {"Atlas certification", "geometry-cert", {"atlas_certification"}, 10.0, "certification"},
      {"Mollifier convergence", "mollify-conv", {"mollifier_monotone", "mollifier_reduction", "mollifier_pp1"}, 120.0, ""},
      {"Maximal functions", "maximal", {"maximal_invariants", "maximal_lp_bound", "maximal_lipschitz"}, 120.0, ""},
      {"Flow integrator",
       "flow-demo",
       {"flow_flat_exact", "flow_killing_isometry", "flow_divergence_free_density"},
       60.0,
       ""},
      {"Wong-Zakai convergence", "wz-conv", {"wong_zakai_rate"}, 180.0, ""},
      {"Quasi-invariance",
       "quasi-invariance",
       {"quasi_invariance_duality", "quasi_invariance_measure_preserving"},
       300.0,
       ""},
      {"Density moments", "density-moments", {"density_deterministic", "density_exponential_envelope"}, 120.0, ""},
      {"Stability functional",
       "stability",
       {"stability_monotone", "stability_envelope", "stability_identical_drift"},
       300.0,
       ""},
      {"Mollified-flow Cauchy property", "cauchy", {"cauchy_decreasing", "cauchy_inversion"}, 300.0, ""},
  };
  return c;
}

double seconds_for(const ExperimentReport& r, const std::string& timing) {
  if (timing.empty()) return r.total_seconds();
  for (const auto& t : r.timings) {
    if (t.name == timing) return t.value;
  }
  return r.total_seconds();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria at desk scale"};
  std::string config_path;
  std::string record;
  std::string out_dir;
  bool report_only = false;
  app.add_option("--config", config_path, "INI configuration (defaults when omitted)");
  app.add_option("--record", record, "also write the verdict lines to this file");
  app.add_option("--out", out_dir, "write each experiment's report.json and CSVs under this directory");
  app.add_flag("--report-only", report_only, "exit 0 once every criterion has been evaluated");
  CLI11_PARSE(app, argc, argv);

  Config cfg;
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << config_path << ": " << e.what() << "\n";
    return 2;
  }
  cfg.general.threads = 1;
  cfg.general.manifold = "sphere2";
  const std::string hash = fnv1a_hex(to_text(cfg));

  std::map<std::string, ExperimentReport> reports;
  std::ostringstream lines;
  int failed = 0;
  int index = 0;
  for (const auto& c : criteria()) {
    ++index;
    if (!reports.count(c.experiment)) {
      reports[c.experiment] = cli::run_guarded(c.experiment, cfg);
      if (!out_dir.empty()) write_report(std::filesystem::path(out_dir) / c.experiment, reports[c.experiment], hash,
                                         cfg.general.seed);
    }
    const auto& r = reports[c.experiment];
    bool pass = true;
    std::string detail;
    for (const auto& name : c.verdicts) {
      const auto* v = r.find_verdict(name);
      const bool ok = v && v->passed;
      pass = pass && ok;
      if (!detail.empty()) detail += "; ";
      detail += name + (ok ? " ok" : " FAILED");
      if (v && !v->detail.empty()) detail += " (" + v->detail + ")";
    }
    if (const auto* v = r.find_verdict("completed"); v && !v->passed) {
      pass = false;
      detail += "; aborted: " + v->detail;
    }
    const double secs = seconds_for(r, c.timing);
    const bool in_time = secs < c.budget_seconds;
    pass = pass && in_time;
    failed += pass ? 0 : 1;
    std::ostringstream line;
    line << (pass ? "PASS" : "FAIL") << " [" << index << "] " << c.title << ": " << detail << "; runtime "
         << CsvTable::cell(secs) << " s " << (in_time ? "<" : ">=") << " " << CsvTable::cell(c.budget_seconds)
         << " s\n";
    std::cout << line.str() << std::flush;
    lines << line.str();
  }
  lines << (criteria().size() - static_cast<std::size_t>(failed)) << "/" << criteria().size() << " criteria passed\n";
  std::cout << (criteria().size() - static_cast<std::size_t>(failed)) << "/" << criteria().size()
            << " criteria passed\n";
  if (!record.empty()) write_atomic(record, lines.str());
  if (report_only) return 0;
  return failed ? 1 : 0;
}
