#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "manistoch/cli.hpp"
#include "small_config.hpp"

using namespace manistoch;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "manistoch");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("manistoch_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::vector<std::string> with_small(std::vector<std::string> args) {
  for (const auto& s : small_overrides()) {
    args.push_back("--set");
    args.push_back(s);
  }
  return args;
}

}  // namespace

TEST(Cli, MissingConfigExitsTwo) {
  const auto r = run({"run", "stability", "--config", "missing.toml"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("missing.toml"), std::string::npos);
}

TEST(Cli, BadConfigLineIsReported) {
  const auto dir = scratch("badcfg");
  fs::create_directories(dir);
  std::ofstream(dir / "bad.ini") << "[general]\nseed = 1\n[flow]\nT = soon\n";
  const auto r = run({"validate", (dir / "bad.ini").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 4"), std::string::npos);
}

TEST(Cli, ValidateBundledConfig) {
  const auto r = run({"validate", std::string(MANISTOCH_SOURCE_DIR) + "/configs/default.ini"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("0 error(s)"), std::string::npos);
}

TEST(Cli, ValidateSemanticErrors) {
  EXPECT_EQ(run({"validate", "--set", "rough.gamma=0.2", "--set", "rough.p=2"}).code, 2);
  EXPECT_EQ(run({"validate", "--set", "flow.dt=5"}).code, 2);
  EXPECT_EQ(run({"run", "flow-demo", "--set", "flow.dt=5"}).code, 2);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"geometry-cert", "--threads", "0"}).code, 2);
  EXPECT_EQ(run({"geometry-cert", "--set", "general.nothing=1"}).code, 2);
  EXPECT_EQ(run({"geometry-cert", "--manifold", "klein"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, GeometryCertificationPasses) {
  const auto dir = scratch("geometry");
  const auto r = run({"run", "geometry-cert", "--manifold", "sphere2", "--out", dir.string()});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_TRUE(fs::exists(dir / "report.json"));
  EXPECT_TRUE(fs::exists(dir / "geometry_pairs.csv"));
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  EXPECT_FALSE(manifest["finished"].is_null());
  for (const auto& f : manifest["experiments"][0]["files"]) EXPECT_TRUE(fs::exists(dir / f.get<std::string>()));
}

TEST(Cli, FailingVerdictExitsOne) {
  const auto dir = scratch("failing");
  // An isometry tolerance of zero cannot be met by any integrator.
  const auto r = run(with_small({"flow-demo", "--out", dir.string(), "--set", "flow.isometry_tolerance=0"}));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("FAIL flow-demo flow_killing_isometry"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "report.json"));
}

TEST(Cli, AllIsByteIdenticalAcrossRuns) {
  const auto a = scratch("all_a");
  const auto b = scratch("all_b");
  const auto ra = run(with_small({"run", "all", "--seed", "7", "--threads", "1", "--out", a.string()}));
  const auto rb = run(with_small({"run", "all", "--seed", "7", "--threads", "1", "--out", b.string()}));
  EXPECT_NE(ra.code, 2);
  EXPECT_EQ(ra.code, rb.code);
  EXPECT_EQ(ra.out, rb.out);
  const auto manifest = nlohmann::json::parse(slurp(a / "manifest.json"));
  std::size_t reports = 0;
  for (const auto& name : cli::experiment_names()) {
    ASSERT_TRUE(fs::exists(a / name / "report.json")) << name;
    EXPECT_EQ(slurp(a / name / "report.json"), slurp(b / name / "report.json")) << name;
    for (const auto& e : fs::directory_iterator(a / name)) {
      EXPECT_EQ(slurp(e.path()), slurp(b / name / e.path().filename())) << e.path();
    }
    ++reports;
  }
  EXPECT_EQ(manifest["experiments"].size(), reports);
  EXPECT_EQ(manifest["seed"], 7);
  for (const auto& ex : manifest["experiments"]) {
    for (const auto& f : ex["files"]) EXPECT_TRUE(fs::exists(a / f.get<std::string>())) << f;
  }
}
