#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "manistoch.hpp"

using namespace manistoch;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST(Report, CsvEscapingFollowsRfc4180) {
  EXPECT_EQ(csv_escape("plain"), "plain");
  EXPECT_EQ(csv_escape("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
  CsvTable t{"t.csv", {"a", "b"}, {}};
  t.add(1, 0.5);
  EXPECT_EQ(to_csv(t), "a,b\r\n1,0.5\r\n");
}

TEST(Report, TablesKeepStableReferences) {
  ExperimentReport r;
  auto& first = r.table("a.csv", {"x"});
  for (int i = 0; i < 50; ++i) r.table("t" + std::to_string(i) + ".csv", {"y"});
  first.add(1);
  EXPECT_EQ(r.tables.front().rows.size(), 1u);
}

TEST(Report, PassedRequiresVerdicts) {
  ExperimentReport r;
  EXPECT_FALSE(r.passed());
  r.verdict("a", true);
  EXPECT_TRUE(r.passed());
  r.verdict("b", false);
  EXPECT_FALSE(r.passed());
}

TEST(Report, JsonOmitsTimingsAndKeepsOrder) {
  ExperimentReport r;
  r.id = "x";
  r.metric("zeta", 1.0);
  r.metric("alpha", std::nan(""));
  r.timing("total", 3.0);
  r.verdict("ok", true);
  const auto j = to_json(r, "abc", 5);
  EXPECT_EQ(j["metrics"].begin().key(), "zeta");
  EXPECT_EQ(j["metrics"]["alpha"]["value"], "nan");
  EXPECT_EQ(j.dump().find("total"), std::string::npos);
  EXPECT_EQ(j["seed"], 5);
}

TEST(Report, WritesAtomically) {
  const auto dir = std::filesystem::temp_directory_path() / "manistoch_report_test";
  std::filesystem::remove_all(dir);
  ExperimentReport r;
  r.id = "x";
  r.verdict("ok", true);
  r.table("data.csv", {"a"}).add(2);
  write_report(dir, r, "h", 1);
  EXPECT_EQ(slurp(dir / "data.csv"), "a\r\n2\r\n");
  EXPECT_NE(slurp(dir / "report.json").find("\"experiment\": \"x\""), std::string::npos);
  for (const auto& e : std::filesystem::directory_iterator(dir)) EXPECT_NE(e.path().extension(), ".tmp");
  std::filesystem::remove_all(dir);
}

TEST(Report, HashIsStable) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}
