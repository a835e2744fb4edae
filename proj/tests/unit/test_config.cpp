#include <gtest/gtest.h>

#include <fstream>

#include "manistoch.hpp"

using namespace manistoch;

namespace {

bool has_error(const std::vector<Diagnostic>& d, const std::string& needle) {
  for (const auto& x : d) {
    if (x.error && x.message.find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST(Config, DefaultsValidate) { EXPECT_FALSE(has_errors(validate(Config{}))); }

TEST(Config, BundledFileMatchesDefaults) {
  const auto cfg = load_config(std::string(MANISTOCH_SOURCE_DIR) + "/configs/default.ini");
  EXPECT_EQ(to_text(cfg), to_text(Config{}));
  EXPECT_TRUE(validate(cfg).empty());
}

TEST(Config, ParsesSectionsListsAndComments) {
  const auto cfg = parse_config(
      "# comment\n"
      "[general]\n"
      "seed = 7   ; trailing\n"
      "manifold = torus2\n"
      "[stability]\n"
      "delta_grid = 0.1, 0.2\n"
      "[rough]\n"
      "sobolev_claim = false\n");
  EXPECT_EQ(cfg.general.seed, 7u);
  EXPECT_EQ(cfg.general.manifold, "torus2");
  EXPECT_EQ(cfg.stability.delta_grid, (std::vector<double>{0.1, 0.2}));
  EXPECT_FALSE(cfg.rough.sobolev_claim);
}

TEST(Config, ErrorsCarryLineNumbers) {
  try {
    parse_config("[general]\nseed = 1\nbogus = 3\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line, 3);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  try {
    parse_config("[general]\nthreads = many\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line, 2);
  }
  EXPECT_THROW(parse_config("[nowhere]\n"), ConfigError);
  EXPECT_THROW(parse_config("seed = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("[general\n"), ConfigError);
}

TEST(Config, MissingFileIsConfigError) { EXPECT_THROW(load_config("/nonexistent/missing.toml"), ConfigError); }

TEST(Config, Overrides) {
  Config cfg;
  apply_override(cfg, "cauchy.n_paths=9");
  apply_override(cfg, "wong_zakai.levels=8,16");
  EXPECT_EQ(cfg.cauchy.n_paths, 9);
  EXPECT_EQ(cfg.wong_zakai.levels, (std::vector<int>{8, 16}));
  EXPECT_THROW(apply_override(cfg, "cauchy.nothing=1"), ConfigError);
  EXPECT_THROW(apply_override(cfg, "novalue"), ConfigError);
}

TEST(Config, RoughExponentCheck) {
  Config cfg;
  cfg.rough.gamma = 0.2;
  cfg.rough.p = 2.0;
  EXPECT_TRUE(has_error(validate(cfg), "p(1-gamma) >= 1: field not in H^p_1"));
  cfg.rough.sobolev_claim = false;
  EXPECT_FALSE(has_errors(validate(cfg)));
}

TEST(Config, StepLargerThanHorizon) {
  Config cfg;
  cfg.flow.dt = 2.0;
  EXPECT_TRUE(has_error(validate(cfg), "dt > T"));
}

TEST(Config, DeskScaleWarning) {
  Config cfg;
  cfg.quasi_invariance.n_points = 100000;
  const auto d = validate(cfg);
  EXPECT_FALSE(has_errors(d));
  EXPECT_FALSE(d.empty());
}

TEST(Config, TextRoundTrip) {
  Config cfg;
  cfg.general.seed = 99;
  cfg.density.T_grid = {0.3, 0.6};
  EXPECT_EQ(to_text(parse_config(to_text(cfg))), to_text(cfg));
}
