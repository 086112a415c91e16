#include <gtest/gtest.h>

#include "dirifs/config.hpp"

using namespace dirifs;

namespace {

json cantor_json() {
  return json::parse(R"({
    "ifs": {"f": {"rate": {"num": 1, "den": 3}, "shift": {"num": 0, "den": 1}},
            "g": {"rate": {"num": 1, "den": 3}, "shift": {"num": 2, "den": 3}}},
    "m": 3, "c": {"num": 1, "den": 4}, "M": [3, 9, 90]
  })");
}

std::string error_path(const json& j) {
  try {
    RunConfig::from_json(j);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<none>";
}

}  // namespace

TEST(Config, ParsesAndRoundTrips) {
  RunConfig cfg = RunConfig::from_json(cantor_json());
  EXPECT_EQ(cfg.m, 3);
  EXPECT_EQ(cfg.c, Rational(1, 4));
  EXPECT_EQ(cfg.M, (std::vector<std::int64_t>{3, 9, 90}));
  EXPECT_EQ(cfg.g.shift, Rational(2, 3));
  EXPECT_FALSE(cfg.omega.has_value());
  RunConfig again = RunConfig::from_json(cfg.to_json());
  EXPECT_EQ(cfg, again);
  EXPECT_EQ(cfg.canonical(), again.canonical());
  EXPECT_EQ(cfg.params().M, cfg.M);
}

TEST(Config, OptionalFieldsAndBigIntegers) {
  json j = cantor_json();
  j["omega"] = {{"num", 1}, {"den", 3}};
  j["overrides"] = {{"N", 2}, {"ell", 3}, {"kmax", 2}, {"scan_cap", 1000}, {"refine_cap", 5}};
  j["output_dir"] = "runs";
  j["c"] = {{"num", "1"}, {"den", "100000000000000000000000"}};
  RunConfig cfg = RunConfig::from_json(j);
  EXPECT_EQ(*cfg.omega, Rational(1, 3));
  EXPECT_EQ(*cfg.N, 2);
  EXPECT_EQ(*cfg.ell, 3);
  EXPECT_EQ(*cfg.kmax, 2);
  EXPECT_EQ(cfg.scan_cap, 1000u);
  EXPECT_EQ(cfg.refine_cap, 5);
  EXPECT_EQ(cfg.c.den().get_str(), "100000000000000000000000");
  EXPECT_EQ(RunConfig::from_json(cfg.to_json()), cfg);
}

TEST(Config, FieldPreciseErrors) {
  json j = cantor_json();
  j.erase("m");
  EXPECT_EQ(error_path(j), ".m");
  j = cantor_json();
  j["M"] = {3, 3};
  EXPECT_EQ(error_path(j), ".M[1]");
  j = cantor_json();
  j["M"] = {3, -1};
  EXPECT_EQ(error_path(j), ".M[1]");
  j = cantor_json();
  j["M"] = json::array();
  EXPECT_EQ(error_path(j), ".M");
  j = cantor_json();
  j["c"] = {{"num", 3}, {"den", 2}};
  EXPECT_EQ(error_path(j), ".c");
  j = cantor_json();
  j["c"]["den"] = 0;
  EXPECT_EQ(error_path(j), ".c.den");
  j = cantor_json();
  j["ifs"]["g"]["rate"] = {{"num", 3}, {"den", 2}};
  EXPECT_EQ(error_path(j), ".ifs.g.rate");
  j = cantor_json();
  j["ifs"]["f"].erase("shift");
  EXPECT_EQ(error_path(j), ".ifs.f.shift");
  j = cantor_json();
  j["ifs"]["f"]["rate"] = {{"num", 2}, {"den", 4}};
  EXPECT_EQ(RunConfig::from_json(j).f.rate, Rational(1, 2));
  j = cantor_json();
  j["omega"] = {{"num", 1}, {"den", 5}};
  EXPECT_EQ(error_path(j), ".omega");
  j = cantor_json();
  j["overrides"] = {{"kmax", 9}};
  EXPECT_EQ(error_path(j), ".overrides.kmax");
  j = cantor_json();
  j["overrides"] = {{"N", "x"}};
  EXPECT_EQ(error_path(j), ".overrides.N");
  j = cantor_json();
  j["m"] = 1;
  EXPECT_EQ(error_path(j), ".m");
  EXPECT_EQ(error_path(json::array()), "");
}

TEST(Config, HashIgnoresOutputDirAndKeyOrder) {
  RunConfig a = RunConfig::from_json(cantor_json());
  json j = cantor_json();
  j["output_dir"] = "elsewhere";
  RunConfig b = RunConfig::from_json(j);
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_EQ(a.hash().size(), 16u);
  json reordered = json::parse(R"({"M": [3, 9, 90], "c": {"den": 4, "num": 1}, "m": 3,
    "ifs": {"g": {"shift": {"den": 3, "num": 2}, "rate": {"den": 3, "num": 1}},
            "f": {"shift": {"den": 1, "num": 0}, "rate": {"den": 3, "num": 1}}}})");
  EXPECT_EQ(RunConfig::from_json(reordered).hash(), a.hash());
  j = cantor_json();
  j["M"] = {3, 9, 91};
  EXPECT_NE(RunConfig::from_json(j).hash(), a.hash());
}
