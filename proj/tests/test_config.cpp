#include <gtest/gtest.h>

#include "pgrid/config.hpp"

using namespace pgrid;
using nlohmann::json;

TEST(Config, Defaults) {
  auto c = config_from_json(json::object());
  EXPECT_EQ(c.params.dim(), 3u);
  EXPECT_EQ(c.room.dim(), 3u);
  EXPECT_EQ(c.thetas().size(), c.theta_db.size());
  EXPECT_NEAR(c.thetas()[2], 1.0, 1e-15);
}

TEST(Config, RoundTrip) {
  auto j = json::parse(R"({
    "params": {"mu": [1, 1, 1], "lambda": [0.1, 0.1, 0.1], "k_db": [-10, -10, "-inf"]},
    "sim": {"samples": 1000, "seed": 42, "perspective": "user"},
    "scenario": {"kind": "finite", "extents": [3, null, "inf", 2, 4, null], "oob": [0, 1, 0, 0, 0, 0]},
    "channel": "nofading", "theta_db": [0, 10], "room": [1, 0, 0], "sigma2": 0.01
  })");
  auto c = config_from_json(j);
  EXPECT_NEAR(c.params.k[0], 0.1, 1e-15);
  EXPECT_EQ(c.params.k[2], 0.0);
  EXPECT_EQ(c.sim.perspective, Perspective::TypicalUser);
  EXPECT_EQ(c.scenario.kind, ScenarioKind::FiniteBuilding);
  EXPECT_EQ(c.scenario.extents.d[0], 3.0);
  EXPECT_TRUE(std::isinf(c.scenario.extents.d[1]));
  auto again = config_from_json(to_json(c));
  EXPECT_EQ(to_json(again).dump(), to_json(c).dump());
}

TEST(Config, RejectsUnknownKeys) {
  EXPECT_THROW(config_from_json(json::parse(R"({"bogus": 1})")), config_error);
  EXPECT_THROW(config_from_json(json::parse(R"({"sim": {"sample": 10}})")), config_error);
  EXPECT_THROW(config_from_json(json::parse(R"({"scenario": {"kind": "finite", "extent": []}})")), config_error);
}

TEST(Config, RejectsInvalidValues) {
  EXPECT_THROW(config_from_json(json::parse(R"({"params": {"mu": [1,1,1], "lambda": [0.1,0.1,0.1], "k": [1.0, 0.1, 0.1]}})")),
               config_error);
  EXPECT_THROW(config_from_json(json::parse(R"({"sim": {"samples": 0}})")), config_error);
  EXPECT_THROW(config_from_json(json::parse(R"({"sim": {"perspective": "corner"}})")), config_error);
  EXPECT_THROW(config_from_json(json::parse(R"({"room": [1, 0]})")), config_error);
  EXPECT_THROW(config_from_json(json::parse(R"({"channel": "ricean"})")), config_error);
  EXPECT_THROW(config_from_json(json::parse(R"({"nu": "one"})")), config_error);
  EXPECT_THROW(config_from_json(json::parse(R"({"scenario": {"lw": 0.5, "lw_db": -3}})")), config_error);
  EXPECT_THROW(load_config("/nonexistent/pgrid.json"), config_error);
}
