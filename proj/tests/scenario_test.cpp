#include <gtest/gtest.h>

#include <string>

#include "resq/scenario.hpp"
#include "support.hpp"

using namespace resq;

namespace {

const char* kMinimal = R"({
  "base": {"s_base_kva": 100, "horizon": 2},
  "dist_nodes": [
    {"id": 2, "load": true, "weight": 10, "p_load": [0.5, 0.4], "q_load": [0.1, 0.08]},
    {"id": 1, "dg": true}
  ],
  "dist_lines": [{"id": 1, "from": 1, "to": 2, "r": 0.01, "x": 0.01, "s_max": 1}],
  "dg_units": [{"node": 1, "p_max": 1, "c1": 1}]
})";

std::string error_of(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ScenarioError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(ScenarioLoader, ScalarsBroadcastToHourlySeries) {
  const Scenario s = parse_scenario(kMinimal);
  EXPECT_EQ(s.horizon, 2);
  ASSERT_EQ(s.dg_units.size(), 1u);
  EXPECT_EQ(s.dg_units[0].p_max, (HourlySeries{1.0, 1.0}));
  EXPECT_EQ(s.node(2).p_load, (HourlySeries{0.5, 0.4}));
  EXPECT_DOUBLE_EQ(s.node(2).v_min, 0.95);
}

TEST(ScenarioLoader, NodesAreSortedById) {
  const Scenario s = parse_scenario(kMinimal);
  ASSERT_EQ(s.dist_nodes.size(), 2u);
  EXPECT_EQ(s.dist_nodes[0].id, 1);
  EXPECT_EQ(s.dist_nodes[1].id, 2);
}

TEST(ScenarioLoader, SerializeRoundTrips) {
  const Scenario s = load_scenario(test::data_file("reference.json"));
  EXPECT_EQ(parse_scenario(serialize_scenario(s)), s);
}

TEST(ScenarioLoader, SyntaxErrorReportsLine) {
  const std::string msg = error_of("{\n  \"base\": {\n    \"horizon\": ,\n  }\n}");
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
}

TEST(ScenarioLoader, MissingFieldReportsPath) {
  std::string text = kMinimal;
  text.replace(text.find("\"s_max\": 1"), 10, "\"smax\": 1");
  const std::string msg = error_of(text);
  EXPECT_NE(msg.find("dist_lines[0].s_max"), std::string::npos) << msg;
}

TEST(ScenarioLoader, SeriesOfWrongLengthIsRejected) {
  std::string text = kMinimal;
  text.replace(text.find("[0.5, 0.4]"), 10, "[0.5, 0.4, 0.3]");
  EXPECT_THROW(parse_scenario(text), ScenarioError);
}

TEST(ScenarioLoader, UnknownNodeReferenceIsRejected) {
  std::string text = kMinimal;
  text.replace(text.find("\"to\": 2"), 7, "\"to\": 9");
  const std::string msg = error_of(text);
  EXPECT_NE(msg.find("dist_lines[0].to"), std::string::npos) << msg;
}

TEST(ScenarioLoader, MissingFileThrows) {
  EXPECT_THROW(load_scenario("/nonexistent/scenario.json"), ScenarioError);
}

TEST(ScenarioValidation, ReferenceScenarioIsClean) {
  EXPECT_TRUE(validate_scenario(load_scenario(test::data_file("reference.json"))).empty());
}

TEST(ScenarioValidation, FlagsConvexityAndBands) {
  Scenario s = parse_scenario(kMinimal);
  s.dg_units[0].c2 = -1.0;
  s.dist_nodes[0].v_min = 1.1;
  const auto v = validate_scenario(s);
  EXPECT_GE(v.size(), 2u);
}

TEST(LineStatus, OutageWindowIsHalfOpen) {
  const Scenario s = load_scenario(test::data_file("reference.json"));
  EXPECT_EQ(line_status(s, 1, 9), 1);
  EXPECT_EQ(line_status(s, 1, 10), 0);
  EXPECT_EQ(line_status(s, 1, 19), 0);
  EXPECT_EQ(line_status(s, 1, 20), 1);
  EXPECT_EQ(line_status(s, 2, 15), 1);
  EXPECT_THROW(line_status(s, 7, 1), std::out_of_range);
  EXPECT_THROW(line_status(s, 1, 25), std::out_of_range);
}
