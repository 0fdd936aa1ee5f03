#include <gtest/gtest.h>

#include <chrono>
#include <cmath>

#include "resq/assemble.hpp"
#include "resq/oracle.hpp"
#include "support.hpp"

using namespace resq;

class OracleAgreement : public ::testing::TestWithParam<const char*> {};

TEST_P(OracleAgreement, MatchesCombinedSolve) {
  const Scenario s = load_scenario(test::data_file(GetParam()));
  const auto t0 = std::chrono::steady_clock::now();
  const OracleResult o = fixed_point_oracle(s);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  ASSERT_TRUE(o.converged) << o.message;
  EXPECT_FALSE(o.oscillating);
  EXPECT_LT(secs, 1.0);

  const Assembly a = assemble(s);
  const SolutionBundle b = solve_scenario(s, a, 1e-10);
  ASSERT_TRUE(b.optimal());
  int compared = 0;
  for (const auto& [name, v] : o.primal) {
    const auto j = a.program.find_var(name);
    if (!j) continue;
    EXPECT_NEAR(v, b.primal[*j], 1e-4) << name;
    ++compared;
  }
  EXPECT_GT(compared, 0);
  for (const auto& [k, row] : a.clear_p) EXPECT_NEAR(o.rho.at(k), b.duals[row], 1e-4);
  for (const auto& [k, row] : a.clear_q) EXPECT_NEAR(o.alpha.at(k), b.duals[row], 1e-4);
}

INSTANTIATE_TEST_SUITE_P(Tiny, OracleAgreement,
                         ::testing::Values("tiny_dg_load.json", "tiny_two_stations.json", "tiny_v2g.json"));

TEST(Oracle, LargeStepIsFlaggedAsOscillating) {
  const Scenario s = load_scenario(test::data_file("tiny_dg_load.json"));
  OracleOptions o;
  o.damping = 10.0;
  o.max_iter = 400;
  const OracleResult r = fixed_point_oracle(s, o);
  EXPECT_FALSE(r.converged);
  EXPECT_TRUE(r.oscillating);
}

TEST(Oracle, RejectsLargeInstances) {
  const Scenario s = load_scenario(test::data_file("reference.json"));
  EXPECT_THROW(fixed_point_oracle(s), std::invalid_argument);
}

TEST(Oracle, RejectsBadOptions) {
  const Scenario s = load_scenario(test::data_file("tiny_dg_load.json"));
  OracleOptions o;
  o.damping = 0.0;
  EXPECT_THROW(fixed_point_oracle(s, o), std::invalid_argument);
}
