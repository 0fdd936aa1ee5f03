#include <gtest/gtest.h>

#include <cmath>

#include "resq/assemble.hpp"
#include "resq/equilibrium.hpp"
#include "resq/traffic.hpp"
#include "support.hpp"

using namespace resq;

namespace {

struct Solved {
  Scenario s;
  Assembly a;
  SolutionBundle b;
};

Solved solve_file(const std::string& name) {
  Solved x{load_scenario(test::data_file(name)), {}, {}};
  x.a = assemble(x.s);
  x.b = solve_scenario(x.s, x.a, 1e-9);
  return x;
}

Solved solve_reference(double soc_dep) {
  Solved x{test::reference_with_soc_dep(soc_dep), {}, {}};
  x.a = assemble(x.s);
  x.b = solve_scenario(x.s, x.a, 1e-8);
  return x;
}

}  // namespace

class ReferenceCertificate : public ::testing::TestWithParam<double> {};

TEST_P(ReferenceCertificate, AllChecksPass) {
  const Solved r = solve_reference(GetParam());
  ASSERT_TRUE(r.b.optimal());
  const EquilibriumReport rep = verify_equilibrium(r.s, r.a, r.b);
  for (const auto& c : rep.checks) EXPECT_TRUE(c.pass) << c.name << " residual " << c.residual;
  EXPECT_TRUE(rep.wardrop_violations.empty());
}

INSTANTIATE_TEST_SUITE_P(SocDep, ReferenceCertificate, ::testing::Values(0.5, 0.6, 0.7));

TEST(Equilibrium, LogitSharesMatchFlows) {
  const Solved r = solve_reference(0.5);
  const EquilibriumReport rep = verify_equilibrium(r.s, r.a, r.b);
  const auto stations = r.s.stations();
  for (const EvGroup* g : r.s.active_groups()) {
    std::vector<double> tt, alpha;
    for (int st : stations) {
      tt.push_back(rep.tt.at({g->t_arr, g->origin, st}));
      alpha.push_back(rep.alpha.at({g->origin, st, g->cls}));
    }
    const auto sh = logit_shares(r.s, tt, alpha);
    for (std::size_t k = 0; k < stations.size(); ++k) {
      const double q = r.b.primal[r.a.program.var_index(
          "q[" + std::to_string(g->origin) + "," + std::to_string(stations[k]) + "," + std::to_string(g->cls) + "]")];
      EXPECT_NEAR(q / g->fleet, sh[k], 1e-6);
    }
  }
}

TEST(Equilibrium, TravelTimesAreShortestPaths) {
  // Every station is reachable over an uncongested path: tt >= free-flow minimum.
  const Solved r = solve_reference(0.7);
  const TravelTimeMap tt = recover_travel_times(r.s, r.a, r.b);
  EXPECT_FALSE(tt.empty());
  for (const auto& [k, v] : tt) EXPECT_GT(v, 0.0);
}

TEST(Equilibrium, PerturbedFlowsFailTheCertificate) {
  Solved r = solve_reference(0.5);
  for (const auto& [key, row] : r.a.clear_q) {
    const auto [o, st, e] = key;
    const int j =
        r.a.program.var_index("q[" + std::to_string(o) + "," + std::to_string(st) + "," + std::to_string(e) + "]");
    r.b.primal[j] *= 1.05;
  }
  const EquilibriumReport rep = verify_equilibrium(r.s, r.a, r.b);
  EXPECT_FALSE(rep.pass());
  const bool ev_or_logit = !rep.find("agent_ev")->pass || !rep.find("logit")->pass;
  EXPECT_TRUE(ev_or_logit);
}

TEST(Equilibrium, RecoveryNeedsAnOptimalBundle) {
  Solved r = solve_file("tiny_dg_load.json");
  r.b.status = SolveStatus::IterationLimit;
  EXPECT_THROW(recover_prices(r.a, r.b), std::logic_error);
  r.b.status = SolveStatus::Optimal;
  r.b.duals.pop_back();
  EXPECT_THROW(recover_incentives(r.a, r.b), std::logic_error);
}

TEST(Equilibrium, DisconnectedStationThrows) {
  Scenario s = load_scenario(test::data_file("tiny_two_stations.json"));
  s.road_links.pop_back();  // station 3 now unreachable
  EXPECT_ANY_THROW({
    const Assembly a = assemble(s);
    const SolutionBundle b = solve_scenario(s, a, 1e-8);
    recover_travel_times(s, a, b);
  });
}

TEST(TinyInstances, SymmetricStationsSplitEvenly) {
  const Solved r = solve_file("tiny_two_stations.json");
  ASSERT_TRUE(r.b.optimal());
  const Program& p = r.a.program;
  EXPECT_NEAR(r.b.primal[p.var_index("q[1,2,1]")], 5.0, 1e-6);
  EXPECT_NEAR(r.b.primal[p.var_index("q[1,3,1]")], 5.0, 1e-6);
  EXPECT_TRUE(verify_equilibrium(r.s, r.a, r.b).pass());
}

TEST(TinyInstances, V2gDischargesIntoTheShortage) {
  const Solved r = solve_file("tiny_v2g.json");
  ASSERT_TRUE(r.b.optimal());
  const EquilibriumReport rep = verify_equilibrium(r.s, r.a, r.b);
  EXPECT_TRUE(rep.pass());
  const Program& p = r.a.program;
  // Hour 3: DG capped at 0.5 pu under a 0.8 pu load, so the load sets the price.
  EXPECT_NEAR(rep.rho.at({1, 3}), 50.0, 1e-6);
  EXPECT_NEAR(r.b.primal[p.var_index("p[1,1,1,2]")], -100.0, 1e-5);
  EXPECT_NEAR(r.b.primal[p.var_index("p[1,1,1,3]")], 100.0, 1e-5);
  EXPECT_GT(rep.alpha.at({1, 2, 1}), 0.0);
}

TEST(TinyInstances, DgMarginalPriceCheck) {
  const Solved r = solve_file("tiny_dg_load.json");
  const EquilibriumReport rep = verify_equilibrium(r.s, r.a, r.b);
  ASSERT_NE(rep.find("dg_marginal_price"), nullptr);
  EXPECT_TRUE(rep.find("dg_marginal_price")->pass);
  EXPECT_EQ(rep.find("no_such_check"), nullptr);
}

TEST(Equilibrium, ReportTextEndsWithVerdict) {
  const Solved r = solve_file("tiny_dg_load.json");
  const std::string text = verify_equilibrium(r.s, r.a, r.b).to_text();
  EXPECT_NE(text.find("overall PASS"), std::string::npos) << text;
}

class TightTolerance : public ::testing::TestWithParam<const char*> {};

TEST_P(TightTolerance, CertificateStillHolds) {
  // Agent re-solves at near-exact prices used to run complementarity into underflow.
  const Scenario s = load_scenario(test::data_file(GetParam()));
  const Assembly a = assemble(s);
  const SolutionBundle b = solve_scenario(s, a, 1e-10);
  ASSERT_TRUE(b.optimal());
  EXPECT_TRUE(verify_equilibrium(s, a, b).pass());
}

INSTANTIATE_TEST_SUITE_P(Tiny, TightTolerance,
                         ::testing::Values("tiny_dg_load.json", "tiny_two_stations.json", "tiny_v2g.json"));
