#include <gtest/gtest.h>

#include <cmath>

#include "resq/assemble.hpp"
#include "resq/fleet.hpp"
#include "support.hpp"

using namespace resq;

namespace {

struct Solved {
  Scenario s;
  Assembly a;
  SolutionBundle b;
};

Solved solve_reference(double soc_dep) {
  Solved x{test::reference_with_soc_dep(soc_dep), {}, {}};
  x.a = assemble(x.s);
  x.b = solve_scenario(x.s, x.a, 1e-8);
  return x;
}

}  // namespace

class SocTelescoping : public ::testing::TestWithParam<double> {};

TEST_P(SocTelescoping, EndpointDifferenceEqualsNetCharge) {
  const Solved r = solve_reference(GetParam());
  ASSERT_TRUE(r.b.optimal());
  const auto& x = r.b.primal;
  for (const auto& gv : r.a.fleet.groups) {
    const EvGroup& g = *gv.group;
    double net = 0.0;  // kWh into the batteries
    for (const auto& [it, j] : gv.p) net -= x[j];
    const double lhs = x[gv.soc.at(g.t_dep)] - x[gv.soc.at(g.t_arr)];
    EXPECT_LE(std::abs(lhs - net / g.capacity_kwh), 1e-8) << "group " << g.origin << "," << g.cls;
    EXPECT_NEAR(x[gv.soc.at(g.t_arr)], g.soc_arr * g.fleet, 1e-8);
    EXPECT_GE(x[gv.soc.at(g.t_dep)], g.soc_dep * g.fleet - 1e-8);
  }
}

INSTANTIATE_TEST_SUITE_P(Reference, SocTelescoping, ::testing::Values(0.5, 0.7));

TEST(FleetBlock, ChargerLimitScalesWithArrivals) {
  const Solved r = solve_reference(0.7);
  const auto& x = r.b.primal;
  const double kw = r.s.solver.charger_kw;
  for (const auto& gv : r.a.fleet.groups)
    for (const auto& [it, j] : gv.p) {
      const int station = r.s.station_of_dist_node(it.first);
      EXPECT_LE(std::abs(x[j]), kw * x[gv.qp.at(station)] + 1e-7);
    }
}

TEST(FleetBlock, StationPowerAggregatesGroups) {
  const Solved r = solve_reference(0.5);
  const auto& x = r.b.primal;
  for (const auto& [it, j] : r.a.fleet.pcs) {
    double sum = 0.0;
    for (const auto& gv : r.a.fleet.groups)
      if (auto f = gv.p.find(it); f != gv.p.end()) sum += x[f->second];
    EXPECT_LE(std::abs(x[j] * r.s.s_base_kva - sum), 1e-8);
  }
}

TEST(FleetBlock, DegradationIsEpigraphOfDischarge) {
  const Solved r = solve_reference(0.5);
  const auto& x = r.b.primal;
  for (const auto& gv : r.a.fleet.groups)
    for (const auto& [it, d] : gv.d) {
      const double expect = gv.group->c_deg * std::max(0.0, x[gv.p.at(it)]);
      EXPECT_NEAR(x[d], expect, 1e-8);
    }
}

TEST(FleetBlock, ZeroFleetGroupsAreSkipped) {
  Scenario s = test::reference_with_soc_dep(0.7);
  const std::size_t before = s.active_groups().size();
  s.ev_groups[0].fleet = 0.0;
  Program p;
  const FleetBlock b = build_fleet_block(p, s);
  EXPECT_EQ(b.groups.size(), before - 1);
}

TEST(FleetBlock, LowerTargetFreesMoreStationEnergyDuringOutage) {
  auto outage_injection = [](const Solved& r) {
    double sum = 0.0;
    for (const auto& [it, j] : r.a.fleet.pcs)
      if (line_status(r.s, 1, it.second) == 0) sum += r.b.primal[j];
    return sum;
  };
  EXPECT_GT(outage_injection(solve_reference(0.5)), outage_injection(solve_reference(0.7)) + 1e-6);
}
