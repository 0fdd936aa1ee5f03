#include <gtest/gtest.h>

#include <cmath>

#include "resq/assemble.hpp"
#include "resq/equilibrium.hpp"
#include "resq/power.hpp"
#include "support.hpp"

using namespace resq;

namespace {

struct Solved {
  Scenario s;
  Assembly a;
  SolutionBundle b;
};

const Solved& reference() {
  static const Solved* r = [] {
    auto* x = new Solved{test::reference_with_soc_dep(0.7), {}, {}};
    x->a = assemble(x->s);
    x->b = solve_scenario(x->s, x->a, 1e-8);
    return x;
  }();
  return *r;
}

}  // namespace

TEST(PowerBlock, OutagedLineCarriesNoFlow) {
  const Solved& r = reference();
  ASSERT_TRUE(r.b.optimal());
  int checked = 0;
  for (const auto& pb : r.a.power) {
    for (const auto& l : r.s.dist_lines) {
      if (line_status(r.s, l.id, pb.hour) == 1) continue;
      const LineVars& lv = pb.lines.at(l.id);
      EXPECT_LE(std::abs(r.b.primal[lv.pf]), 1e-8) << "line " << l.id << " hour " << pb.hour;
      EXPECT_LE(std::abs(r.b.primal[lv.qf]), 1e-8) << "line " << l.id << " hour " << pb.hour;
      ++checked;
    }
  }
  EXPECT_EQ(checked, 10);
}

TEST(PowerBlock, VoltageDropHoldsOnInServiceLines) {
  const Solved& r = reference();
  for (const auto& pb : r.a.power) {
    for (const auto& l : r.s.dist_lines) {
      if (line_status(r.s, l.id, pb.hour) == 0) continue;
      const auto& x = r.b.primal;
      const LineVars& lv = pb.lines.at(l.id);
      const double vf = x[pb.nodes.at(l.from).v], vt = x[pb.nodes.at(l.to).v];
      const double drop = vf - vt - 2.0 * (l.r * x[lv.pf] + l.x * x[lv.qf]);
      EXPECT_LE(std::abs(drop), 1e-8) << "line " << l.id << " hour " << pb.hour;
    }
  }
}

TEST(PowerBlock, BalanceAndPowerFactorRows) {
  const Solved& r = reference();
  const Program& p = r.a.program;
  for (const auto& pb : r.a.power) {
    for (const auto& [node, row] : pb.pbal) EXPECT_LE(std::abs(p.row_violation(row, r.b.primal)), 1e-8);
    for (const auto& [node, row] : pb.qbal) EXPECT_LE(std::abs(p.row_violation(row, r.b.primal)), 1e-8);
    for (const auto& [node, row] : pb.pfac) {
      const DistNode& n = r.s.node(node);
      const NodeVars& nv = pb.nodes.at(node);
      const double pbar = n.p_load[pb.hour - 1], qbar = n.q_load[pb.hour - 1];
      EXPECT_LE(std::abs(r.b.primal[nv.qd] * pbar - r.b.primal[nv.pd] * qbar), 1e-8);
    }
  }
}

TEST(PowerBlock, RowCountsForOneHour) {
  const Scenario s = load_scenario(test::data_file("reference.json"));
  Program p;
  const PowerBlock b = build_power_block(p, s, 1);
  EXPECT_EQ(b.pbal.size() + b.qbal.size(), 8u);
  EXPECT_EQ(b.cone.size(), 3u);
  EXPECT_EQ(b.vdrop_ub.size() + b.vdrop_lb.size(), 6u);
  EXPECT_EQ(b.voltage_bands, 4);
  Program q;
  const PowerBlock out = build_power_block(q, s, 12);
  EXPECT_EQ(out.cone.size(), 2u);
  EXPECT_EQ(out.cone_pf.size(), 1u);
}

TEST(PowerBlock, LineFlowsRespectRating) {
  const Solved& r = reference();
  for (const auto& pb : r.a.power)
    for (const auto& l : r.s.dist_lines) {
      const LineVars& lv = pb.lines.at(l.id);
      EXPECT_LE(std::hypot(r.b.primal[lv.pf], r.b.primal[lv.qf]), l.s_max + 1e-8);
    }
}

TEST(PowerBlock, BigKCoversVoltageSpreadAndFlowTerm) {
  DistLine l{1, 1, 2, 0.02, 0.01, 1.5};
  DistNode a, b;
  a.v_min = 0.9;
  a.v_max = 1.1;
  b.v_min = 0.95;
  b.v_max = 1.05;
  const double spread = 1.1 * 1.1 - 0.95 * 0.95;
  EXPECT_NEAR(compute_bigK(l, a, b), spread + 2 * 0.03 * std::sqrt(2.0) * 1.5, 1e-14);
  // With an outage, any voltages in band and any flows within the rating satisfy the pair.
  const double k = compute_bigK(l, a, b);
  for (double vf : {0.81, 1.21})
    for (double vt : {0.9025, 1.1025})
      for (double pf : {-1.5, 1.5})
        for (double qf : {-1.5, 1.5}) {
          const double d = vf - vt - 2 * (l.r * pf / std::sqrt(2.0) + l.x * qf / std::sqrt(2.0));
          EXPECT_LE(std::abs(d), k);
        }
}

TEST(PowerBlock, ReactiveLoadWithoutActiveLoadThrows) {
  Scenario s = load_scenario(test::data_file("tiny_dg_load.json"));
  s.dist_nodes[1].p_load[0] = 0.0;
  Program p;
  EXPECT_THROW(build_power_block(p, s, 1), ScenarioError);
  EXPECT_THROW(build_power_block(p, s, 2), std::out_of_range);
}

TEST(PowerBlock, GenerationPartOnlyHasDgVariables) {
  const Scenario s = load_scenario(test::data_file("tiny_dg_load.json"));
  Program p;
  const PowerBlock b = build_power_block(p, s, 1, PowerParts::Generation);
  EXPECT_EQ(p.num_variables(), 1);
  EXPECT_EQ(p.num_rows(), 0);
  EXPECT_GE(b.nodes.at(1).pdg, 0);
}

TEST(DgLoad, PriceEqualsMarginalCost) {
  // A 2 $/pu-h generator serving a 50 $/pu-h load over a lossless line.
  const Scenario s = load_scenario(test::data_file("tiny_dg_load.json"));
  const Assembly a = assemble(s);
  const SolutionBundle b = solve_scenario(s, a, 1e-10);
  ASSERT_TRUE(b.optimal());
  const auto rho = recover_prices(a, b);
  EXPECT_NEAR(rho.at({1, 1}), 2.0, 1e-7);
  const Program& p = a.program;
  EXPECT_NEAR(b.primal[p.var_index("pd[2,1]")], 1.0, 1e-8);
  EXPECT_NEAR(b.primal[p.var_index("pdg[1,1]")], 1.0, 1e-8);
  EXPECT_NEAR(b.primal_objective, 50.0 - 2.0, 1e-7);
}

TEST(LoadMetrics, LossIsExpectedMinusServed) {
  const Solved& r = reference();
  const LoadMetrics m = served_load_metrics(r.a.program, r.b.primal, r.s);
  double loss = 0.0;
  for (const auto& n : r.s.dist_nodes)
    if (n.is_load)
      for (int t = 1; t <= r.s.horizon; ++t) loss += n.p_load[t - 1] - m.served.at(n.id)[t - 1];
  EXPECT_NEAR(m.total_load_loss, loss, 1e-12);
  EXPECT_GT(m.total_load_loss, 0.0);
}
