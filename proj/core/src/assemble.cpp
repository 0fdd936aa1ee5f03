#include "resq/assemble.hpp"

#include "naming.hpp"

namespace resq {

using detail::key;

Assembly assemble(const Scenario& s) {
  if (auto v = validate_scenario(s); !v.empty()) throw ScenarioError("invalid scenario: " + v.front());
  Assembly a;
  Program& p = a.program;

  for (int t = 1; t <= s.horizon; ++t) {
    PowerBlock b = build_power_block(p, s, t);
    for (const auto& n : s.dist_nodes) {
      const NodeVars& nv = b.nodes.at(n.id);
      if (nv.pd >= 0) p.add_linear_cost(nv.pd, -n.weight[t - 1]);
    }
    for (const auto& u : s.dg_units) {
      const int j = b.nodes.at(u.node).pdg;
      p.add_linear_cost(j, u.c1);
      if (u.c2 > 0.0) p.add_quadratic_cost(j, u.c2);
    }
    a.power.push_back(std::move(b));
  }

  a.fleet = build_fleet_block(p, s);
  for (const auto& gv : a.fleet.groups)
    for (const auto& [it, d] : gv.d) p.add_linear_cost(d, 1.0);

  const double weight = s.behavior.beta1 / s.behavior.beta2;
  for (int tau : s.arrival_hours()) a.traffic.push_back(build_traffic_block(p, s, tau, weight));

  for (const auto& n : s.dist_nodes) {
    if (!n.is_dg && !n.is_cs) continue;
    for (int t = 1; t <= s.horizon; ++t) {
      const NodeVars& nv = a.power[t - 1].nodes.at(n.id);
      std::vector<Term> row{{nv.ps, 1.0}};
      if (nv.pdg >= 0) row.push_back({nv.pdg, -1.0});
      if (auto it = a.fleet.pcs.find({n.id, t}); it != a.fleet.pcs.end()) row.push_back({it->second, -1.0});
      a.clear_p[{n.id, t}] = p.add_row(key("clear_p", n.id, t), std::move(row), RowSense::Equal, 0.0);
    }
  }

  for (const auto& tb : a.traffic) {
    for (const auto& dv : tb.q) {
      const EvGroup& g = *dv.group;
      const GroupVars* gv = nullptr;
      for (const auto& x : a.fleet.groups)
        if (x.group == dv.group) gv = &x;
      if (!gv) throw std::logic_error("traffic group missing from fleet block");
      a.clear_q[{g.origin, dv.station, g.cls}] =
          p.add_row(key("clear_q", g.origin, dv.station, g.cls), {{gv->qp.at(dv.station), 1.0}, {dv.q, -1.0}},
                    RowSense::Equal, 0.0);
    }
  }
  return a;
}

SolutionBundle solve_scenario(const Scenario& s, const Assembly& a, double tol) {
  SolverOptions o;
  o.gap_tol = tol;
  o.max_iter = s.solver.max_iter;
  return solve(a.program, o);
}

}  // namespace resq
