#include "resq/fleet.hpp"

#include <string>

#include "naming.hpp"

namespace resq {

using detail::key;

FleetBlock build_fleet_block(Program& p, const Scenario& s) {
  FleetBlock b;
  for (const auto& st : s.cs_map)
    for (int t = 1; t <= s.horizon; ++t) b.pcs[{st.dist_node, t}] = p.add_variable(key("pcs", st.dist_node, t));

  for (const EvGroup* g : s.active_groups()) {
    const int r = g->origin, e = g->cls;
    if (g->t_arr < 1 || g->t_dep > s.horizon || g->t_arr >= g->t_dep)
      throw ScenarioError("ev group (" + std::to_string(r) + "," + std::to_string(e) + "): dwell window outside horizon");
    if (s.cs_map.empty())
      throw ScenarioError("ev group (" + std::to_string(r) + "," + std::to_string(e) + "): no charging station");
    GroupVars gv;
    gv.group = g;
    std::vector<Term> fleet_sum;
    for (const auto& st : s.cs_map) {
      const int j = p.add_variable(key("qp", r, st.transport_node, e), 0.0, kInf, g->fleet / s.cs_map.size());
      gv.qp[st.transport_node] = j;
      fleet_sum.push_back({j, 1.0});
    }
    auto scaled = [&](double c) {
      std::vector<Term> out;
      for (const auto& t : fleet_sum) out.push_back({t.var, -c});
      return out;
    };
    for (int t = g->t_arr; t <= g->t_dep; ++t)
      gv.soc[t] = p.add_variable(key("soc", r, e, t), -kInf, kInf, g->fleet * g->soc_arr);

    const double pchg = s.solver.charger_kw;
    for (int t = g->t_arr + 1; t <= g->t_dep; ++t) {
      std::vector<Term> dyn{{gv.soc[t], 1.0}, {gv.soc[t - 1], -1.0}};
      for (const auto& st : s.cs_map) {
        const int i = st.dist_node;
        const int j = p.add_variable(key("p", i, r, e, t), -kInf, kInf, 0.0);
        gv.p[{i, t}] = j;
        dyn.push_back({j, 1.0 / g->capacity_kwh});
        if (pchg > 0.0) {
          const int q = gv.qp.at(st.transport_node);
          gv.chg_hi[{i, t}] = p.add_row(key("chg_hi", i, r, e, t), {{j, 1.0}, {q, -pchg}}, RowSense::LessEqual, 0.0);
          gv.chg_lo[{i, t}] = p.add_row(key("chg_lo", i, r, e, t), {{j, -1.0}, {q, -pchg}}, RowSense::LessEqual, 0.0);
        }
      }
      gv.soc_rows[t] = p.add_row(key("soc", r, e, t), std::move(dyn), RowSense::Equal, 0.0);
    }
    for (int t = g->t_arr; t <= g->t_dep; ++t) {
      auto lo = scaled(g->soc_min);
      lo.push_back({gv.soc[t], 1.0});
      gv.socmin[t] = p.add_row(key("socmin", r, e, t), std::move(lo), RowSense::GreaterEqual, 0.0);
      auto hi = scaled(g->soc_max);
      hi.push_back({gv.soc[t], 1.0});
      gv.socmax[t] = p.add_row(key("socmax", r, e, t), std::move(hi), RowSense::LessEqual, 0.0);
    }
    auto arr = scaled(g->soc_arr);
    arr.push_back({gv.soc[g->t_arr], 1.0});
    gv.arr = p.add_row(key("arr", r, e), std::move(arr), RowSense::Equal, 0.0);
    auto dep = scaled(g->soc_dep);
    dep.push_back({gv.soc[g->t_dep], 1.0});
    gv.dep = p.add_row(key("dep", r, e), std::move(dep), RowSense::GreaterEqual, 0.0);
    b.groups.push_back(std::move(gv));
  }

  for (const auto& st : s.cs_map) {
    const int i = st.dist_node;
    for (int t = 1; t <= s.horizon; ++t) {
      std::vector<Term> agg{{b.pcs.at({i, t}), 1.0}};
      for (const auto& gv : b.groups) {
        auto it = gv.p.find({i, t});
        if (it != gv.p.end()) agg.push_back({it->second, -1.0 / s.s_base_kva});
      }
      b.csagg[{i, t}] = p.add_row(key("csagg", i, t), std::move(agg), RowSense::Equal, 0.0);
    }
  }
  add_degradation_rows(p, s, b);
  return b;
}

void add_degradation_rows(Program& p, const Scenario& s, FleetBlock& b) {
  (void)s;
  for (auto& gv : b.groups) {
    const EvGroup& g = *gv.group;
    for (const auto& [it, j] : gv.p) {
      const auto [i, t] = it;
      const int d = p.add_variable(key("d", i, g.origin, g.cls, t), 0.0, kInf);
      gv.d[it] = d;
      gv.deg[it] = p.add_row(key("deg", i, g.origin, g.cls, t), {{d, 1.0}, {j, -g.c_deg}}, RowSense::GreaterEqual, 0.0);
    }
  }
}

std::map<int, std::vector<double>> station_injection_series(const Program& p, std::span<const double> primal,
                                                            const Scenario& s) {
  std::map<int, std::vector<double>> out;
  for (const auto& st : s.cs_map) {
    auto& series = out[st.dist_node];
    for (int t = 1; t <= s.horizon; ++t) {
      const auto j = p.find_var(key("pcs", st.dist_node, t));
      series.push_back(j ? primal[*j] : 0.0);
    }
  }
  return out;
}

}  // namespace resq
