#include "resq/power.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "naming.hpp"

namespace resq {

using detail::key;

double compute_bigK(const DistLine& line, const DistNode& from, const DistNode& to) {
  const double spread = std::max(from.v_max * from.v_max - to.v_min * to.v_min,
                                 to.v_max * to.v_max - from.v_min * from.v_min);
  return spread + 2.0 * (line.r + line.x) * std::sqrt(2.0) * line.s_max;
}

double dg_cost(const DgUnit& u, double p) { return u.c1 * p + u.c2 * p * p; }

PowerBlock build_power_block(Program& p, const Scenario& s, int t, PowerParts parts) {
  if (t < 1 || t > s.horizon) throw std::out_of_range("hour " + std::to_string(t) + " outside horizon");
  PowerBlock b;
  b.hour = t;
  const bool network = parts != PowerParts::Generation;
  const bool generation = parts != PowerParts::Network;

  if (generation) {
    for (const auto& u : s.dg_units) {
      const double lo = std::max(0.0, u.p_min[t - 1]);
      b.nodes[u.node].pdg = p.add_variable(key("pdg", u.node, t), lo, u.p_max[t - 1]);
    }
  }
  if (!network) return b;

  for (const auto& n : s.dist_nodes) {
    NodeVars& nv = b.nodes[n.id];
    if (n.is_load) {
      const double pbar = n.p_load[t - 1];
      const double qbar = n.q_load[t - 1];
      if (pbar <= 0.0 && qbar != 0.0)
        throw ScenarioError("dist_nodes: node " + std::to_string(n.id) + " hour " + std::to_string(t) +
                            ": undefined power factor");
      nv.pd = p.add_variable(key("pd", n.id, t), 0.0, std::max(pbar, 0.0));
      if (pbar > 0.0) {
        nv.qd = p.add_variable(key("qd", n.id, t));
        b.pfac[n.id] = p.add_row(key("pfac", n.id, t), {{nv.qd, 1.0}, {nv.pd, -qbar / pbar}}, RowSense::Equal, 0.0);
      } else {
        nv.qd = p.add_variable(key("qd", n.id, t), 0.0, 0.0);
      }
    }
    if (n.is_dg || n.is_cs) {
      nv.ps = p.add_variable(key("ps", n.id, t));
      nv.qs = p.add_variable(key("qs", n.id, t));
    }
    nv.v = p.add_variable(key("v", n.id, t), n.v_min * n.v_min, n.v_max * n.v_max);
    ++b.voltage_bands;
  }

  for (const auto& l : s.dist_lines) {
    LineVars lv;
    lv.pf = p.add_variable(key("pf", l.id, t));
    lv.qf = p.add_variable(key("qf", l.id, t));
    b.lines[l.id] = lv;
    const int lambda = line_status(s, l.id, t);
    if (lambda == 1) {
      b.cone[l.id] = p.add_quadratic_row(key("cone", l.id, t), {}, {{lv.pf, 1.0}, {lv.qf, 1.0}}, l.s_max * l.s_max);
    } else {
      // pf^2 + qf^2 <= 0 has no interior; pin both flows instead.
      b.cone_pf[l.id] = p.add_row(key("cone_pf", l.id, t), {{lv.pf, 1.0}}, RowSense::Equal, 0.0);
      b.cone_qf[l.id] = p.add_row(key("cone_qf", l.id, t), {{lv.qf, 1.0}}, RowSense::Equal, 0.0);
    }
    const double k = compute_bigK(l, s.node(l.from), s.node(l.to));
    b.big_k[l.id] = k;
    const int vf = b.nodes.at(l.from).v, vt = b.nodes.at(l.to).v;
    std::vector<Term> drop{{vf, 1.0}, {vt, -1.0}, {lv.pf, -2.0 * l.r}, {lv.qf, -2.0 * l.x}};
    b.vdrop_ub[l.id] = p.add_row(key("vdrop_ub", l.id, t), drop, RowSense::LessEqual, (1 - lambda) * k);
    b.vdrop_lb[l.id] = p.add_row(key("vdrop_lb", l.id, t), drop, RowSense::GreaterEqual, -(1 - lambda) * k);
  }

  for (const auto& n : s.dist_nodes) {
    const NodeVars& nv = b.nodes.at(n.id);
    std::vector<Term> pt, qt;
    for (const auto& l : s.dist_lines) {
      const LineVars& lv = b.lines.at(l.id);
      if (l.to == n.id) {
        pt.push_back({lv.pf, 1.0});
        qt.push_back({lv.qf, 1.0});
      }
      if (l.from == n.id) {
        pt.push_back({lv.pf, -1.0});
        qt.push_back({lv.qf, -1.0});
      }
    }
    if (nv.pd >= 0) {
      pt.push_back({nv.pd, -1.0});
      qt.push_back({nv.qd, -1.0});
    }
    if (nv.ps >= 0) {
      pt.push_back({nv.ps, 1.0});
      qt.push_back({nv.qs, 1.0});
    }
    b.pbal[n.id] = p.add_row(key("pbal", n.id, t), std::move(pt), RowSense::Equal, 0.0);
    b.qbal[n.id] = p.add_row(key("qbal", n.id, t), std::move(qt), RowSense::Equal, 0.0);
  }
  return b;
}

LoadMetrics served_load_metrics(const Program& p, std::span<const double> primal, const Scenario& s) {
  LoadMetrics m;
  for (const auto& n : s.dist_nodes) {
    if (!n.is_load) continue;
    auto& served = m.served[n.id];
    auto& expected = m.expected[n.id];
    for (int t = 1; t <= s.horizon; ++t) {
      const double pbar = n.p_load[t - 1];
      const auto j = p.find_var(key("pd", n.id, t));
      const double pd = j ? primal[*j] : 0.0;
      served.push_back(pd);
      expected.push_back(pbar);
      m.total_load_loss += pbar - pd;
      m.weighted_served += n.weight[t - 1] * pd;
    }
  }
  return m;
}

}  // namespace resq
