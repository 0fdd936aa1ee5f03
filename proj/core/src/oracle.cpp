#include "resq/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "naming.hpp"
#include "resq/fleet.hpp"
#include "resq/ipm.hpp"
#include "resq/power.hpp"
#include "resq/traffic.hpp"

namespace resq {

using detail::key;

namespace {

using NodeHour = std::pair<int, int>;
using GroupKey = std::tuple<int, int, int>;  // (origin, station, class)

struct State {
  std::map<NodeHour, double> ps, pdg, pcs;
  std::map<GroupKey, double> qp, q;
};

// Adds c with the row c - sum(terms) = rhs and cost (pen/2) c^2.
void add_penalty(Program& p, const std::string& name, std::vector<Term> terms, double rhs, double pen) {
  const int c = p.add_variable("_" + name);
  for (auto& t : terms) t.coef = -t.coef;
  terms.push_back({c, 1.0});
  p.add_row("_" + name, std::move(terms), RowSense::Equal, rhs);
  p.add_quadratic_cost(c, 0.5 * pen);
}

std::vector<double> run(const Program& p, const char* who) {
  SolverOptions o;
  o.diagnose_infeasibility = false;
  SolutionBundle b = solve(p, o);
  if (!b.optimal()) throw std::runtime_error(std::string(who) + " best response: " + to_string(b.status));
  return std::move(b.primal);
}

void store(const Program& p, const std::vector<double>& x, std::map<std::string, double>& out) {
  for (int j = 0; j < p.num_variables(); ++j)
    if (p.variable(j).name.front() != '_') out[p.variable(j).name] = x[j];
}

double value(const std::map<NodeHour, double>& m, const NodeHour& k) {
  auto it = m.find(k);
  return it == m.end() ? 0.0 : it->second;
}

}  // namespace

OracleResult fixed_point_oracle(const Scenario& s, const OracleOptions& o) {
  if (auto v = validate_scenario(s); !v.empty()) throw ScenarioError("invalid scenario: " + v.front());
  int supply = 0;
  for (const auto& n : s.dist_nodes) supply += (n.is_dg || n.is_cs) ? 1 : 0;
  if (supply > 2 || s.cs_map.size() > 2 || s.horizon > 3)
    throw std::invalid_argument("fixed_point_oracle: instance too large (limit 2 supply nodes, 2 stations, 3 hours)");
  if (!(o.damping > 0.0) || !(o.penalty > 0.0) || o.max_iter < 1)
    throw std::invalid_argument("fixed_point_oracle: damping, penalty and max_iter must be positive");

  const double pen = o.penalty;
  const double beta1 = s.behavior.beta1, beta2 = s.behavior.beta2;
  OracleResult res;
  State cur;

  std::vector<NodeHour> clear_p;
  for (const auto& n : s.dist_nodes)
    if (n.is_dg || n.is_cs)
      for (int t = 1; t <= s.horizon; ++t) {
        clear_p.push_back({n.id, t});
        res.rho[{n.id, t}] = 0.0;
      }
  std::vector<GroupKey> clear_q;
  for (const EvGroup* g : s.active_groups())
    for (int st : s.stations()) {
      const GroupKey k{g->origin, st, g->cls};
      clear_q.push_back(k);
      res.alpha[k] = 0.0;
      cur.qp[k] = cur.q[k] = g->fleet / s.stations().size();
    }

  std::vector<double> history, prev;
  std::vector<bool> reversed;

  try {
    for (int it = 1; it <= o.max_iter; ++it) {
      const State old = cur;

      // DSO: buys p^s at rho.
      {
        Program p(true);
        for (int t = 1; t <= s.horizon; ++t) {
          const PowerBlock b = build_power_block(p, s, t, PowerParts::Network);
          for (const auto& n : s.dist_nodes) {
            const NodeVars& nv = b.nodes.at(n.id);
            if (nv.pd >= 0) p.add_linear_cost(nv.pd, -n.weight[t - 1]);
            if (nv.ps < 0) continue;
            p.add_linear_cost(nv.ps, res.rho.at({n.id, t}));
            add_penalty(p, key("cp", n.id, t), {{nv.ps, 1.0}},
                        -(value(cur.pdg, {n.id, t}) + value(cur.pcs, {n.id, t})), pen);
          }
        }
        const auto x = run(p, "DSO");
        store(p, x, res.primal);
        for (const auto& k : clear_p) cur.ps[k] = x[p.var_index(key("ps", k.first, k.second))];
      }

      // DG owners: closed form of the penalised profit maximisation.
      for (const auto& u : s.dg_units) {
        for (int t = 1; t <= s.horizon; ++t) {
          const NodeHour k{u.node, t};
          const double lo = std::max(0.0, u.p_min[t - 1]), hi = u.p_max[t - 1];
          const double target = cur.ps.at(k) - value(cur.pcs, k);
          const double x = std::clamp((res.rho.at(k) - u.c1 + pen * target) / (2.0 * u.c2 + pen), lo, hi);
          cur.pdg[k] = x;
          res.primal[key("pdg", u.node, t)] = x;
        }
      }

      // Aggregator: sells p^CS at rho, pays alpha per vehicle, bears degradation.
      {
        Program p(true);
        const FleetBlock fb = build_fleet_block(p, s);
        for (const auto& [k, j] : fb.pcs) {
          p.add_linear_cost(j, -res.rho.at(k));
          add_penalty(p, key("cp", k.first, k.second), {{j, -1.0}}, cur.ps.at(k) - value(cur.pdg, k), pen);
        }
        for (const auto& gv : fb.groups) {
          const EvGroup& g = *gv.group;
          for (const auto& [st, j] : gv.qp) {
            const GroupKey k{g.origin, st, g.cls};
            p.add_linear_cost(j, res.alpha.at(k));
            add_penalty(p, key("cq", g.origin, st, g.cls), {{j, 1.0}}, -cur.q.at(k), pen);
          }
          for (const auto& [k, d] : gv.d) p.add_linear_cost(d, 1.0);
        }
        const auto x = run(p, "CSA");
        store(p, x, res.primal);
        for (const auto& [k, j] : fb.pcs) cur.pcs[k] = x[j];
        for (const auto& gv : fb.groups)
          for (const auto& [st, j] : gv.qp) cur.qp[{gv.group->origin, st, gv.group->cls}] = x[j];
      }

      // Drivers: destination and route choice with incentives, in welfare units.
      if (!s.arrival_hours().empty()) {
        Program p(true);
        std::vector<std::pair<GroupKey, int>> qs;
        for (int tau : s.arrival_hours()) {
          const TrafficBlock tb = build_traffic_block(p, s, tau, beta1 / beta2);
          for (const auto& dv : tb.q) {
            const GroupKey k{dv.group->origin, dv.station, dv.group->cls};
            p.add_linear_cost(dv.q, -res.alpha.at(k));
            add_penalty(p, key("cq", std::get<0>(k), std::get<1>(k), std::get<2>(k)), {{dv.q, -1.0}},
                        cur.qp.at(k), pen);
            qs.push_back({k, dv.q});
          }
        }
        const auto x = run(p, "EV");
        store(p, x, res.primal);
        for (const auto& [k, j] : qs) cur.q[k] = x[j];
      }

      // Price updates and progress measures.
      std::vector<double> mismatch;
      double worst = 0.0, change = 0.0;
      for (const auto& k : clear_p) {
        const double c = cur.ps.at(k) - value(cur.pdg, k) - value(cur.pcs, k);
        res.rho[k] += o.damping * c;
        mismatch.push_back(c);
        worst = std::max(worst, std::abs(c));
        change = std::max({change, std::abs(cur.ps.at(k) - value(old.ps, k)),
                           std::abs(value(cur.pdg, k) - value(old.pdg, k)),
                           std::abs(value(cur.pcs, k) - value(old.pcs, k))});
      }
      for (const auto& k : clear_q) {
        const double c = cur.qp.at(k) - cur.q.at(k);
        res.alpha[k] += o.damping * c;
        mismatch.push_back(c);
        worst = std::max(worst, std::abs(c));
        change = std::max({change, std::abs(cur.qp.at(k) - old.qp.at(k)), std::abs(cur.q.at(k) - old.q.at(k))});
      }
      res.iterations = it;
      res.residual = std::max(worst, change);
      if (res.residual <= o.tol) {
        res.converged = true;
        res.message = "converged";
        break;
      }

      // Oscillation: the mismatch keeps reversing direction while the
      // residual stops improving, or the iterates blow up.
      double dot = 0.0;
      for (std::size_t k = 0; k < mismatch.size() && k < prev.size(); ++k) dot += mismatch[k] * prev[k];
      prev = mismatch;
      reversed.push_back(dot < 0.0);
      history.push_back(res.residual);
      const std::size_t h = history.size();
      const bool stuck = h >= 40 && *std::min_element(history.end() - 20, history.end()) >=
                                        *std::min_element(history.end() - 40, history.end() - 20);
      const bool alternating = h >= 20 && std::count(reversed.end() - 20, reversed.end(), true) >= 10;
      if (!std::isfinite(res.residual) || res.residual > 1e8 || (stuck && alternating)) {
        res.oscillating = true;
        res.message = "oscillation detected at iteration " + std::to_string(it);
        break;
      }
    }
    if (!res.converged && !res.oscillating) res.message = "iteration limit reached";
  } catch (const std::runtime_error& e) {
    res.converged = false;
    res.message = e.what();
  }
  return res;
}

}  // namespace resq
