#include "resq/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "naming.hpp"
#include "resq/fleet.hpp"
#include "resq/power.hpp"

namespace resq {

using detail::key;

namespace {

void require_duals(const Assembly& a, const SolutionBundle& b) {
  if (!b.optimal()) throw std::logic_error("equilibrium recovery needs an optimal bundle");
  if (static_cast<int>(b.duals.size()) != a.program.num_rows() ||
      static_cast<int>(b.primal.size()) != a.program.num_variables())
    throw std::logic_error("bundle does not match the assembled program");
}

// Values of the agent program's variables taken from the combined solution.
std::vector<double> restrict_to(const Program& agent, const Program& combined, std::span<const double> primal) {
  std::vector<double> x(agent.num_variables());
  for (int j = 0; j < agent.num_variables(); ++j) x[j] = primal[combined.var_index(agent.variable(j).name)];
  return x;
}

double compare(const Program& agent, const std::vector<double>& restricted, const char* who) {
  SolverOptions o;
  o.diagnose_infeasibility = false;
  const SolutionBundle r = solve(agent, o);
  if (!r.optimal()) throw std::runtime_error(std::string(who) + " subproblem: " + to_string(r.status));
  const double best = r.primal_objective;
  const double mine = agent.objective(restricted);
  const double res = std::abs(best - mine) / (1.0 + std::abs(best));
  return std::max(res, std::max(0.0, agent.max_violation(restricted)));
}

double dg_residual(const Scenario& s, const Assembly& a, const SolutionBundle& b, const PriceMap& rho) {
  double best = 0.0, mine = 0.0;
  for (const auto& u : s.dg_units) {
    for (int t = 1; t <= s.horizon; ++t) {
      const double lo = std::max(0.0, u.p_min[t - 1]), hi = u.p_max[t - 1];
      const double price = rho.at({u.node, t});
      double p;
      if (u.c2 > 0.0)
        p = std::clamp((price - u.c1) / (2.0 * u.c2), lo, hi);
      else
        p = price > u.c1 ? hi : lo;
      best += price * p - dg_cost(u, p);
      const double x = b.primal[a.program.var_index(key("pdg", u.node, t))];
      mine += price * x - dg_cost(u, x);
    }
  }
  return std::abs(best - mine) / (1.0 + std::abs(best));
}

double dso_residual(const Scenario& s, const Assembly& a, const SolutionBundle& b, const PriceMap& rho) {
  Program p(true);
  for (int t = 1; t <= s.horizon; ++t) {
    const PowerBlock blk = build_power_block(p, s, t, PowerParts::Network);
    for (const auto& n : s.dist_nodes) {
      const NodeVars& nv = blk.nodes.at(n.id);
      if (nv.pd >= 0) p.add_linear_cost(nv.pd, -n.weight[t - 1]);
      if (nv.ps >= 0) p.add_linear_cost(nv.ps, rho.at({n.id, t}));
    }
  }
  return compare(p, restrict_to(p, a.program, b.primal), "DSO");
}

double csa_residual(const Scenario& s, const Assembly& a, const SolutionBundle& b, const PriceMap& rho,
                    const IncentiveMap& alpha) {
  Program p(true);
  const FleetBlock fb = build_fleet_block(p, s);
  for (const auto& [it, j] : fb.pcs) p.add_linear_cost(j, -rho.at(it));
  for (const auto& gv : fb.groups) {
    const EvGroup& g = *gv.group;
    std::vector<Term> cap;
    for (const auto& [st, j] : gv.qp) {
      p.add_linear_cost(j, alpha.at({g.origin, st, g.cls}));
      cap.push_back({j, 1.0});
    }
    p.add_row(key("qp_cap", g.origin, g.cls), std::move(cap), RowSense::LessEqual, 10.0 * g.fleet);
    for (const auto& [it, d] : gv.d) p.add_linear_cost(d, 1.0);
  }
  return compare(p, restrict_to(p, a.program, b.primal), "CSA");
}

double ev_residual(const Scenario& s, const Assembly& a, const SolutionBundle& b, const IncentiveMap& alpha) {
  if (a.traffic.empty()) return 0.0;
  Program p(false);
  const double k = s.behavior.beta2 / s.behavior.beta1;
  for (int tau : s.arrival_hours()) {
    const TrafficBlock tb = build_traffic_block(p, s, tau, 1.0);
    for (const auto& dv : tb.q) p.add_linear_cost(dv.q, -k * alpha.at({dv.group->origin, dv.station, dv.group->cls}));
  }
  return compare(p, restrict_to(p, a.program, b.primal), "EV");
}

// Earliest arrival times from `origin` over link times `w`.
std::map<int, double> shortest_times(const Scenario& s, int origin, const std::vector<double>& w) {
  std::map<int, double> dist;
  for (int n : s.transport_nodes()) dist[n] = std::numeric_limits<double>::infinity();
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  dist[origin] = 0.0;
  open.push({0.0, origin});
  while (!open.empty()) {
    const auto [d, n] = open.top();
    open.pop();
    if (d > dist[n]) continue;
    for (std::size_t k = 0; k < s.road_links.size(); ++k) {
      const auto& l = s.road_links[k];
      if (l.from != n) continue;
      if (d + w[k] < dist[l.to]) {
        dist[l.to] = d + w[k];
        open.push({dist[l.to], l.to});
      }
    }
  }
  return dist;
}

std::vector<double> link_times(const Scenario& s, const TrafficBlock& tb, const SolutionBundle& b) {
  std::vector<double> w;
  for (std::size_t k = 0; k < s.road_links.size(); ++k)
    w.push_back(bpr_time(s.road_links[k], std::max(0.0, b.primal[tb.v[k]])));
  return w;
}

CheckResult check(std::string name, double residual, double tol) {
  return {std::move(name), residual, tol, std::isfinite(residual) && residual <= tol};
}

}  // namespace

std::string to_string(Agent a) {
  switch (a) {
    case Agent::DG: return "dg";
    case Agent::DSO: return "dso";
    case Agent::CSA: return "csa";
    case Agent::EV: return "ev";
  }
  return "?";
}

bool EquilibriumReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

const CheckResult* EquilibriumReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

std::string EquilibriumReport::to_text() const {
  std::ostringstream out;
  out << std::scientific << std::setprecision(3);
  for (const auto& c : checks)
    out << std::left << std::setw(20) << c.name << " residual " << c.residual << "  tol " << c.tolerance << "  "
        << (c.pass ? "PASS" : "FAIL") << "\n";
  out << std::left << std::setw(20) << "degenerate_duals" << " " << (degenerate ? "yes" : "no") << "\n";
  out << "overall " << (pass() ? "PASS" : "FAIL") << "\n";
  return out.str();
}

PriceMap recover_prices(const Assembly& a, const SolutionBundle& b) {
  require_duals(a, b);
  PriceMap out;
  for (const auto& [it, row] : a.clear_p) out[it] = b.duals[row];
  return out;
}

IncentiveMap recover_incentives(const Assembly& a, const SolutionBundle& b) {
  require_duals(a, b);
  IncentiveMap out;
  for (const auto& [it, row] : a.clear_q) out[it] = b.duals[row];
  return out;
}

std::vector<std::vector<OdPattern>> od_patterns(const Scenario& s, const Assembly& a, const SolutionBundle& b) {
  require_duals(a, b);
  const double k = s.behavior.beta2 / s.behavior.beta1;
  std::vector<std::vector<OdPattern>> out;
  for (const auto& tb : a.traffic) {
    auto& pats = out.emplace_back();
    for (const auto& od : tb.ods) {
      OdPattern pat;
      pat.origin = od.origin;
      pat.dest = od.dest;
      for (int j : od.x) pat.link_flow.push_back(b.primal[j]);
      for (const auto& [n, row] : od.cons) pat.potential[n] = k * b.duals[row];
      pats.push_back(std::move(pat));
    }
  }
  return out;
}

TravelTimeMap recover_travel_times(const Scenario& s, const Assembly& a, const SolutionBundle& b) {
  const auto pats = od_patterns(s, a, b);
  TravelTimeMap out;
  for (std::size_t k = 0; k < pats.size(); ++k) {
    const int tau = a.traffic[k].tau;
    for (const auto& pat : pats[k]) {
      const std::vector<double> ones(s.road_links.size(), 1.0);
      if (!std::isfinite(shortest_times(s, pat.origin, ones).at(pat.dest)))
        throw std::runtime_error("od (" + std::to_string(pat.origin) + "," + std::to_string(pat.dest) +
                                 ") is disconnected");
      out[{tau, pat.origin, pat.dest}] = pat.potential.at(pat.origin) - pat.potential.at(pat.dest);
    }
  }
  return out;
}

double verify_agent_best_response(Agent agent, const Scenario& s, const Assembly& a, const SolutionBundle& b,
                                  const PriceMap& rho, const IncentiveMap& alpha) {
  require_duals(a, b);
  switch (agent) {
    case Agent::DG: return dg_residual(s, a, b, rho);
    case Agent::DSO: return dso_residual(s, a, b, rho);
    case Agent::CSA: return csa_residual(s, a, b, rho, alpha);
    case Agent::EV: return ev_residual(s, a, b, alpha);
  }
  throw std::invalid_argument("unknown agent");
}

EquilibriumReport verify_equilibrium(const Scenario& s, const Assembly& a, const SolutionBundle& b,
                                     const VerifyOptions& o) {
  require_duals(a, b);
  EquilibriumReport r;
  r.rho = recover_prices(a, b);
  r.alpha = recover_incentives(a, b);
  r.tt = recover_travel_times(s, a, b);
  const Program& p = a.program;

  r.checks.push_back(check("duality_gap", duality_gap(b), o.gap_tol));

  double clear = 0.0;
  for (const auto& [it, row] : a.clear_p) clear = std::max(clear, std::abs(p.row_violation(row, b.primal)));
  for (const auto& [it, row] : a.clear_q) clear = std::max(clear, std::abs(p.row_violation(row, b.primal)));
  r.checks.push_back(check("clearing", clear, o.clearing_tol));

  for (Agent ag : {Agent::DG, Agent::DSO, Agent::CSA, Agent::EV})
    r.checks.push_back(check("agent_" + to_string(ag), verify_agent_best_response(ag, s, a, b, r.rho, r.alpha),
                             o.agent_tol));

  // Destination choice against the logit model at the recovered tt and alpha.
  double logit = 0.0;
  for (const auto& tb : a.traffic) {
    for (const EvGroup* g : s.groups_arriving(tb.tau)) {
      std::vector<double> tt, al, q;
      for (int st : s.stations()) {
        tt.push_back(r.tt.at({tb.tau, g->origin, st}));
        al.push_back(r.alpha.at({g->origin, st, g->cls}));
        q.push_back(b.primal[p.var_index(key("q", g->origin, st, g->cls))]);
      }
      const auto share = logit_shares(s, tt, al);
      for (std::size_t k = 0; k < q.size(); ++k) logit = std::max(logit, std::abs(q[k] - g->fleet * share[k]) / g->fleet);
    }
  }
  r.checks.push_back(check("logit", logit, o.logit_tol));

  const auto pats = od_patterns(s, a, b);
  double wardrop = 0.0, shortest = 0.0;
  for (std::size_t k = 0; k < pats.size(); ++k) {
    const TrafficBlock& tb = a.traffic[k];
    std::vector<double> vol;
    for (int j : tb.v) vol.push_back(b.primal[j]);
    const auto w = link_times(s, tb, b);
    for (const auto& pat : pats[k]) {
      for (std::size_t l = 0; l < w.size(); ++l) {
        const double drop = pat.potential.at(s.road_links[l].from) - pat.potential.at(s.road_links[l].to);
        const double err = pat.link_flow[l] > o.wardrop_tol ? std::abs(w[l] - drop) : std::max(0.0, drop - w[l]);
        wardrop = std::max(wardrop, err);
      }
      const double sp = shortest_times(s, pat.origin, w).at(pat.dest);
      shortest = std::max(shortest, std::abs(sp - r.tt.at({tb.tau, pat.origin, pat.dest})));
    }
    const auto bad = wardrop_check(s.road_links, vol, pats[k], o.wardrop_tol);
    r.wardrop_violations.insert(r.wardrop_violations.end(), bad.begin(), bad.end());
  }
  r.checks.push_back(check("wardrop", wardrop, o.wardrop_tol));
  r.checks.push_back(check("travel_time", shortest, o.wardrop_tol));

  // A DG strictly inside its bounds sells at marginal cost.
  double marginal = 0.0;
  for (const auto& u : s.dg_units) {
    for (int t = 1; t <= s.horizon; ++t) {
      const double x = b.primal[p.var_index(key("pdg", u.node, t))];
      const double lo = std::max(0.0, u.p_min[t - 1]), hi = u.p_max[t - 1];
      if (x - lo > 1e-6 && hi - x > 1e-6)
        marginal = std::max(marginal, std::abs(r.rho.at({u.node, t}) - (u.c1 + 2.0 * u.c2 * x)));
    }
  }
  r.checks.push_back(check("dg_marginal_price", marginal, o.agent_tol));

  if (o.probe_degeneracy) {
    for (double shift : {1e-6, -1e-6}) {
      Scenario q = s;
      for (auto& n : q.dist_nodes)
        for (int t = 0; t < q.horizon; ++t)
          if (n.is_load && n.p_load[t] > 0.0) {
            const double ratio = n.q_load[t] / n.p_load[t];
            n.p_load[t] = std::max(0.0, n.p_load[t] + shift);
            n.q_load[t] = ratio * n.p_load[t];
          }
      const Assembly qa = assemble(q);
      const SolutionBundle qb = solve_scenario(q, qa, o.gap_tol);
      if (!qb.optimal()) continue;
      const PriceMap moved = recover_prices(qa, qb);
      for (const auto& [it, v] : r.rho)
        if (std::abs(moved.at(it) - v) > 1e-2) r.degenerate = true;
    }
  }
  return r;
}

}  // namespace resq
