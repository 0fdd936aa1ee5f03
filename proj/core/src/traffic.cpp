#include "resq/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "naming.hpp"

namespace resq {

using detail::key;

namespace {

void check_flow(double v) {
  if (!(v >= 0.0)) throw std::invalid_argument("negative link flow " + std::to_string(v));
}

}  // namespace

double bpr_time(const RoadLink& link, double v) {
  check_flow(v);
  return link.t0 * (1.0 + link.bpr_alpha * std::pow(v / link.cap, link.bpr_beta));
}

double bpr_integral(const RoadLink& link, double v) {
  check_flow(v);
  const double b = link.bpr_beta;
  return link.t0 * (v + link.bpr_alpha * v * std::pow(v / link.cap, b) / (b + 1.0));
}

TrafficBlock build_traffic_block(Program& p, const Scenario& s, int tau, double weight) {
  TrafficBlock b;
  b.tau = tau;
  const auto nodes = s.transport_nodes();
  const auto in_graph = [&](int n) { return std::binary_search(nodes.begin(), nodes.end(), n); };
  const auto& links = s.road_links;
  const int nl = static_cast<int>(links.size());
  const double beta1 = s.behavior.beta1;

  for (int a = 0; a < nl; ++a) {
    const auto& l = links[a];
    const int v = p.add_variable(key("vl", tau, l.id), 0.0, kInf);
    p.add_bpr_cost(v, weight, l.t0, l.cap, l.bpr_alpha, l.bpr_beta);
    b.v.push_back(v);
  }

  auto add_od = [&](int r, int dest, bool background, double demand) {
    if (!in_graph(r) || !in_graph(dest))
      throw ScenarioError("od (" + std::to_string(r) + "," + std::to_string(dest) + ") at hour " +
                          std::to_string(tau) + ": endpoint not in road graph");
    OdVars od;
    od.origin = r;
    od.dest = dest;
    od.background = background;
    od.demand = demand;
    const char* base = background ? "xb" : "x";
    for (const auto& l : links) od.x.push_back(p.add_variable(key(base, tau, r, dest, l.id), 0.0, kInf));
    b.ods.push_back(std::move(od));
  };

  const auto groups = s.groups_arriving(tau);
  std::vector<int> origins;
  for (const EvGroup* g : groups) origins.push_back(g->origin);
  std::sort(origins.begin(), origins.end());
  origins.erase(std::unique(origins.begin(), origins.end()), origins.end());
  for (int r : origins)
    for (int st : s.stations()) add_od(r, st, false, 0.0);
  for (const auto& bg : s.background_od) {
    auto it = bg.demand.find(tau);
    if (it != bg.demand.end() && it->second > 0.0) add_od(bg.origin, bg.dest, true, it->second);
  }

  for (const EvGroup* g : groups) {
    std::vector<Term> total;
    for (int st : s.stations()) {
      const int q = p.add_variable(key("q", g->origin, st, g->cls), 0.0, kInf, g->fleet / s.stations().size());
      p.add_entropy_cost(q, weight / beta1, s.beta0(st));
      b.q.push_back({g, st, q});
      total.push_back({q, 1.0});
    }
    b.dem[{g->origin, g->cls}] = p.add_row(key("dem", tau, g->origin, g->cls), std::move(total), RowSense::Equal,
                                           g->fleet);
  }

  for (int a = 0; a < nl; ++a) {
    std::vector<Term> agg{{b.v[a], 1.0}};
    for (const auto& od : b.ods) agg.push_back({od.x[a], -1.0});
    b.agg.push_back(p.add_row(key("agg", tau, links[a].id), std::move(agg), RowSense::Equal, 0.0));
  }

  // sum_e q E_rs(n) - (A x_rs)(n) = 0, A = +1 at a link's tail, -1 at its head.
  for (auto& od : b.ods) {
    for (int n : nodes) {
      std::vector<Term> row;
      double rhs = 0.0;
      const double e = (n == od.origin ? 1.0 : 0.0) - (n == od.dest ? 1.0 : 0.0);
      if (od.background) {
        rhs = -od.demand * e;
      } else if (e != 0.0) {
        for (const auto& dv : b.q)
          if (dv.group->origin == od.origin && dv.station == od.dest) row.push_back({dv.q, e});
      }
      for (int a = 0; a < nl; ++a) {
        if (links[a].from == n) row.push_back({od.x[a], -1.0});
        if (links[a].to == n) row.push_back({od.x[a], 1.0});
      }
      const char* base = od.background ? "bgcons" : "cons";
      od.cons[n] = p.add_row(key(base, tau, od.origin, od.dest, n), std::move(row), RowSense::Equal, rhs);
    }
  }
  return b;
}

std::vector<double> logit_shares(std::span<const double> tt, std::span<const double> alpha,
                                 std::span<const double> beta0, double beta1, double beta2) {
  const std::size_t n = tt.size();
  if (alpha.size() != n || beta0.size() != n) throw std::invalid_argument("logit_shares: size mismatch");
  std::vector<double> u(n);
  for (std::size_t k = 0; k < n; ++k) u[k] = beta0[k] - beta1 * tt[k] + beta2 * alpha[k];
  const double top = n ? *std::max_element(u.begin(), u.end()) : 0.0;
  double sum = 0.0;
  for (auto& x : u) sum += (x = std::exp(x - top));
  for (auto& x : u) x /= sum;
  return u;
}

std::vector<double> logit_shares(const Scenario& s, std::span<const double> tt,
                                 std::span<const double> alpha) {
  std::vector<double> b0;
  for (int st : s.stations()) b0.push_back(s.beta0(st));
  return logit_shares(tt, alpha, b0, s.behavior.beta1, s.behavior.beta2);
}

std::vector<WardropViolation> wardrop_check(const std::vector<RoadLink>& links, std::span<const double> link_volume,
                                            const std::vector<OdPattern>& ods, double tol) {
  if (link_volume.size() != links.size()) throw std::invalid_argument("wardrop_check: link volume size mismatch");
  std::vector<WardropViolation> out;
  for (const auto& od : ods) {
    for (std::size_t a = 0; a < links.size(); ++a) {
      const auto& l = links[a];
      auto from = od.potential.find(l.from), to = od.potential.find(l.to);
      if (from == od.potential.end() || to == od.potential.end())
        throw std::invalid_argument("wardrop_check: missing potential for link " + std::to_string(l.id));
      const double time = bpr_time(l, std::max(link_volume[a], 0.0));
      const double drop = from->second - to->second;
      const double flow = od.link_flow.at(a);
      const bool ok = flow > tol ? std::abs(time - drop) <= tol : time >= drop - tol;
      if (!ok) out.push_back({od.origin, od.dest, l.id, flow, time, drop});
    }
  }
  return out;
}

}  // namespace resq
