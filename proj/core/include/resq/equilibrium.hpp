#pragma once

#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "resq/assemble.hpp"
#include "resq/ipm.hpp"
#include "resq/scenario.hpp"
#include "resq/traffic.hpp"

namespace resq {

using PriceMap = std::map<std::pair<int, int>, double>;           // (node, hour) -> $/pu-h
using IncentiveMap = std::map<std::tuple<int, int, int>, double>;  // (origin, station, class) -> $/veh
using TravelTimeMap = std::map<std::tuple<int, int, int>, double>;  // (tau, origin, dest) -> h

enum class Agent { DG, DSO, CSA, EV };

std::string to_string(Agent a);

struct CheckResult {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct VerifyOptions {
  double agent_tol = 1e-6;
  double logit_tol = 1e-4;
  double wardrop_tol = 1e-4;  // h
  double clearing_tol = 1e-8;
  double gap_tol = 1e-8;
  /// Re-solve with loads shifted by +-1e-6 pu and flag price jumps above 1e-2.
  bool probe_degeneracy = false;
};

struct EquilibriumReport {
  PriceMap rho;
  IncentiveMap alpha;
  TravelTimeMap tt;
  std::vector<CheckResult> checks;
  std::vector<WardropViolation> wardrop_violations;
  bool degenerate = false;

  bool pass() const;
  const CheckResult* find(const std::string& name) const;
  /// One line per check: name, residual, tolerance, verdict.
  std::string to_text() const;
};

/// Duals of the power clearing rows. Throws std::logic_error unless the
/// bundle is optimal and carries one dual per row.
PriceMap recover_prices(const Assembly& a, const SolutionBundle& b);
/// Duals of the vehicle clearing rows; positive means the aggregator pays drivers.
IncentiveMap recover_incentives(const Assembly& a, const SolutionBundle& b);
/// eta(origin) - eta(dest) per routed OD, rescaled to hours. Throws
/// std::runtime_error when an OD is disconnected in the road graph.
TravelTimeMap recover_travel_times(const Scenario& s, const Assembly& a, const SolutionBundle& b);

/// Node potentials in hours for every routed OD of every traffic block.
std::vector<std::vector<OdPattern>> od_patterns(const Scenario& s, const Assembly& a, const SolutionBundle& b);

/// Re-solves one agent's problem at the recovered prices and returns
/// |agent optimum - value of the combined solution| / (1 + |agent optimum|),
/// raised to the combined solution's violation of the agent's rows if larger.
/// The aggregator's problem is positively homogeneous, so it is solved with
/// its fleet capped at ten times the group size.
/// Throws std::runtime_error when the agent problem does not solve.
double verify_agent_best_response(Agent agent, const Scenario& s, const Assembly& a, const SolutionBundle& b,
                                  const PriceMap& rho, const IncentiveMap& alpha);

/// Full certificate: gap, clearing residuals, the four agents, logit
/// consistency, Wardrop conditions, travel times against shortest paths and
/// DG marginal pricing.
EquilibriumReport verify_equilibrium(const Scenario& s, const Assembly& a, const SolutionBundle& b,
                                     const VerifyOptions& o = {});

}  // namespace resq
