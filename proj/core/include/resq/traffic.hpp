#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "resq/program.hpp"
#include "resq/scenario.hpp"

namespace resq {

/// Link travel time t0 (1 + alpha (v/cap)^beta). Throws std::invalid_argument for v < 0.
double bpr_time(const RoadLink& link, double v);
/// Integral of bpr_time from 0 to v. Throws std::invalid_argument for v < 0.
double bpr_integral(const RoadLink& link, double v);

/// One origin-destination pair routed in a traffic block.
struct OdVars {
  int origin = 0;
  int dest = 0;
  bool background = false;
  double demand = 0.0;           // background only
  std::vector<int> x;            // per road link, in scenario order
  std::map<int, int> cons;       // transport node -> conservation row
};

struct DestinationVars {
  const EvGroup* group = nullptr;
  int station = 0;  // transport node
  int q = -1;
};

/// CDA variables and rows for one arrival hour.
struct TrafficBlock {
  int tau = 0;
  std::vector<int> v;     // total link flow, per road link
  std::vector<int> agg;   // flow aggregation rows, per road link
  std::vector<OdVars> ods;
  std::vector<DestinationVars> q;
  std::map<std::pair<int, int>, int> dem;  // (origin, class) -> demand row
};

/// Builds the combined distribution/assignment block for arrival hour `tau`.
/// Objective terms are registered as `weight` times the agent objective
///   sum_a int_0^v tt_a + (1/beta1) sum q (ln q - 1 - beta0_s),
/// so weight = 1 gives the driver problem without incentives and
/// weight = beta1/beta2 gives the scaling used by the combined program.
/// Throws ScenarioError for OD endpoints outside the road graph.
TrafficBlock build_traffic_block(Program& p, const Scenario& s, int tau, double weight = 1.0);

/// Multinomial logit shares for utilities beta0 - beta1 tt + beta2 alpha,
/// shifted by the maximum utility before exponentiation.
std::vector<double> logit_shares(std::span<const double> tt, std::span<const double> alpha,
                                 std::span<const double> beta0, double beta1, double beta2);

/// Shares over the scenario's stations in cs_map order, with the scenario's
/// behavioural parameters.
std::vector<double> logit_shares(const Scenario& s, std::span<const double> tt,
                                 std::span<const double> alpha);

/// Route pattern of one OD pair and its node potentials, in hours.
struct OdPattern {
  int origin = 0;
  int dest = 0;
  std::vector<double> link_flow;     // per road link
  std::map<int, double> potential;   // transport node -> eta
};

struct WardropViolation {
  int origin = 0;
  int dest = 0;
  int link = 0;
  double flow = 0.0;
  double time = 0.0;       // tt_a(v_a)
  double potential_drop = 0.0;  // eta(from) - eta(to)
};

/// Link-level Wardrop conditions: a used link's time equals the potential
/// drop across it; an unused link's time is not below it. Throws
/// std::invalid_argument when a potential is missing.
std::vector<WardropViolation> wardrop_check(const std::vector<RoadLink>& links, std::span<const double> link_volume,
                                            const std::vector<OdPattern>& ods, double tol);

}  // namespace resq
