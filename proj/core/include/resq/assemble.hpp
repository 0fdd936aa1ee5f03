#pragma once

#include <map>
#include <tuple>
#include <utility>
#include <vector>

#include "resq/fleet.hpp"
#include "resq/ipm.hpp"
#include "resq/power.hpp"
#include "resq/program.hpp"
#include "resq/scenario.hpp"
#include "resq/traffic.hpp"

namespace resq {

/// The single convex program whose optimum is the market equilibrium, with
/// handles into every block. Holds pointers into the scenario it was built
/// from, which must outlive it.
struct Assembly {
  Program program{true};
  std::vector<PowerBlock> power;      // one per hour
  FleetBlock fleet;
  std::vector<TrafficBlock> traffic;  // one per arrival hour
  std::map<std::pair<int, int>, int> clear_p;           // (node, hour) -> row
  std::map<std::tuple<int, int, int>, int> clear_q;     // (origin, station, class) -> row
};

/// Welfare objective
///   sum omega p^d - sum C(p^DG) - sum degradation
///   - (beta1/beta2) sum int tt - (1/beta2) sum q (ln q - 1 - beta0)
/// under all feeder, fleet and traffic rows plus the clearing rows
///   clear_p[i,t]: p^s - p^DG - p^CS = 0   (supply nodes)
///   clear_q[r,s,e]: q' - q = 0
/// so that the clearing duals are the prices and incentives.
Assembly assemble(const Scenario& s);

/// Solves an assembly with gap tolerance `tol` and the scenario's iteration cap.
SolutionBundle solve_scenario(const Scenario& s, const Assembly& a, double tol);

}  // namespace resq
