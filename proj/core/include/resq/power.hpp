#pragma once

#include <map>
#include <span>
#include <vector>

#include "resq/program.hpp"
#include "resq/scenario.hpp"

namespace resq {

/// Which agents' variables a power block carries. The combined program takes
/// both; the agent checks and the fixed-point oracle build them separately.
enum class PowerParts { All, Network, Generation };

struct NodeVars {
  int pd = -1;   // served active load (load nodes)
  int qd = -1;   // served reactive load (load nodes)
  int ps = -1;   // purchase from the market (supply nodes)
  int qs = -1;   // reactive support (supply nodes)
  int v = -1;    // squared voltage magnitude
  int pdg = -1;  // DG output (DG nodes)
};

struct LineVars {
  int pf = -1;
  int qf = -1;
};

/// Variables and rows for one hour of the feeder.
struct PowerBlock {
  int hour = 0;
  std::map<int, NodeVars> nodes;  // by node id
  std::map<int, LineVars> lines;  // by line id
  std::map<int, double> big_k;    // by line id
  std::map<int, int> pbal, qbal, pfac;
  std::map<int, int> cone;                 // in-service lines
  std::map<int, int> cone_pf, cone_qf;     // outaged lines: flows pinned to zero
  std::map<int, int> vdrop_ub, vdrop_lb;
  int voltage_bands = 0;  // carried as variable bounds
};

/// Emits nodal balances, load caps, power-factor ties, line limits, the
/// big-K voltage-drop pair, voltage bands and DG bounds for hour `t`.
/// Adds no objective terms. Throws ScenarioError when a node has reactive
/// load but no active load.
PowerBlock build_power_block(Program& p, const Scenario& s, int t, PowerParts parts = PowerParts::All);

/// Smallest constant that makes the voltage-drop pair vacuous on an outaged
/// line, given the flow limit and both voltage bands.
double compute_bigK(const DistLine& line, const DistNode& from, const DistNode& to);

double dg_cost(const DgUnit& u, double p);

struct LoadMetrics {
  double total_load_loss = 0.0;   // pu-h
  double weighted_served = 0.0;   // $
  std::map<int, std::vector<double>> served;  // node -> p^d per hour
  std::map<int, std::vector<double>> expected;
};

/// Reads `pd[i,t]` values from a solved program.
LoadMetrics served_load_metrics(const Program& p, std::span<const double> primal, const Scenario& s);

}  // namespace resq
