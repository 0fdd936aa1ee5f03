#pragma once

#include <map>
#include <span>
#include <utility>
#include <vector>

#include "resq/program.hpp"
#include "resq/scenario.hpp"

namespace resq {

/// Aggregator-side variables of one EV group (origin r, class e).
struct GroupVars {
  const EvGroup* group = nullptr;
  std::map<int, int> qp;                  // station transport node -> q' (veh)
  std::map<int, int> soc;                 // hour -> aggregate SOC
  std::map<std::pair<int, int>, int> p;   // (dist node, hour) -> kWh/h, >0 discharges
  std::map<std::pair<int, int>, int> d;   // (dist node, hour) -> degradation $/h
  std::map<int, int> soc_rows, socmin, socmax;
  std::map<std::pair<int, int>, int> chg_hi, chg_lo, deg;
  int arr = -1;
  int dep = -1;
};

struct FleetBlock {
  std::vector<GroupVars> groups;
  std::map<std::pair<int, int>, int> pcs;    // (dist node, hour) -> p^CS, pu
  std::map<std::pair<int, int>, int> csagg;  // (dist node, hour) -> aggregation row
};

/// SOC dynamics, SOC box, arrival pin, departure floor, charger limits and
/// station aggregation for every active group, plus the degradation
/// epigraph rows. Adds no objective terms. Groups with zero fleet are skipped.
FleetBlock build_fleet_block(Program& p, const Scenario& s);

/// d >= c_deg * p and d >= 0 for every discharge variable of the block.
/// Charging throughput is not charged.
void add_degradation_rows(Program& p, const Scenario& s, FleetBlock& b);

/// p^CS per station node and hour, positive = injection into the feeder.
std::map<int, std::vector<double>> station_injection_series(const Program& p, std::span<const double> primal,
                                                            const Scenario& s);

}  // namespace resq
