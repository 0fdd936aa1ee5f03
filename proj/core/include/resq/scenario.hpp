#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace resq {

/// Raised by the scenario loader. The message always carries a locus: either
/// a `line N` position for malformed JSON or a dotted field path.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Hourly series indexed by 1-based hour. Storage is 0-based.
using HourlySeries = std::vector<double>;

struct DistNode {
  int id = 0;
  bool is_load = false;
  bool is_dg = false;
  bool is_cs = false;
  HourlySeries weight;  // $/pu-h
  HourlySeries p_load;  // expected active load, pu
  HourlySeries q_load;  // expected reactive load, pu
  double v_min = 0.95;
  double v_max = 1.05;

  bool operator==(const DistNode&) const = default;
};

struct Outage {
  int line = 0;
  int from_t = 0;  // inclusive
  int to_t = 0;    // exclusive

  bool operator==(const Outage&) const = default;
};

struct DistLine {
  int id = 0;
  int from = 0;
  int to = 0;
  double r = 0.0;
  double x = 0.0;
  double s_max = 0.0;

  bool operator==(const DistLine&) const = default;
};

struct DgUnit {
  int node = 0;
  HourlySeries p_min;
  HourlySeries p_max;
  double c1 = 0.0;  // $/pu-h
  double c2 = 0.0;  // $/pu^2-h

  bool operator==(const DgUnit&) const = default;
};

struct RoadLink {
  int id = 0;
  int from = 0;
  int to = 0;
  double t0 = 1.0;   // free-flow time, h
  double cap = 1.0;  // veh/h
  double bpr_alpha = 0.15;
  double bpr_beta = 4.0;

  bool operator==(const RoadLink&) const = default;
};

/// One homogeneous EV group: vehicles of class `cls` leaving transport node
/// `origin` and arriving at a charging station at hour `t_arr`.
struct EvGroup {
  int origin = 0;
  int cls = 0;
  int t_arr = 0;
  int t_dep = 0;
  double soc_arr = 0.0;
  double soc_dep = 0.0;
  double soc_min = 0.0;
  double soc_max = 1.0;
  double capacity_kwh = 50.0;
  double fleet = 0.0;   // vehicles
  double c_deg = 0.03;  // $/kWh discharged

  bool operator==(const EvGroup&) const = default;
};

struct BackgroundOd {
  int origin = 0;
  int dest = 0;
  std::map<int, double> demand;  // arrival hour -> veh/h

  bool operator==(const BackgroundOd&) const = default;
};

/// Charging station: distribution node <-> transportation node.
struct StationLink {
  int dist_node = 0;
  int transport_node = 0;

  bool operator==(const StationLink&) const = default;
};

struct Behavior {
  double beta1 = 1.0;              // 1/h
  double beta2 = 1.0;              // 1/$
  std::map<int, double> beta0;     // keyed by station transport node; default 0

  bool operator==(const Behavior&) const = default;
};

struct SolverSettings {
  double tol = 1e-8;
  int max_iter = 300;
  double charger_kw = 10.0;  // per vehicle

  bool operator==(const SolverSettings&) const = default;
};

struct Scenario {
  double s_base_kva = 1000.0;
  int horizon = 24;
  std::vector<Outage> outages;
  std::vector<DistNode> dist_nodes;
  std::vector<DistLine> dist_lines;
  std::vector<DgUnit> dg_units;
  std::vector<RoadLink> road_links;
  std::vector<EvGroup> ev_groups;
  std::vector<BackgroundOd> background_od;
  std::vector<StationLink> cs_map;
  Behavior behavior;
  SolverSettings solver;

  bool operator==(const Scenario&) const = default;

  const DistNode& node(int id) const;
  const DistLine& line(int id) const;
  bool has_node(int id) const;
  bool has_line(int id) const;

  /// Transportation node ids, sorted and unique.
  std::vector<int> transport_nodes() const;
  /// Station transport nodes in cs_map order.
  std::vector<int> stations() const;
  int station_of_dist_node(int dist_node) const;
  int dist_node_of_station(int transport_node) const;
  double beta0(int station_transport_node) const;
  /// Hours at which some EV group or background demand arrives.
  std::vector<int> arrival_hours() const;
  /// EV groups with positive fleet arriving at `tau`.
  std::vector<const EvGroup*> groups_arriving(int tau) const;
  /// EV groups with positive fleet.
  std::vector<const EvGroup*> active_groups() const;
};

Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(const std::string& text);
std::string serialize_scenario(const Scenario& s);

/// Applies deterministic ordering; called by the loader.
void canonicalize(Scenario& s);

std::vector<std::string> validate_scenario(const Scenario& s);

/// lambda_{l,t}: 1 in service, 0 out. Throws std::out_of_range on bad id or hour.
int line_status(const Scenario& s, int line_id, int hour);

}  // namespace resq
