#include "resq/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <set>
#include <sstream>

#include "json.hpp"

namespace resq {

using nlohmann::json;

namespace {

class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  const json& raw() const { return j_; }
  const std::string& path() const { return path_; }

  bool has(const char* key) const { return j_.is_object() && j_.contains(key); }

  Reader at(const char* key) const {
    if (!has(key)) fail(child(key), "missing required field");
    return Reader(j_.at(key), child(key));
  }

  Reader at(std::size_t i) const {
    return Reader(j_.at(i), path_ + "[" + std::to_string(i) + "]");
  }

  std::size_t size() const { return j_.size(); }

  double number(const char* key) const {
    auto r = at(key);
    if (!r.j_.is_number()) fail(r.path_, "expected a number");
    return r.j_.get<double>();
  }
  double number(const char* key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }

  int integer(const char* key) const {
    auto r = at(key);
    if (!r.j_.is_number_integer()) fail(r.path_, "expected an integer");
    return r.j_.get<int>();
  }
  int integer(const char* key, int fallback) const {
    return has(key) ? integer(key) : fallback;
  }

  bool boolean(const char* key, bool fallback) const {
    if (!has(key)) return fallback;
    auto r = at(key);
    if (!r.j_.is_boolean()) fail(r.path_, "expected a boolean");
    return r.j_.get<bool>();
  }

  Reader array(const char* key) const {
    auto r = at(key);
    if (!r.j_.is_array()) fail(r.path_, "expected an array");
    return r;
  }

  Reader object(const char* key) const {
    auto r = at(key);
    if (!r.j_.is_object()) fail(r.path_, "expected an object");
    return r;
  }

  /// Scalar broadcast to every hour, or an array of exactly `horizon` values.
  HourlySeries series(const char* key, int horizon, double fallback) const {
    if (!has(key)) return HourlySeries(horizon, fallback);
    auto r = at(key);
    if (r.j_.is_number()) return HourlySeries(horizon, r.j_.get<double>());
    if (!r.j_.is_array()) fail(r.path_, "expected a number or an hourly array");
    if (static_cast<int>(r.j_.size()) != horizon)
      fail(r.path_, "hourly array must have " + std::to_string(horizon) + " entries");
    HourlySeries out;
    out.reserve(horizon);
    for (std::size_t i = 0; i < r.j_.size(); ++i) {
      if (!r.j_[i].is_number()) fail(r.path_ + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back(r.j_[i].get<double>());
    }
    return out;
  }

  [[noreturn]] static void fail(const std::string& path, const std::string& what) {
    throw ScenarioError(path + ": " + what);
  }

 private:
  std::string child(const char* key) const {
    return path_.empty() ? std::string(key) : path_ + "." + key;
  }

  const json& j_;
  std::string path_;
};

int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + offset, '\n'));
}

json series_json(const HourlySeries& s) {
  if (!s.empty() && std::all_of(s.begin(), s.end(), [&](double v) { return v == s.front(); }))
    return s.front();
  return json(s);
}

template <class T, class Key>
void sort_by(std::vector<T>& v, Key key) {
  std::stable_sort(v.begin(), v.end(), [&](const T& a, const T& b) { return key(a) < key(b); });
}

}  // namespace

const DistNode& Scenario::node(int id) const {
  for (const auto& n : dist_nodes)
    if (n.id == id) return n;
  throw std::out_of_range("unknown distribution node " + std::to_string(id));
}

const DistLine& Scenario::line(int id) const {
  for (const auto& l : dist_lines)
    if (l.id == id) return l;
  throw std::out_of_range("unknown distribution line " + std::to_string(id));
}

bool Scenario::has_node(int id) const {
  return std::any_of(dist_nodes.begin(), dist_nodes.end(), [&](const DistNode& n) { return n.id == id; });
}

bool Scenario::has_line(int id) const {
  return std::any_of(dist_lines.begin(), dist_lines.end(), [&](const DistLine& l) { return l.id == id; });
}

std::vector<int> Scenario::transport_nodes() const {
  std::set<int> ids;
  for (const auto& a : road_links) {
    ids.insert(a.from);
    ids.insert(a.to);
  }
  for (const auto& c : cs_map) ids.insert(c.transport_node);
  for (const auto& g : ev_groups) ids.insert(g.origin);
  for (const auto& od : background_od) {
    ids.insert(od.origin);
    ids.insert(od.dest);
  }
  return {ids.begin(), ids.end()};
}

std::vector<int> Scenario::stations() const {
  std::vector<int> out;
  out.reserve(cs_map.size());
  for (const auto& c : cs_map) out.push_back(c.transport_node);
  return out;
}

int Scenario::station_of_dist_node(int dist_node) const {
  for (const auto& c : cs_map)
    if (c.dist_node == dist_node) return c.transport_node;
  throw std::out_of_range("distribution node " + std::to_string(dist_node) + " is not a charging station");
}

int Scenario::dist_node_of_station(int transport_node) const {
  for (const auto& c : cs_map)
    if (c.transport_node == transport_node) return c.dist_node;
  throw std::out_of_range("transport node " + std::to_string(transport_node) + " is not a charging station");
}

double Scenario::beta0(int station_transport_node) const {
  auto it = behavior.beta0.find(station_transport_node);
  return it == behavior.beta0.end() ? 0.0 : it->second;
}

std::vector<int> Scenario::arrival_hours() const {
  std::set<int> hours;
  for (const auto* g : active_groups()) hours.insert(g->t_arr);
  for (const auto& od : background_od)
    for (const auto& [tau, q] : od.demand)
      if (q > 0.0) hours.insert(tau);
  return {hours.begin(), hours.end()};
}

std::vector<const EvGroup*> Scenario::groups_arriving(int tau) const {
  std::vector<const EvGroup*> out;
  for (const auto& g : ev_groups)
    if (g.fleet > 0.0 && g.t_arr == tau) out.push_back(&g);
  return out;
}

std::vector<const EvGroup*> Scenario::active_groups() const {
  std::vector<const EvGroup*> out;
  for (const auto& g : ev_groups)
    if (g.fleet > 0.0) out.push_back(&g);
  return out;
}

void canonicalize(Scenario& s) {
  sort_by(s.dist_nodes, [](const DistNode& n) { return n.id; });
  sort_by(s.dist_lines, [](const DistLine& l) { return l.id; });
  sort_by(s.dg_units, [](const DgUnit& g) { return g.node; });
  sort_by(s.road_links, [](const RoadLink& a) { return a.id; });
  sort_by(s.ev_groups, [](const EvGroup& g) { return std::pair(g.origin, g.cls); });
  sort_by(s.background_od, [](const BackgroundOd& od) { return std::pair(od.origin, od.dest); });
  sort_by(s.cs_map, [](const StationLink& c) { return c.dist_node; });
  sort_by(s.outages, [](const Outage& o) { return std::tuple(o.line, o.from_t, o.to_t); });
}

Scenario parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError("line " + std::to_string(line_of_offset(text, e.byte)) + ": " + e.what());
  }
  if (!doc.is_object()) throw ScenarioError("<root>: expected an object");

  Reader root(doc, "");
  Scenario s;

  auto base = root.object("base");
  s.s_base_kva = base.number("s_base_kva");
  s.horizon = base.integer("horizon", 24);
  if (s.horizon < 1) Reader::fail("base.horizon", "must be at least 1");
  const int T = s.horizon;
  if (base.has("outages")) {
    auto arr = base.array("outages");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      auto o = arr.at(i);
      s.outages.push_back({o.integer("line"), o.integer("from_t"), o.integer("to_t")});
    }
  }

  auto nodes = root.array("dist_nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    auto r = nodes.at(i);
    DistNode n;
    n.id = r.integer("id");
    n.is_load = r.boolean("load", false);
    n.is_dg = r.boolean("dg", false);
    n.is_cs = r.boolean("cs", false);
    n.weight = r.series("weight", T, 0.0);
    n.p_load = r.series("p_load", T, 0.0);
    n.q_load = r.series("q_load", T, 0.0);
    n.v_min = r.number("v_min", 0.95);
    n.v_max = r.number("v_max", 1.05);
    s.dist_nodes.push_back(std::move(n));
  }

  std::set<int> node_ids;
  for (const auto& n : s.dist_nodes) {
    if (!node_ids.insert(n.id).second)
      throw ScenarioError("dist_nodes: duplicate node id " + std::to_string(n.id));
  }
  auto require_node = [&](const Reader& r, const char* key) {
    int id = r.integer(key);
    if (!node_ids.count(id))
      Reader::fail(r.path() + "." + key, "unknown distribution node " + std::to_string(id));
    return id;
  };

  if (root.has("dist_lines")) {
    auto lines = root.array("dist_lines");
    for (std::size_t i = 0; i < lines.size(); ++i) {
      auto r = lines.at(i);
      DistLine l;
      l.id = r.integer("id");
      l.from = require_node(r, "from");
      l.to = require_node(r, "to");
      l.r = r.number("r");
      l.x = r.number("x");
      l.s_max = r.number("s_max");
      s.dist_lines.push_back(l);
    }
  }
  std::set<int> line_ids;
  for (const auto& l : s.dist_lines)
    if (!line_ids.insert(l.id).second)
      throw ScenarioError("dist_lines: duplicate line id " + std::to_string(l.id));
  for (std::size_t i = 0; i < s.outages.size(); ++i)
    if (!line_ids.count(s.outages[i].line))
      Reader::fail("base.outages[" + std::to_string(i) + "].line",
                   "unknown distribution line " + std::to_string(s.outages[i].line));

  if (root.has("dg_units")) {
    auto dgs = root.array("dg_units");
    for (std::size_t i = 0; i < dgs.size(); ++i) {
      auto r = dgs.at(i);
      DgUnit g;
      g.node = require_node(r, "node");
      g.p_min = r.series("p_min", T, 0.0);
      g.p_max = r.series("p_max", T, 0.0);
      g.c1 = r.number("c1", 0.0);
      g.c2 = r.number("c2", 0.0);
      s.dg_units.push_back(std::move(g));
    }
  }

  if (root.has("road_links")) {
    auto links = root.array("road_links");
    for (std::size_t i = 0; i < links.size(); ++i) {
      auto r = links.at(i);
      RoadLink a;
      a.id = r.integer("id");
      a.from = r.integer("from");
      a.to = r.integer("to");
      a.t0 = r.number("t0");
      a.cap = r.number("cap");
      a.bpr_alpha = r.number("bpr_alpha", 0.15);
      a.bpr_beta = r.number("bpr_beta", 4.0);
      s.road_links.push_back(a);
    }
  }

  if (root.has("ev_groups")) {
    auto groups = root.array("ev_groups");
    for (std::size_t i = 0; i < groups.size(); ++i) {
      auto r = groups.at(i);
      EvGroup g;
      g.origin = r.integer("origin");
      g.cls = r.integer("class");
      g.t_arr = r.integer("t_arr");
      g.t_dep = r.integer("t_dep");
      g.soc_arr = r.number("soc_arr");
      g.soc_dep = r.number("soc_dep");
      g.soc_min = r.number("soc_min", 0.0);
      g.soc_max = r.number("soc_max", 1.0);
      g.capacity_kwh = r.number("capacity_kwh", 50.0);
      g.fleet = r.number("fleet");
      g.c_deg = r.number("c_deg", 0.03);
      s.ev_groups.push_back(g);
    }
  }

  if (root.has("background_od")) {
    auto ods = root.array("background_od");
    for (std::size_t i = 0; i < ods.size(); ++i) {
      auto r = ods.at(i);
      BackgroundOd od;
      od.origin = r.integer("origin");
      od.dest = r.integer("dest");
      auto dem = r.array("demand");
      for (std::size_t k = 0; k < dem.size(); ++k) {
        auto d = dem.at(k);
        od.demand[d.integer("hour")] = d.number("flow");
      }
      s.background_od.push_back(std::move(od));
    }
  }

  if (root.has("cs_map")) {
    auto cs = root.array("cs_map");
    for (std::size_t i = 0; i < cs.size(); ++i) {
      auto r = cs.at(i);
      s.cs_map.push_back({require_node(r, "dist_node"), r.integer("transport_node")});
    }
  }

  if (root.has("behavior")) {
    auto b = root.object("behavior");
    s.behavior.beta1 = b.number("beta1", 1.0);
    s.behavior.beta2 = b.number("beta2", 1.0);
    if (b.has("beta0")) {
      auto arr = b.array("beta0");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        auto r = arr.at(i);
        s.behavior.beta0[r.integer("station")] = r.number("value");
      }
    }
  }

  if (root.has("solver")) {
    auto sv = root.object("solver");
    s.solver.tol = sv.number("tol", 1e-8);
    s.solver.max_iter = sv.integer("max_iter", 300);
    s.solver.charger_kw = sv.number("charger_kw", 10.0);
  }

  canonicalize(s);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(path.string() + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string serialize_scenario(const Scenario& s) {
  json doc;
  json base = {{"s_base_kva", s.s_base_kva}, {"horizon", s.horizon}};
  base["outages"] = json::array();
  for (const auto& o : s.outages)
    base["outages"].push_back({{"line", o.line}, {"from_t", o.from_t}, {"to_t", o.to_t}});
  doc["base"] = base;

  doc["dist_nodes"] = json::array();
  for (const auto& n : s.dist_nodes) {
    doc["dist_nodes"].push_back({{"id", n.id},
                                 {"load", n.is_load},
                                 {"dg", n.is_dg},
                                 {"cs", n.is_cs},
                                 {"weight", series_json(n.weight)},
                                 {"p_load", series_json(n.p_load)},
                                 {"q_load", series_json(n.q_load)},
                                 {"v_min", n.v_min},
                                 {"v_max", n.v_max}});
  }
  doc["dist_lines"] = json::array();
  for (const auto& l : s.dist_lines)
    doc["dist_lines"].push_back(
        {{"id", l.id}, {"from", l.from}, {"to", l.to}, {"r", l.r}, {"x", l.x}, {"s_max", l.s_max}});
  doc["dg_units"] = json::array();
  for (const auto& g : s.dg_units)
    doc["dg_units"].push_back({{"node", g.node},
                               {"p_min", series_json(g.p_min)},
                               {"p_max", series_json(g.p_max)},
                               {"c1", g.c1},
                               {"c2", g.c2}});
  doc["road_links"] = json::array();
  for (const auto& a : s.road_links)
    doc["road_links"].push_back({{"id", a.id},
                                 {"from", a.from},
                                 {"to", a.to},
                                 {"t0", a.t0},
                                 {"cap", a.cap},
                                 {"bpr_alpha", a.bpr_alpha},
                                 {"bpr_beta", a.bpr_beta}});
  doc["ev_groups"] = json::array();
  for (const auto& g : s.ev_groups)
    doc["ev_groups"].push_back({{"origin", g.origin},
                                {"class", g.cls},
                                {"t_arr", g.t_arr},
                                {"t_dep", g.t_dep},
                                {"soc_arr", g.soc_arr},
                                {"soc_dep", g.soc_dep},
                                {"soc_min", g.soc_min},
                                {"soc_max", g.soc_max},
                                {"capacity_kwh", g.capacity_kwh},
                                {"fleet", g.fleet},
                                {"c_deg", g.c_deg}});
  doc["background_od"] = json::array();
  for (const auto& od : s.background_od) {
    json dem = json::array();
    for (const auto& [tau, q] : od.demand) dem.push_back({{"hour", tau}, {"flow", q}});
    doc["background_od"].push_back({{"origin", od.origin}, {"dest", od.dest}, {"demand", dem}});
  }
  doc["cs_map"] = json::array();
  for (const auto& c : s.cs_map)
    doc["cs_map"].push_back({{"dist_node", c.dist_node}, {"transport_node", c.transport_node}});
  json beta0 = json::array();
  for (const auto& [st, v] : s.behavior.beta0) beta0.push_back({{"station", st}, {"value", v}});
  doc["behavior"] = {{"beta1", s.behavior.beta1}, {"beta2", s.behavior.beta2}, {"beta0", beta0}};
  doc["solver"] = {{"tol", s.solver.tol},
                   {"max_iter", s.solver.max_iter},
                   {"charger_kw", s.solver.charger_kw}};
  return doc.dump(2);
}

std::vector<std::string> validate_scenario(const Scenario& s) {
  std::vector<std::string> out;
  auto add = [&](std::string msg) { out.push_back(std::move(msg)); };
  const int T = s.horizon;
  auto sized = [&](const HourlySeries& v) { return static_cast<int>(v.size()) == T; };

  if (!(s.s_base_kva > 0.0)) add("base: s_base_kva must be positive");
  if (!(s.behavior.beta1 > 0.0)) add("behavior: beta1 must be positive");
  if (!(s.behavior.beta2 > 0.0)) add("behavior: beta2 must be positive");

  for (const auto& n : s.dist_nodes) {
    const std::string at = "node " + std::to_string(n.id) + ": ";
    if (!(n.v_min < n.v_max)) add(at + "voltage band empty");
    if (n.v_min < 0.0) add(at + "negative voltage bound");
    if (!sized(n.weight) || !sized(n.p_load) || !sized(n.q_load)) {
      add(at + "hourly series length differs from horizon");
      continue;
    }
    for (int t = 1; t <= T; ++t) {
      const double p = n.p_load[t - 1], q = n.q_load[t - 1];
      if (p < 0.0) add(at + "negative expected load at t=" + std::to_string(t));
      if (n.weight[t - 1] < 0.0) add(at + "negative load weight at t=" + std::to_string(t));
      if (p == 0.0 && q != 0.0) add(at + "undefined power factor at t=" + std::to_string(t));
      if (!n.is_load && p != 0.0) add(at + "load declared on a non-load node at t=" + std::to_string(t));
    }
  }

  for (const auto& l : s.dist_lines) {
    const std::string at = "line " + std::to_string(l.id) + ": ";
    if (l.r < 0.0 || l.x < 0.0) add(at + "negative impedance");
    if (!(l.s_max > 0.0)) add(at + "capacity must be positive");
    if (l.from == l.to) add(at + "self loop");
    if (!s.has_node(l.from) || !s.has_node(l.to)) add(at + "dangling node reference");
  }
  for (const auto& o : s.outages) {
    if (!s.has_line(o.line)) add("outage: unknown line " + std::to_string(o.line));
    if (!(1 <= o.from_t && o.from_t < o.to_t && o.to_t <= T + 1))
      add("outage on line " + std::to_string(o.line) + ": window outside horizon or empty");
  }

  std::set<int> dg_nodes;
  for (const auto& g : s.dg_units) {
    const std::string at = "dg at node " + std::to_string(g.node) + ": ";
    if (!dg_nodes.insert(g.node).second) add(at + "duplicate unit");
    if (!s.has_node(g.node) || !s.node(g.node).is_dg) add(at + "node is not flagged as dg");
    if (g.c2 < 0.0) add(at + "cost is not convex");
    if (!sized(g.p_min) || !sized(g.p_max)) {
      add(at + "hourly series length differs from horizon");
      continue;
    }
    for (int t = 1; t <= T; ++t)
      if (g.p_min[t - 1] > g.p_max[t - 1]) add(at + "generation bounds crossed at t=" + std::to_string(t));
  }
  for (const auto& n : s.dist_nodes)
    if (n.is_dg && !dg_nodes.count(n.id)) add("node " + std::to_string(n.id) + ": dg flag without a unit");

  for (const auto& a : s.road_links) {
    const std::string at = "road link " + std::to_string(a.id) + ": ";
    if (!(a.t0 > 0.0)) add(at + "free-flow time must be positive");
    if (!(a.cap > 0.0)) add(at + "capacity must be positive");
    if (a.bpr_beta < 1.0) add(at + "bpr_beta below 1");
    if (a.bpr_alpha < 0.0) add(at + "negative bpr_alpha");
    if (a.from == a.to) add(at + "self loop");
  }

  // CS <-> station bijection.
  std::set<int> mapped_dist, mapped_transport;
  for (const auto& c : s.cs_map) {
    if (!mapped_dist.insert(c.dist_node).second)
      add("cs_map: distribution node " + std::to_string(c.dist_node) + " mapped twice");
    if (!mapped_transport.insert(c.transport_node).second)
      add("cs_map: transport node " + std::to_string(c.transport_node) + " mapped twice");
    if (s.has_node(c.dist_node) && !s.node(c.dist_node).is_cs)
      add("cs_map: node " + std::to_string(c.dist_node) + " is not flagged as a charging station");
  }
  for (const auto& n : s.dist_nodes)
    if (n.is_cs && !mapped_dist.count(n.id))
      add("node " + std::to_string(n.id) + ": charging station without a transport node");

  const auto tnodes = s.transport_nodes();
  std::set<int> road_nodes;
  for (const auto& a : s.road_links) {
    road_nodes.insert(a.from);
    road_nodes.insert(a.to);
  }
  std::set<std::pair<int, int>> group_keys;
  for (const auto& g : s.ev_groups) {
    const std::string at = "ev group (" + std::to_string(g.origin) + "," + std::to_string(g.cls) + "): ";
    if (!group_keys.insert({g.origin, g.cls}).second) add(at + "duplicate group");
    if (!(g.t_arr < g.t_dep)) add(at + "empty dwell window");
    if (g.t_arr < 1 || g.t_dep > T) add(at + "dwell window outside horizon");
    if (!(g.soc_min <= g.soc_max)) add(at + "soc bounds crossed");
    if (g.soc_arr < g.soc_min || g.soc_arr > g.soc_max) add(at + "arrival soc outside bounds");
    if (g.soc_dep < g.soc_min || g.soc_dep > g.soc_max) add(at + "departure soc outside bounds");
    if (g.soc_min < 0.0 || g.soc_max > 1.0) add(at + "soc bounds outside [0,1]");
    if (g.fleet < 0.0) add(at + "negative fleet size");
    if (!(g.capacity_kwh > 0.0)) add(at + "battery capacity must be positive");
    if (g.c_deg < 0.0) add(at + "negative degradation cost");
    if (g.fleet > 0.0 && !road_nodes.count(g.origin)) add(at + "origin not in road graph");
  }
  if (!s.active_groups().empty()) {
    if (s.cs_map.empty()) add("ev groups present but no charging stations");
    for (const auto& c : s.cs_map)
      if (!road_nodes.count(c.transport_node))
        add("station " + std::to_string(c.transport_node) + ": not in road graph");
  }
  for (const auto& od : s.background_od) {
    const std::string at = "background od (" + std::to_string(od.origin) + "," + std::to_string(od.dest) + "): ";
    if (!road_nodes.count(od.origin) || !road_nodes.count(od.dest)) add(at + "endpoint not in road graph");
    for (const auto& [tau, q] : od.demand) {
      if (q < 0.0) add(at + "negative demand");
      if (tau < 1 || tau > T) add(at + "arrival hour outside horizon");
    }
  }

  // Feeder connectivity ignoring outages.
  if (!s.dist_nodes.empty()) {
    std::map<int, std::vector<int>> adj;
    for (const auto& l : s.dist_lines) {
      adj[l.from].push_back(l.to);
      adj[l.to].push_back(l.from);
    }
    std::set<int> seen{s.dist_nodes.front().id};
    std::queue<int> todo;
    todo.push(s.dist_nodes.front().id);
    while (!todo.empty()) {
      int u = todo.front();
      todo.pop();
      for (int w : adj[u])
        if (seen.insert(w).second) todo.push(w);
    }
    if (seen.size() != s.dist_nodes.size()) add("feeder graph is not connected");
  }
  return out;
}

int line_status(const Scenario& s, int line_id, int hour) {
  if (!s.has_line(line_id)) throw std::out_of_range("unknown line " + std::to_string(line_id));
  if (hour < 1 || hour > s.horizon) throw std::out_of_range("hour " + std::to_string(hour) + " outside horizon");
  for (const auto& o : s.outages)
    if (o.line == line_id && o.from_t <= hour && hour < o.to_t) return 0;
  return 1;
}

}  // namespace resq
