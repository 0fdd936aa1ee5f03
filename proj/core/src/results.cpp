#include "resq/results.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "naming.hpp"
#include "resq/power.hpp"

namespace resq {

using detail::key;
using nlohmann::json;

namespace {

constexpr double kFlush = 1e-9;

std::string cell(int v) { return std::to_string(v); }
std::string cell(double v) { return format_number(v); }

template <typename... T>
std::vector<std::string> row(T... v) {
  return {cell(v)...};
}

double value_of(const Program& p, const SolutionBundle& b, const std::string& name) {
  return b.primal[p.var_index(name)];
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string format_number(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  if (std::abs(v) < kFlush) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string Table::to_csv() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) out += ',';
      out += cells[k];
    }
    out += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

std::vector<Table> results_tables(const Scenario& s, const Assembly& a, const SolutionBundle& b,
                                  const EquilibriumReport& r) {
  const Program& p = a.program;
  std::vector<Table> out;

  Table load{"load_served", {"node", "hour", "expected_pu", "served_pu"}, {}};
  const LoadMetrics m = served_load_metrics(p, b.primal, s);
  for (const auto& [node, served] : m.served)
    for (int t = 1; t <= s.horizon; ++t) load.rows.push_back(row(node, t, m.expected.at(node)[t - 1], served[t - 1]));
  out.push_back(std::move(load));

  Table station{"station_power", {"node", "hour", "p_cs_pu"}, {}};
  for (const auto& [it, j] : a.fleet.pcs) station.rows.push_back(row(it.first, it.second, b.primal[j]));
  out.push_back(std::move(station));

  Table prices{"prices", {"node", "hour", "rho_usd_per_puh"}, {}};
  for (const auto& [it, v] : r.rho) prices.rows.push_back(row(it.first, it.second, v));
  out.push_back(std::move(prices));

  Table incentives{"incentives", {"origin", "station", "class", "alpha_usd_per_veh"}, {}};
  for (const auto& [it, v] : r.alpha)
    incentives.rows.push_back(row(std::get<0>(it), std::get<1>(it), std::get<2>(it), v));
  out.push_back(std::move(incentives));

  Table flows{"ev_flows", {"origin", "station", "class", "q_veh"}, {}};
  for (const auto& [it, row_id] : a.clear_q) {
    const auto [o, st, e] = it;
    flows.rows.push_back(row(o, st, e, value_of(p, b, key("q", o, st, e))));
  }
  out.push_back(std::move(flows));

  Table soc{"soc", {"origin", "class", "hour", "soc_fraction"}, {}};
  for (const auto& gv : a.fleet.groups)
    for (const auto& [t, j] : gv.soc)
      soc.rows.push_back(row(gv.group->origin, gv.group->cls, t, b.primal[j] / gv.group->fleet));
  out.push_back(std::move(soc));
  return out;
}

void write_tables(const std::filesystem::path& dir, const std::vector<Table>& tables) {
  std::filesystem::create_directories(dir);
  for (const auto& t : tables) {
    const auto path = dir / (t.name + ".csv");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << t.to_csv();
  }
}

std::string solution_json(const Scenario& s, const Assembly& a, const SolutionBundle& b, const EquilibriumReport& r) {
  const Program& p = a.program;
  json doc;
  doc["scenario"] = json::parse(serialize_scenario(s));
  doc["status"] = to_string(b.status);
  doc["iterations"] = b.iterations;
  doc["primal_objective"] = b.primal_objective;
  doc["dual_objective"] = b.dual_objective;
  doc["primal_residual"] = b.primal_residual;
  doc["dual_residual"] = b.dual_residual;
  doc["wall_seconds"] = b.wall_seconds;
  if (b.gap) doc["gap"] = *b.gap;
  json primal = json::object(), duals = json::object();
  for (int j = 0; j < p.num_variables(); ++j) primal[p.variable(j).name] = b.primal[j];
  for (int k = 0; k < p.num_rows(); ++k) duals[p.row(k).name] = b.duals[k];
  doc["primal"] = std::move(primal);
  doc["duals"] = std::move(duals);

  const LoadMetrics m = served_load_metrics(p, b.primal, s);
  doc["metrics"] = {{"total_load_loss_pu", m.total_load_loss},
                    {"weighted_served_usd", m.weighted_served},
                    {"objective", b.primal_objective},
                    {"gap", b.gap ? *b.gap : std::nan("")},
                    {"solve_seconds", b.wall_seconds}};

  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name}, {"residual", c.residual}, {"tolerance", c.tolerance}, {"pass", c.pass}});
  doc["report"] = {{"checks", std::move(checks)}, {"degenerate", r.degenerate}, {"pass", r.pass()}};
  return doc.dump(2);
}

LoadedSolution load_solution(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path.string() + ": malformed solution file: " + e.what());
  }
  try {
    LoadedSolution out{parse_scenario(doc.at("scenario").dump()), {}, {}};
    out.assembly = assemble(out.scenario);
    const Program& p = out.assembly.program;
    SolutionBundle& b = out.bundle;
    b.status = solve_status_from_string(doc.at("status").get<std::string>());
    b.iterations = doc.at("iterations").get<int>();
    b.dual_objective = doc.at("dual_objective").get<double>();
    b.wall_seconds = doc.value("wall_seconds", 0.0);
    b.primal.assign(p.num_variables(), 0.0);
    b.duals.assign(p.num_rows(), 0.0);
    const auto& primal = doc.at("primal");
    const auto& duals = doc.at("duals");
    if (primal.size() != b.primal.size() || duals.size() != b.duals.size())
      throw std::runtime_error("stored values do not match the scenario's program");
    for (int j = 0; j < p.num_variables(); ++j) b.primal[j] = primal.at(p.variable(j).name).get<double>();
    for (int k = 0; k < p.num_rows(); ++k) b.duals[k] = duals.at(p.row(k).name).get<double>();
    // Objective and residuals are recomputed so hand edits are caught.
    b.primal_objective = p.objective(b.primal);
    b.primal_residual = p.max_violation(b.primal);
    b.dual_residual = doc.value("dual_residual", 0.0);
    if (b.optimal()) b.gap = duality_gap(b);
    return out;
  } catch (const json::exception& e) {
    throw std::runtime_error(path.string() + ": malformed solution file: " + e.what());
  }
}

}  // namespace resq
