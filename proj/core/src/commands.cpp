#include "resq/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "resq/assemble.hpp"
#include "resq/equilibrium.hpp"
#include "resq/power.hpp"
#include "resq/results.hpp"

namespace resq {

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

void report_failures(const EquilibriumReport& r, std::ostream& log) {
  for (const auto& c : r.checks)
    if (!c.pass) log << "check failed: " << c.name << " residual " << c.residual << " > " << c.tolerance << "\n";
}

struct RunOutcome {
  int code = kExitOk;
  std::string status;
  double loss = 0.0;
  double objective = 0.0;
  double gap = 0.0;
  bool verified = false;
  std::string message;
};

RunOutcome solve_and_check(const Scenario& s) {
  RunOutcome o;
  const Assembly a = assemble(s);
  const SolutionBundle b = solve_scenario(s, a, s.solver.tol);
  o.status = to_string(b.status);
  if (!b.optimal()) {
    o.code = kExitInfeasible;
    o.message = "solver status " + o.status;
    return o;
  }
  const EquilibriumReport r = verify_equilibrium(s, a, b);
  o.loss = served_load_metrics(a.program, b.primal, s).total_load_loss;
  o.objective = b.primal_objective;
  o.gap = b.gap.value_or(0.0);
  o.verified = r.pass();
  o.code = o.verified ? kExitOk : kExitUnverified;
  return o;
}

}  // namespace

int cmd_solve(const std::filesystem::path& scenario, const std::filesystem::path& out, double tol, std::ostream& log) {
  Scenario s;
  try {
    s = load_scenario(scenario);
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  try {
    const Assembly a = assemble(s);
    const SolutionBundle b = solve_scenario(s, a, tol);
    log << "status " << to_string(b.status) << " after " << b.iterations << " iterations\n";
    if (!b.optimal()) {
      for (const auto& h : b.infeasibility_hint) log << "  conflicting row: " << h << "\n";
      return kExitInfeasible;
    }
    VerifyOptions vo;
    vo.probe_degeneracy = true;
    const EquilibriumReport r = verify_equilibrium(s, a, b, vo);
    std::filesystem::create_directories(out);
    write_tables(out, results_tables(s, a, b, r));
    write_text(out / "solution.json", solution_json(s, a, b, r));
    log << r.to_text();
    if (r.degenerate) log << "note: clearing duals are degenerate; prices are one valid choice\n";
    if (!r.pass()) {
      report_failures(r, log);
      return kExitUnverified;
    }
    return kExitOk;
  } catch (const ScenarioError& e) {
    log << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    log << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

int cmd_verify(const std::filesystem::path& solution, double tol, std::ostream& log) {
  LoadedSolution ls;
  try {
    ls = load_solution(solution);
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (!ls.bundle.optimal()) {
    log << "stored solution is not optimal (" << to_string(ls.bundle.status) << ")\n";
    return kExitInfeasible;
  }
  VerifyOptions vo;
  vo.agent_tol = tol;
  const EquilibriumReport r = verify_equilibrium(ls.scenario, ls.assembly, ls.bundle, vo);
  log << r.to_text();
  if (!r.pass()) {
    report_failures(r, log);
    return kExitUnverified;
  }
  return kExitOk;
}

SweepSpec parse_sweep_spec(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw std::invalid_argument("sweep spec must look like key=v1,v2");
  SweepSpec spec;
  spec.key = text.substr(0, eq);
  if (spec.key != "soc_dep" && spec.key != "beta1" && spec.key != "beta2" && spec.key != "cdeg")
    throw std::invalid_argument("unknown sweep key '" + spec.key + "' (expected soc_dep, beta1, beta2 or cdeg)");
  std::stringstream rest(text.substr(eq + 1));
  std::string item;
  while (std::getline(rest, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw std::invalid_argument("bad sweep value '" + item + "'");
    spec.values.push_back(v);
  }
  if (spec.values.empty()) throw std::invalid_argument("sweep spec has no values");
  return spec;
}

unsigned sweep_workers() {
  if (const char* env = std::getenv("RESQ_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int cmd_sweep(const std::filesystem::path& scenario, const std::string& spec_text, const std::filesystem::path& out,
              std::ostream& log) {
  Scenario base;
  SweepSpec spec;
  try {
    spec = parse_sweep_spec(spec_text);
    base = load_scenario(scenario);
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  std::vector<Scenario> cases;
  for (double v : spec.values) {
    Scenario s = base;
    if (spec.key == "soc_dep")
      for (auto& g : s.ev_groups) g.soc_dep = v;
    else if (spec.key == "cdeg")
      for (auto& g : s.ev_groups) g.c_deg = v;
    else if (spec.key == "beta1")
      s.behavior.beta1 = v;
    else
      s.behavior.beta2 = v;
    cases.push_back(std::move(s));
  }

  std::vector<RunOutcome> results(cases.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < cases.size();) {
      try {
        results[k] = solve_and_check(cases[k]);
      } catch (const std::exception& e) {
        results[k].code = kExitUsage;
        results[k].status = "error";
        results[k].message = e.what();
      }
    }
  };
  const unsigned n = std::min<std::size_t>(sweep_workers(), cases.size());
  std::vector<std::thread> pool;
  for (unsigned k = 0; k < n; ++k) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  Table t{"sweep", {spec.key, "status", "total_load_loss_pu", "objective", "gap", "verified"}, {}};
  int code = kExitOk;
  for (std::size_t k = 0; k < cases.size(); ++k) {
    const RunOutcome& o = results[k];
    t.rows.push_back({format_number(spec.values[k]), o.status, format_number(o.loss), format_number(o.objective),
                      format_number(o.gap), o.verified ? "yes" : "no"});
    log << spec.key << "=" << format_number(spec.values[k]) << ": " << o.status;
    if (!o.message.empty()) log << " (" << o.message << ")";
    log << "\n";
    if (code != kExitUsage) code = o.code == kExitUsage ? kExitUsage : std::max(code, o.code);
  }
  try {
    write_tables(out, {t});
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return code;
}

}  // namespace resq
