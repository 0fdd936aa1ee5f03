// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "resq/assemble.hpp"
#include "resq/commands.hpp"
#include "resq/equilibrium.hpp"
#include "resq/oracle.hpp"
#include "resq/power.hpp"
#include "resq/traffic.hpp"
#include "support.hpp"

using namespace resq;
namespace fs = std::filesystem;

namespace {

struct Run {
  Scenario s;
  Assembly a;
  SolutionBundle b;
  EquilibriumReport report;
  double seconds = 0.0;
  double loss = 0.0;
};

Run run(Scenario s, double tol = 1e-8) {
  Run r{std::move(s), {}, {}, {}, 0.0, 0.0};
  const auto t0 = std::chrono::steady_clock::now();
  r.a = assemble(r.s);
  r.b = solve_scenario(r.s, r.a, tol);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (r.b.optimal()) {
    r.report = verify_equilibrium(r.s, r.a, r.b);
    r.loss = served_load_metrics(r.a.program, r.b.primal, r.s).total_load_loss;
  }
  return r;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double mean_rho(const Run& r, int node, int from, int to) {
  double sum = 0.0;
  for (int t = from; t < to; ++t) sum += r.report.rho.at({node, t});
  return sum / (to - from);
}

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  if (!pass) ++failures;
}

void guarded(int id, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, false, std::string("exception: ") + e.what());
  }
}

}  // namespace

int main() {
  const Run hi = run(test::reference_with_soc_dep(0.7));
  const Run lo = run(test::reference_with_soc_dep(0.5));
  const bool both = hi.b.optimal() && lo.b.optimal();

  // Outage window on line 1, taken from the scenario.
  int out_from = 0, out_to = 0;
  for (const auto& o : hi.s.outages)
    if (o.line == 1) out_from = o.from_t, out_to = o.to_t;

  guarded(1, [&] {
    const double ratio = lo.loss / hi.loss;
    const bool calibrated = hi.loss >= 2.0 && hi.loss <= 2.6;
    const bool pass = both && out_from == 10 && out_to == 20 && lo.loss > 0.0 && lo.loss < hi.loss &&
                      (!calibrated || ratio <= 0.6) && hi.seconds <= 60.0 && lo.seconds <= 60.0;
    report(1, pass,
           fmt("loss(0.7)=%.4f pu loss(0.5)=%.4f pu ratio=%.3f", hi.loss, lo.loss, ratio) +
               fmt(" solve %.3fs/%.3fs", hi.seconds, lo.seconds));
  });

  guarded(2, [&] {
    double worst = 0.0;
    for (const Run* r : {&hi, &lo}) {
      const auto m = served_load_metrics(r->a.program, r->b.primal, r->s);
      for (int t = 1; t <= r->s.horizon; ++t)
        worst = std::max(worst, std::abs(m.expected.at(3)[t - 1] - m.served.at(3)[t - 1]));
    }
    report(2, both && worst <= 1e-6, fmt("max shortfall at node 3 = %.2e pu", worst));
  });

  guarded(3, [&] {
    bool pass = both;
    double spike = 1e300, excess = -1e300;
    for (const auto& n : hi.s.dist_nodes) {
      if (!n.is_load) continue;
      for (const Run* r : {&hi, &lo}) spike = std::min(spike, mean_rho(*r, n.id, out_from, out_to) - mean_rho(*r, n.id, 1, out_from));
      const double d = mean_rho(lo, n.id, out_from, out_to) - mean_rho(hi, n.id, out_from, out_to);
      excess = std::max(excess, d);
      pass = pass && d <= 1e-6;
    }
    pass = pass && spike > 0.0;
    report(3, pass, fmt("min outage-minus-pre-outage mean price=%.4g; max rho(0.5)-rho(0.7)=%.2e", spike, excess));
  });

  guarded(4, [&] {
    double worst = 1e300;
    for (const auto& [k, a7] : hi.report.alpha) worst = std::min(worst, lo.report.alpha.at(k) - a7);
    report(4, both && worst >= -1e-6, fmt("min alpha(0.5)-alpha(0.7)=%.4g $/veh", worst));
  });

  guarded(5, [&] {
    std::vector<Run> runs;
    for (const char* f : {"tiny_dg_load.json", "tiny_two_stations.json", "tiny_v2g.json"})
      runs.push_back(run(load_scenario(test::data_file(f))));
    int total = 0, ok = 0;
    std::string failed;
    for (const Run* r : {&hi, &lo}) total += 1, ok += r->b.optimal() && r->report.pass();
    for (const Run& r : runs) total += 1, ok += r.b.optimal() && r.report.pass();
    for (const Run* r : {&hi, &lo})
      for (const auto& c : r->report.checks)
        if (!c.pass) failed += " " + c.name;
    report(5, ok == total, std::to_string(ok) + "/" + std::to_string(total) + " scenarios certified" + failed);
  });

  guarded(6, [&] {
    bool pass = true;
    std::string detail;
    for (const char* f : {"tiny_dg_load.json", "tiny_two_stations.json", "tiny_v2g.json"}) {
      const Scenario s = load_scenario(test::data_file(f));
      const auto t0 = std::chrono::steady_clock::now();
      const OracleResult o = fixed_point_oracle(s);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      const Run r = run(s, 1e-10);
      double diff = 0.0;
      for (const auto& [name, v] : o.primal)
        if (auto j = r.a.program.find_var(name)) diff = std::max(diff, std::abs(v - r.b.primal[*j]));
      const bool ok = o.converged && r.b.optimal() && diff <= 1e-4 && secs < 1.0 && r.seconds < 1.0;
      pass = pass && ok;
      detail += std::string(" ") + f + fmt(" diff=%.1e oracle=%.3fs", diff, secs);
    }
    report(6, pass, detail);
  });

  guarded(7, [&] {
    // bpr derivative by central differences
    RoadLink link;
    link.t0 = 0.2;
    link.cap = 20.0;
    double fd_err = 0.0;
    for (double v : {0.5, 10.0, 20.0, 35.0}) {
      const double h = 1e-4;
      fd_err = std::max(fd_err, std::abs((bpr_integral(link, v + h) - bpr_integral(link, v - h)) / (2 * h) -
                                         bpr_time(link, v)));
    }
    // SOC telescoping, outaged flows and voltage drop on the reference solutions
    double tele = 0.0, outage = 0.0, vdrop = 0.0;
    for (const Run* r : {&hi, &lo}) {
      const auto& x = r->b.primal;
      for (const auto& gv : r->a.fleet.groups) {
        double net = 0.0;
        for (const auto& [k, j] : gv.p) net -= x[j];
        tele = std::max(tele, std::abs(x[gv.soc.at(gv.group->t_dep)] - x[gv.soc.at(gv.group->t_arr)] -
                                       net / gv.group->capacity_kwh));
      }
      for (const auto& pb : r->a.power)
        for (const auto& l : r->s.dist_lines) {
          const LineVars& lv = pb.lines.at(l.id);
          if (line_status(r->s, l.id, pb.hour) == 0) {
            outage = std::max({outage, std::abs(x[lv.pf]), std::abs(x[lv.qf])});
          } else {
            const double d = x[pb.nodes.at(l.from).v] - x[pb.nodes.at(l.to).v] - 2 * (l.r * x[lv.pf] + l.x * x[lv.qf]);
            vdrop = std::max(vdrop, std::abs(d));
          }
        }
    }
    const bool pass = both && fd_err <= 1e-8 && tele <= 1e-8 && outage <= 1e-8 && vdrop <= 1e-8;
    report(7, pass,
           fmt("bpr fd=%.1e soc=%.1e outage flow=%.1e", fd_err, tele, outage) + fmt(" vdrop=%.1e", vdrop));
  });

  guarded(8, [&] {
    const fs::path a = test::scratch_dir("accept_a"), b = test::scratch_dir("accept_b");
    std::ostringstream log;
    const int ca = cmd_solve(test::data_file("reference.json"), a, 1e-8, log);
    const int cb = cmd_solve(test::data_file("reference.json"), b, 1e-8, log);
    int same = 0, files = 0;
    for (const auto& e : fs::directory_iterator(a)) {
      if (e.path().extension() != ".csv") continue;
      ++files;
      same += test::slurp(e.path()) == test::slurp(b / e.path().filename());
    }
    report(8, ca == kExitOk && cb == kExitOk && files == 6 && same == files,
           std::to_string(same) + "/" + std::to_string(files) + " csv files byte-identical");
  });

  return failures == 0 ? 0 : 1;
}
