#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "resq/assemble.hpp"
#include "resq/equilibrium.hpp"
#include "resq/ipm.hpp"
#include "resq/scenario.hpp"

namespace resq {

/// A small CSV table. Cells are formatted when the table is built.
struct Table {
  std::string name;  // file stem
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_csv() const;
};

/// Nine significant digits; magnitudes below 1e-9 print as 0.
std::string format_number(double v);

/// load_served, station_power, prices, incentives, ev_flows and soc, in
/// that order. Row order follows node, hour and group ids, so the output
/// depends only on the solution values.
std::vector<Table> results_tables(const Scenario& s, const Assembly& a, const SolutionBundle& b,
                                  const EquilibriumReport& r);

/// Writes every table as `<name>.csv` under `dir`, creating it if needed.
void write_tables(const std::filesystem::path& dir, const std::vector<Table>& tables);

/// Bundle, metrics and report, with the scenario embedded so the file is
/// self-contained. Primal values are keyed by variable name, duals by row name.
std::string solution_json(const Scenario& s, const Assembly& a, const SolutionBundle& b, const EquilibriumReport& r);

struct LoadedSolution {
  Scenario scenario;
  Assembly assembly;
  SolutionBundle bundle;
};

/// Parses a `solution.json`, rebuilds the program from the embedded scenario
/// and maps the stored values back onto it. Throws std::runtime_error for
/// malformed files or values that do not match the program.
LoadedSolution load_solution(const std::filesystem::path& path);

}  // namespace resq
