#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace resq {

/// Process exit codes shared by all commands.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,         // unreadable input, malformed file, bad arguments
  kExitUnverified = 2,    // optimal, but an equilibrium check failed
  kExitInfeasible = 3,    // solver did not reach an optimum
};

/// Solves, verifies and writes solution.json plus the CSV tables to `out`.
int cmd_solve(const std::filesystem::path& scenario, const std::filesystem::path& out, double tol,
              std::ostream& log);

/// Re-runs every equilibrium check on a stored solution; `tol` is the
/// agent best-response tolerance.
int cmd_verify(const std::filesystem::path& solution, double tol, std::ostream& log);

struct SweepSpec {
  std::string key;  // soc_dep, beta1, beta2 or cdeg
  std::vector<double> values;
};

/// Parses `key=v1,v2,...`. Throws std::invalid_argument on unknown keys or
/// unparsable values.
SweepSpec parse_sweep_spec(const std::string& text);

/// One solve per value, run concurrently on at most RESQ_THREADS workers
/// (default: hardware concurrency). Writes `sweep.csv` with one row per value
/// in input order. The exit code is the worst over all runs.
int cmd_sweep(const std::filesystem::path& scenario, const std::string& spec, const std::filesystem::path& out,
              std::ostream& log);

/// Worker count for sweeps: RESQ_THREADS when set to a positive integer,
/// otherwise the hardware concurrency (at least 1).
unsigned sweep_workers();

}  // namespace resq
