#pragma once

#include <optional>
#include <string>
#include <vector>

#include "resq/program.hpp"

namespace resq {

enum class SolveStatus { Optimal, Infeasible, Unbounded, IterationLimit };

std::string to_string(SolveStatus s);
SolveStatus solve_status_from_string(const std::string& s);

struct SolverOptions {
  double gap_tol = 1e-8;    // relative duality gap
  double feas_tol = 1e-9;   // scaled primal/dual residual
  int max_iter = 300;
  bool diagnose_infeasibility = true;
  bool verbose = false;
};

/// Result of a solve. Row duals follow one convention everywhere: the
/// derivative of the optimal objective (in the program's own sense) with
/// respect to the row's right-hand side.
struct SolutionBundle {
  SolveStatus status = SolveStatus::IterationLimit;
  std::vector<double> primal;
  std::vector<double> duals;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  std::optional<double> gap;  // only when optimal
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
  double wall_seconds = 0.0;
  std::vector<std::string> infeasibility_hint;

  bool optimal() const { return status == SolveStatus::Optimal; }
};

/// Primal-dual interior-point method (Mehrotra predictor-corrector) for the
/// separable convex programs built by `Program`. Single threaded and
/// deterministic.
SolutionBundle solve(const Program& p, const SolverOptions& opts = {});

/// |primal - dual| / (1 + |primal|). Throws std::logic_error unless optimal.
double duality_gap(const SolutionBundle& b);

}  // namespace resq
