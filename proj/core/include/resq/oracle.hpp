#pragma once

#include <map>
#include <string>

#include "resq/equilibrium.hpp"
#include "resq/scenario.hpp"

namespace resq {

struct OracleOptions {
  int max_iter = 2000;
  double damping = 5.0;  // price step gamma
  double penalty = 5.0;  // proximal weight on clearing mismatches
  double tol = 1e-8;     // clearing mismatch and per-iteration change
};

struct OracleResult {
  std::map<std::string, double> primal;  // by variable name
  PriceMap rho;
  IncentiveMap alpha;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  bool oscillating = false;
  std::string message;
};

/// Decentralised reference solution for tiny instances (at most two supply
/// nodes, two stations and three hours). Each iteration lets the DSO, the
/// DG owners, the aggregator and the drivers best-respond in turn to the
/// current prices, each penalised by (penalty/2) * mismatch^2 against the
/// others' latest quantities, then moves the prices
///   rho   += damping * (p^s - p^DG - p^CS)
///   alpha += damping * (q' - q).
/// Non-convergence is reported, not thrown. Throws std::invalid_argument for
/// instances above the size limits.
OracleResult fixed_point_oracle(const Scenario& s, const OracleOptions& o = {});

}  // namespace resq
