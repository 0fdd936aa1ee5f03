#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "resq/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Equilibrium dispatch of a distribution feeder, EV aggregators and drivers during restoration"};
  app.require_subcommand(1);

  std::string scenario, out, solution, param;
  double tol = 1e-8, verify_tol = 1e-6;

  auto* solve = app.add_subcommand("solve", "Solve a scenario, verify the equilibrium and write results");
  solve->add_option("scenario", scenario, "Scenario JSON file")->required();
  solve->add_option("--out", out, "Output directory")->required();
  solve->add_option("--tol", tol, "Relative duality-gap tolerance")->capture_default_str();

  auto* verify = app.add_subcommand("verify", "Re-check a stored solution.json");
  verify->add_option("solution", solution, "solution.json written by solve")->required();
  verify->add_option("--tol", verify_tol, "Best-response tolerance")->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "Solve once per parameter value");
  sweep->add_option("scenario", scenario, "Scenario JSON file")->required();
  sweep->add_option("--param", param, "key=v1,v2,... with key in soc_dep, beta1, beta2, cdeg")->required();
  sweep->add_option("--out", out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : resq::kExitUsage;
  }

  if (solve->parsed()) return resq::cmd_solve(scenario, out, tol, std::cerr);
  if (verify->parsed()) return resq::cmd_verify(solution, verify_tol, std::cerr);
  return resq::cmd_sweep(scenario, param, out, std::cerr);
}
