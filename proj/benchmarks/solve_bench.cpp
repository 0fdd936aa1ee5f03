#include <benchmark/benchmark.h>

#include <filesystem>
#include <string>

#include "resq/assemble.hpp"
#include "resq/equilibrium.hpp"
#include "resq/oracle.hpp"

using namespace resq;

namespace {

Scenario scenario(const std::string& name) { return load_scenario(std::filesystem::path(RESQ_DATA_DIR) / name); }

void BM_Assemble(benchmark::State& state) {
  const Scenario s = scenario("reference.json");
  for (auto _ : state) benchmark::DoNotOptimize(assemble(s));
}

void BM_SolveReference(benchmark::State& state) {
  Scenario s = scenario("reference.json");
  for (auto& g : s.ev_groups) g.soc_dep = state.range(0) / 10.0;
  const Assembly a = assemble(s);
  int iters = 0;
  for (auto _ : state) {
    const SolutionBundle b = solve_scenario(s, a, 1e-8);
    iters = b.iterations;
    benchmark::DoNotOptimize(b.primal.data());
  }
  state.counters["ipm_iterations"] = iters;
}

void BM_VerifyReference(benchmark::State& state) {
  const Scenario s = scenario("reference.json");
  const Assembly a = assemble(s);
  const SolutionBundle b = solve_scenario(s, a, 1e-8);
  for (auto _ : state) benchmark::DoNotOptimize(verify_equilibrium(s, a, b).pass());
}

void BM_Oracle(benchmark::State& state, const char* file) {
  const Scenario s = scenario(file);
  int iters = 0;
  for (auto _ : state) iters = fixed_point_oracle(s).iterations;
  state.counters["rounds"] = iters;
}

}  // namespace

BENCHMARK(BM_Assemble)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolveReference)->Arg(5)->Arg(7)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_VerifyReference)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Oracle, dg_load, "tiny_dg_load.json")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Oracle, two_stations, "tiny_two_stations.json")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Oracle, v2g, "tiny_v2g.json")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
