// Serial-versus-OpenMP comparison of the two data-parallel kernels: the
// discretization-table build and the per-step sweep over all pattern OCPs.
//
//   ./benchmarks/bench_parallel [--benchmark_filter=...]

#include <benchmark/benchmark.h>

#include "stmpc/ocp.hpp"

namespace {

stmpc::LinearSystem spring_mass() {
  stmpc::LinearSystem sys;
  sys.A.resize(2, 2);
  sys.A << 0.0, 1.0, -2.0, 0.0;
  sys.B.resize(2, 1);
  sys.B << 0.0, 1.0;
  sys.u_bounds = Eigen::VectorXd::Constant(1, 8.0);
  return sys;
}

stmpc::CostWeights spring_weights() {
  return stmpc::CostWeights{Eigen::MatrixXd::Identity(2, 2),
                            Eigen::MatrixXd::Constant(1, 1, 0.5)};
}

void bench_table_build(benchmark::State& state, stmpc::Execution exec) {
  const stmpc::LinearSystem sys = spring_mass();
  const stmpc::CostWeights w = spring_weights();
  for (auto _ : state) {
    auto table = stmpc::DiscretizationTable::build(sys, w, 0.1, 80, 30, exec);
    benchmark::DoNotOptimize(table);
  }
}

void bench_solve_all(benchmark::State& state, stmpc::Execution exec) {
  const stmpc::LinearSystem sys = spring_mass();
  const stmpc::CostWeights w = spring_weights();
  const auto table = stmpc::DiscretizationTable::build(sys, w, 0.1, 80, 30);
  const auto terminal = stmpc::synthesize_terminal(sys, w, table);
  const stmpc::OCPFamily family(table, w, terminal);
  Eigen::VectorXd x0(2);
  x0 << 2.5, 0.0;
  for (auto _ : state) {
    auto solutions = family.solve_all(x0, exec);
    benchmark::DoNotOptimize(solutions);
  }
}

}  // namespace

BENCHMARK_CAPTURE(bench_table_build, serial, stmpc::Execution::serial)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bench_table_build, openmp, stmpc::Execution::parallel)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bench_solve_all, serial, stmpc::Execution::serial)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bench_solve_all, openmp, stmpc::Execution::parallel)
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
