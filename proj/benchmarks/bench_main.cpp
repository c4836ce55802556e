#include "dhym/legendre.hpp"
#include "dhym/linearized_ops.hpp"
#include "dhym/ode_solver.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

namespace {

using namespace dhym;

PeriodicProfile bump(int n, double amplitude) {
  const spectral::Mode m[] = {{1, amplitude, 0.0}, {3, 0.0, 0.2 * amplitude}};
  return PeriodicProfile::from_series(n, m);
}

void BM_SolveDHYM(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto p = ODEProblem::make(Regime::DHYM, 1.0, {0.5, 1.0, 0.3}, bump(n, 0.5));
  for (auto _ : state) benchmark::DoNotOptimize(ode::solve(p).residual_norm);
}
BENCHMARK(BM_SolveDHYM)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_SolveLargeRadius(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto p = ODEProblem::make(Regime::LargeRadius, 1.0, {0.0, 1.0, 0.0}, bump(n, 0.5));
  for (auto _ : state) benchmark::DoNotOptimize(ode::solve(p).residual_norm);
}
BENCHMARK(BM_SolveLargeRadius)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_LegendreForward(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto psi = bump(n, 0.002);
  for (auto _ : state) benchmark::DoNotOptimize(legendre::legendre_forward(psi).offset);
}
BENCHMARK(BM_LegendreForward)->Arg(64)->Arg(256)->Arg(1024);

void BM_ApplyL(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const linops::TrialMode bg[] = {{1, 0, 0.01, 0.0}, {0, 1, 0.0, 0.01}};
  const linops::TrialMode g[] = {{1, 2, 0.3, 0.1}, {2, -1, 0.0, 0.5}};
  const auto ctx = LinearizedContext::at_solution(linops::band_limited(n, bg), SymMatrix::identity(2));
  const auto gamma = linops::band_limited(n, g);
  for (auto _ : state) benchmark::DoNotOptimize(linops::apply_L(ctx, gamma));
}
BENCHMARK(BM_ApplyL)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
