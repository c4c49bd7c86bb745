#include <benchmark/benchmark.h>

#include "ctdta/grid.hpp"
#include "ctdta/muller.hpp"
#include "ctdta/simulate.hpp"
#include "ctdta/single_clock.hpp"
#include "models.hpp"

using namespace ctdta;
using namespace ctdta::testing;

// ============================================================================
// Transient analysis
// ============================================================================

static void BM_TransientMatrix(benchmark::State& state) {
    Rng rng(3);
    Ctmc c = random_ctmc(rng, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(transient_matrix(c, 2.0, 1e-12));
}
BENCHMARK(BM_TransientMatrix)->Arg(8)->Arg(32)->Arg(128);

// ============================================================================
// Engines on the running example
// ============================================================================

static void BM_SingleClock(benchmark::State& state) {
    Ctmc c = running_ctmc();
    Dta a = running_dta();
    for (auto _ : state) benchmark::DoNotOptimize(solve_single_clock(c, a).probability);
}
BENCHMARK(BM_SingleClock)->Unit(benchmark::kMillisecond);

static void BM_Grid(benchmark::State& state) {
    Ctmc c = running_ctmc();
    Dta a = running_dta();
    GridSpec spec;
    spec.h = 1.0 / static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(solve_grid(c, a, spec).probability);
}
BENCHMARK(BM_Grid)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_Simulate(benchmark::State& state) {
    Ctmc c = running_ctmc();
    Dta a = running_dta();
    SimConfig cfg;
    cfg.samples = state.range(0);
    cfg.threads = 1;
    for (auto _ : state) benchmark::DoNotOptimize(simulate_acceptance(c, a, cfg).p);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Simulate)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

static void BM_Muller(benchmark::State& state) {
    Ctmc c = muller_ctmc();
    Dta a = muller_dta();
    for (auto _ : state) benchmark::DoNotOptimize(check_muller(c, a).probability);
}
BENCHMARK(BM_Muller)->Unit(benchmark::kMillisecond);

// ============================================================================
// Two-clock grid
// ============================================================================

static void BM_RobotGrid(benchmark::State& state) {
    Ctmc c = robot_ctmc();
    Dta a = robot_dta();
    GridSpec spec;
    spec.h = 0.05;
    for (auto _ : state) benchmark::DoNotOptimize(solve_grid(c, a, spec).probability);
}
BENCHMARK(BM_RobotGrid)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
