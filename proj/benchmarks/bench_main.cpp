#include "bslab/barrier.hpp"
#include "bslab/experiments.hpp"
#include "bslab/flow.hpp"
#include "bslab/mz.hpp"
#include "bslab/shrinker.hpp"
#include "bslab/spectral.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <map>

using namespace bslab;

namespace {

GridPtr bench_grid(std::size_t n, std::size_t ntheta) {
    static std::map<std::pair<std::size_t, std::size_t>, GridPtr> cache;
    auto& slot = cache[{n, ntheta}];
    if (!slot) slot = make_grid(n, n, ntheta);
    return slot;
}

void bm_inner_product(benchmark::State& state) {
    GridPtr g = bench_grid(state.range(0), 32);
    const GridFunction f = random_smooth_field(g, 1);
    const GridFunction h = random_smooth_field(g, 2);
    for (auto _ : state) benchmark::DoNotOptimize(inner_product(f, h));
}
BENCHMARK(bm_inner_product)->Arg(32)->Arg(64);

void bm_apply_ou(benchmark::State& state) {
    GridPtr g = bench_grid(state.range(0), 32);
    const GridFunction f = random_smooth_field(g, 3);
    for (auto _ : state) benchmark::DoNotOptimize(apply_ou(f));
}
BENCHMARK(bm_apply_ou)->Arg(32)->Arg(64);

void bm_rhs_profile(benchmark::State& state) {
    GridPtr g = bench_grid(state.range(0), 32);
    const GridFunction u = random_smooth_field(g, 4) * 1e-3;
    for (auto _ : state) benchmark::DoNotOptimize(rhs_profile(u));
}
BENCHMARK(bm_rhs_profile)->Arg(32)->Arg(64);

void bm_flow_step_2d(benchmark::State& state) {
    GridPtr g = bench_grid(state.range(0), 32);
    FlowParams params;
    params.theta_symmetric = true;
    GridFunction u0 = GridFunction::from_function(g, [](double, double b, double) {
        return (2.0 - b * b) / (std::sqrt(8.0) * 200.0);
    });
    FlowSim sim(g, params, u0, -200.0);
    for (auto _ : state) sim.step();
}
BENCHMARK(bm_flow_step_2d)->Arg(48)->Arg(64);

void bm_solve_shrinker(benchmark::State& state) {
    const double a = static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(solve_shrinker(a));
}
BENCHMARK(bm_solve_shrinker)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);

void bm_barrier_residual(benchmark::State& state) {
    auto profile = std::make_shared<const ShrinkerProfile>(solve_shrinker(39.0));
    const BarrierSurface b(40.0, 40.0, 10.0, profile);
    for (auto _ : state) benchmark::DoNotOptimize(verify_inner_barrier(b, 60, 16));
}
BENCHMARK(bm_barrier_residual)->Unit(benchmark::kMillisecond);

void bm_u_system(benchmark::State& state) {
    MZEnvelope env;
    const auto realization = CoefficientRealization::random(5);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            integrate_u_system(env, realization, {0.5, 0.5, 0.01}, -100.0, -60.0, 400));
}
BENCHMARK(bm_u_system)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
