#include <benchmark/benchmark.h>

#include <random>

#include "heatmv/growth.hpp"
#include "heatmv/kernels.hpp"
#include "heatmv/quadrature.hpp"
#include "heatmv/solvers.hpp"
#include "heatmv/transference.hpp"

using namespace heatmv;

namespace {

void BM_KernelOU(benchmark::State& state) {
    const SpaceTimePoint a{SpatialVector{0.3}, Time{0.2}};
    const SpaceTimePoint p{SpatialVector{0.25}, Time{0.15}};
    for (auto _ : state) benchmark::DoNotOptimize(k_ou(a, p));
}
BENCHMARK(BM_KernelOU);

void BM_KernelDescentOU(benchmark::State& state) {
    const SpaceTimePoint a{SpatialVector{0.3}, Time{0.2}};
    const SpaceTimePoint p{SpatialVector{0.28}, Time{0.19}};
    for (auto _ : state) benchmark::DoNotOptimize(k_descent_ou(3, 0.5, a, p));
}
BENCHMARK(BM_KernelDescentOU);

void BM_Phi(benchmark::State& state) {
    const SpaceTimePoint p{SpatialVector{0.3, -0.1}, Time{0.4}};
    for (auto _ : state) benchmark::DoNotOptimize(phi_inverse(phi(p)));
}
BENCHMARK(BM_Phi);

/// Deterministic mean value of a catalog temperature; arg = dimension.
void BM_MvResidualTensor(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const auto f = catalog(n == 1 ? "ou.quad" : "ou.pull.heat.radial2");
    const auto& c = catalog_entry(f.id()).probe.center;
    MVConfig cfg;
    cfg.method = QuadMethod::tensor;
    for (auto _ : state) benchmark::DoNotOptimize(mv_residual(f, c, 0.1, Equation::ou, cfg));
}
BENCHMARK(BM_MvResidualTensor)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_MvResidualMonteCarlo(benchmark::State& state) {
    const auto f = catalog("ou.quad");
    const auto& c = catalog_entry("ou.quad").probe.center;
    MVConfig cfg;
    cfg.method = QuadMethod::montecarlo;
    for (auto _ : state) benchmark::DoNotOptimize(mv_residual(f, c, 0.1, Equation::ou, cfg));
}
BENCHMARK(BM_MvResidualMonteCarlo)->Unit(benchmark::kMillisecond);

/// Crank-Nicolson solve; arg = 1/h.
void BM_SolveCN1D(benchmark::State& state) {
    const double h = 1.0 / static_cast<double>(state.range(0));
    const auto f = catalog("ou.quad");
    const auto box = DomainBox::cube(1, 2, 0, 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(solve_fd(Equation::ou, box, f, f, {0.5, h, h / 4}));
}
BENCHMARK(BM_SolveCN1D)->Arg(20)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

void BM_SolveCN2D(benchmark::State& state) {
    const double h = 1.0 / static_cast<double>(state.range(0));
    const auto f = catalog("heat.fundamental2");
    const auto box = DomainBox::cube(2, 2, -0.7, -0.5);
    for (auto _ : state) benchmark::DoNotOptimize(solve_fd(Equation::heat, box, f, f, {0.5, h, h / 4}));
}
BENCHMARK(BM_SolveCN2D)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_KernelBound(benchmark::State& state) {
    KernelSpec d;
    d.family = KernelFamily::descent_ou;
    d.m = 3;
    d.r = 0.7;
    d.anchor = {SpatialVector{0.2}, Time{0.1}};
    for (auto _ : state) benchmark::DoNotOptimize(kernel_bound_estimate(d, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_KernelBound)->Arg(100'000)->Unit(benchmark::kMillisecond);

void BM_DivergenceDiagnostic(benchmark::State& state) {
    const auto p = growth_from_spec("osc:1", 1 << 20);
    for (auto _ : state) benchmark::DoNotOptimize(divergence_diagnostic(p));
}
BENCHMARK(BM_DivergenceDiagnostic)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
