#include <benchmark/benchmark.h>

#include "sgpvsel/baselines.hpp"
#include "sgpvsel/generate.hpp"
#include "sgpvsel/lasso.hpp"
#include "sgpvsel/prosgpv.hpp"

using namespace sgpvsel;

namespace {

Replication make_data(Index n, Index p, Index s, double rho)
{
    ScenarioSpec spec;
    spec.n = n;
    spec.p = p;
    spec.s = s;
    spec.rho = rho;
    spec.snr = 2.0;
    spec.master_seed = 7;
    return generate_replication(spec, 0);
}

void BM_LassoPath(benchmark::State& state)
{
    const Replication rep = make_data(state.range(0), state.range(1), 10, 0.35);
    const StandardizedDataset data = standardize(rep.train);
    const Vector grid = lambda_grid(data);
    for (auto _ : state) {
        LassoPath path = cd_solve(data, grid);
        benchmark::DoNotOptimize(path.betas.data());
    }
    state.SetLabel("100-point grid");
}
BENCHMARK(BM_LassoPath)->Args({100, 50})->Args({500, 50})->Args({200, 1000})->Unit(benchmark::kMillisecond);

void BM_FitTwoStage(benchmark::State& state)
{
    const Replication rep = make_data(state.range(0), state.range(1), 10, 0.35);
    for (auto _ : state) {
        SelectionResult res = fit_two_stage(rep.train);
        benchmark::DoNotOptimize(res.model.coefficients.data());
    }
}
BENCHMARK(BM_FitTwoStage)->Args({100, 50})->Args({500, 50})->Args({200, 1000})->Unit(benchmark::kMillisecond);

void BM_AdaptiveLasso(benchmark::State& state)
{
    const Replication rep = make_data(state.range(0), state.range(1), 10, 0.35);
    for (auto _ : state) {
        AdaptiveLassoFit fit = adaptive_lasso_fit(rep.train);
        benchmark::DoNotOptimize(fit.model.coefficients.data());
    }
}
BENCHMARK(BM_AdaptiveLasso)->Args({500, 50})->Args({200, 1000})->Unit(benchmark::kMillisecond);

void BM_GenerateReplication(benchmark::State& state)
{
    ScenarioSpec spec;
    spec.n = state.range(0);
    spec.p = state.range(1);
    spec.s = 10;
    spec.rho = 0.7;
    Index r = 0;
    for (auto _ : state) {
        Replication rep = generate_replication(spec, r++);
        benchmark::DoNotOptimize(rep.train.X().data());
    }
}
BENCHMARK(BM_GenerateReplication)->Args({500, 50})->Args({200, 2000})->Unit(benchmark::kMicrosecond);

} // namespace

BENCHMARK_MAIN();
