// Serial reference (jobs = 1) against the OpenMP ensemble loop. Outputs are
// identical for every job count; only wall time differs.

#include "rpst/analysis.hpp"
#include "rpst/ensemble.hpp"
#include "rpst/periodic.hpp"

#include <benchmark/benchmark.h>

#include <numbers>

namespace {

rpst::SdeProblem cubic() { return rpst::build_cubic_model(5.0 * std::numbers::pi, 3.0, 1.5, 0.5, 0.1, 21.0); }

void BM_MsError(benchmark::State& state) {
    const rpst::SdeProblem p = cubic();
    rpst::MsErrorConfig cfg;
    cfg.theta = 0.75;
    cfg.levels = {5, 6, 7};
    cfg.reference_level = 9;
    cfg.ensemble = 64;
    cfg.seed = 1;
    cfg.jobs = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(rpst::ms_error(p, cfg).fitted_slope);
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.ensemble));
}

void BM_MomentMonitor(benchmark::State& state) {
    const rpst::SdeProblem p = cubic();
    const int jobs = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(
            rpst::moment_monitor(p, {1.0, 0.01}, 5, 128, 1, rpst::Vector::Constant(1, 0.6), jobs).late_mean);
    state.SetItemsProcessed(state.iterations() * 128);
}

void BM_PullbackCurve(benchmark::State& state) {
    const rpst::SdeProblem p = cubic();
    const int jobs = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(rpst::periodicity_check_pullback(p, {1.0, 0.1}, rpst::Vector::Constant(1, -0.2),
                                                                  10.0, 1, 1e-2, 0, jobs)
                                     .max_deviation);
}

void job_counts(benchmark::internal::Benchmark* b) {
    b->Arg(1);
    for (int j = 2; j <= rpst::hardware_jobs(); j *= 2) b->Arg(j);
    if (rpst::hardware_jobs() > 1) b->Arg(rpst::hardware_jobs());
    b->Unit(benchmark::kMillisecond)->UseRealTime();
}

} // namespace

BENCHMARK(BM_MsError)->Apply(job_counts);
BENCHMARK(BM_MomentMonitor)->Apply(job_counts);
BENCHMARK(BM_PullbackCurve)->Apply(job_counts);

BENCHMARK_MAIN();
