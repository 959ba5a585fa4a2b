// Serial reference loop against the chunked OpenMP estimator on the
// mitigated DQCp plan of the paper-device preset.

#include <benchmark/benchmark.h>
#include <omp.h>

#include <memory>
#include <numbers>

#include "uqem/experiments.hpp"
#include "uqem/sampling.hpp"

namespace {

using namespace uqem;

const DeviceModel& device() {
    static const DeviceModel d = build_device(preset_config(kPaperDevicePreset, 2));
    return d;
}

const PlanExecutor& executor() {
    static const auto exec = [] {
        const auto ops = basis_operations_1q();
        const auto q0 = characterize_qubit(device(), 0, ops, MeasurementMode{});
        const auto q1 = characterize_qubit(device(), 1, ops, MeasurementMode{});
        const double phi = std::numbers::pi / 2;
        auto parts = build_dqcp_plan(device(), phi, q0, q1, default_twirl(phi), MeasurementMode{});
        return std::make_unique<PlanExecutor>(std::move(parts.plan), device());
    }();
    return *exec;
}

void BM_EstimateSerial(benchmark::State& state) {
    const auto samples = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(estimate_serial(executor(), samples, 1, 0).mean);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_EstimateParallel(benchmark::State& state) {
    const auto samples = static_cast<std::size_t>(state.range(0));
    const int saved = omp_get_max_threads();
    omp_set_num_threads(static_cast<int>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(estimate(executor(), samples, 1, 0).mean);
    omp_set_num_threads(saved);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Repetitions(benchmark::State& state) {
    const int saved = omp_get_max_threads();
    omp_set_num_threads(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(estimate_repetitions(executor(), 10000, 16, 1, 0).size());
    omp_set_num_threads(saved);
    state.SetItemsProcessed(state.iterations() * 10000 * 16);
}

}  // namespace

BENCHMARK(BM_EstimateSerial)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EstimateParallel)
    ->ArgsProduct({{100000}, {1, 2, 4, 8}})
    ->ArgNames({"samples", "threads"})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();
BENCHMARK(BM_Repetitions)->Arg(1)->Arg(2)->Arg(4)->ArgName("threads")->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
