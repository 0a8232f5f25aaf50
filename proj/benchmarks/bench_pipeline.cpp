#include <benchmark/benchmark.h>

#include "pairtime/detection.hpp"
#include "pairtime/experiment.hpp"
#include "pairtime/rng.hpp"
#include "pairtime/spdc_source.hpp"

namespace {

void bm_sample_emissions(benchmark::State& state) {
    pairtime::SourceSpec spec;
    spec.pair_rate_hz = 1.0e6;
    for (auto _ : state) {
        auto events = pairtime::sample_emissions(spec, 0.1, 5);
        benchmark::DoNotOptimize(events.data());
    }
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) * 100000);
}

void bm_detect(benchmark::State& state) {
    pairtime::Rng rng(3);
    std::vector<double> arrivals(200000);
    double t = 0.0;
    for (auto& a : arrivals) {
        t += rng.exponential(1.0e6);
        a = t;
    }
    pairtime::DetectorSpec det;
    det.jitter_fwhm_ps = 100.0;
    det.efficiency = 0.5;
    det.dark_count_rate_hz = 100.0;
    det.dead_time_ps = 25000.0;
    for (auto _ : state) {
        auto stream = pairtime::detect(arrivals, det, 0.5, 17);
        benchmark::DoNotOptimize(stream.ticks.data());
    }
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) *
                            static_cast<int64_t>(arrivals.size()));
}

void bm_local_run(benchmark::State& state) {
    auto cfg = pairtime::preset_config("local", 42);
    cfg.duration_s = 0.05;
    for (auto _ : state) {
        auto report = pairtime::run_experiment(cfg);
        benchmark::DoNotOptimize(report.coincidences);
    }
}

}  // namespace

BENCHMARK(bm_sample_emissions)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_detect)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_local_run)->Unit(benchmark::kMillisecond);
