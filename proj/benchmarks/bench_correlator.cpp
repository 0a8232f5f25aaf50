#include <algorithm>
#include <cstdint>
#include <vector>

#include <benchmark/benchmark.h>

#include "pairtime/correlator.hpp"
#include "pairtime/detection.hpp"
#include "pairtime/rng.hpp"

namespace {

pairtime::TimestampStream uniform_stream(std::size_t n, double duration_ps,
                                         uint64_t seed, int channel) {
    pairtime::Rng rng(seed);
    pairtime::TimestampStream s;
    s.channel_id = channel;
    s.resolution_ps = 125.0;
    s.ticks.resize(n);
    const double max_tick = duration_ps / s.resolution_ps;
    for (auto& t : s.ticks)
        t = static_cast<int64_t>(rng.uniform() * max_tick);
    std::sort(s.ticks.begin(), s.ticks.end());
    return s;
}

void bm_cross_correlate(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const double duration_ps = 1.0e12;
    const auto a = uniform_stream(n, duration_ps, 11, 0);
    const auto b = uniform_stream(n, duration_ps, 12, 1);
    for (auto _ : state) {
        auto hist = pairtime::cross_correlate(a, b, 125.0, -1.0e6, 1.0e6);
        benchmark::DoNotOptimize(hist.counts.data());
    }
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) *
                            static_cast<int64_t>(2 * n));
}

void bm_fit_fwhm(benchmark::State& state) {
    pairtime::CorrelationHistogram hist;
    hist.bin_width_ps = 125.0;
    hist.tau_start_ps = -1.0e6;
    hist.counts.resize(16000, 3);
    pairtime::Rng rng(7);
    for (int i = 0; i < 200000; ++i) {
        const double tau = rng.normal(0.0, 200.0);
        const auto k = static_cast<std::size_t>((tau + 1.0e6) / 125.0);
        if (k < hist.counts.size()) ++hist.counts[k];
    }
    for (auto _ : state) {
        auto fit = pairtime::fit_fwhm(hist);
        benchmark::DoNotOptimize(fit.fwhm_ps);
    }
}

}  // namespace

BENCHMARK(bm_cross_correlate)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_fit_fwhm)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
