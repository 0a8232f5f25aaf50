#pragma once

#include <cstdint>
#include <vector>

namespace pairtime {

struct DetectorSpec {
    double jitter_fwhm_ps = 0.0;
    double efficiency = 1.0;
    double dark_count_rate_hz = 0.0;
    double dead_time_ps = 1.0e7;
    double resolution_ps = 125.0;

    void validate() const;  // throws ConfigError
};

// Quantized detector output. Ticks are integer multiples of resolution_ps,
// strictly increasing after dead-time enforcement.
struct TimestampStream {
    int channel_id = 0;
    double resolution_ps = 1.0;
    std::vector<int64_t> ticks;

    std::size_t size() const { return ticks.size(); }
    double time_ps(std::size_t i) const {
        return static_cast<double>(ticks[i]) * resolution_ps;
    }
};

// Full detection pipeline: efficiency thinning, Gaussian timing jitter,
// Poisson dark counts, floor quantization, then dead-time removal. Events
// jittered outside [0, duration] are discarded. Deterministic in (inputs,
// seed) and independent of any caller-side threading.
TimestampStream detect(const std::vector<double>& arrivals_ps,
                       const DetectorSpec& spec, double duration_s,
                       uint64_t seed, int channel_id = 0);

// Quadrature floor (FWHM, ps) of the coincidence peak width from detector
// jitter plus the intrinsic pair emission spread, excluding binning.
double jitter_floor_fwhm(const DetectorSpec& a, const DetectorSpec& b,
                         double sigma0_ps = 0.0);

}  // namespace pairtime
