#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pairtime/detection.hpp"
#include "pairtime/fiber_channel.hpp"
#include "pairtime/spdc_source.hpp"

namespace pairtime {

struct CorrelatorSettings {
    double bin_width_ps = 125.0;
    double window_ps = 2.0e6;  // full histogram span
    // Histogram center; when auto_center is true the analytic peak
    // prediction is used instead of tau_center_ps.
    bool auto_center = true;
    double tau_center_ps = 0.0;

    void validate() const;  // throws ConfigError
};

struct ExperimentConfig {
    SourceSpec source;
    FiberChain arm_signal;
    FiberChain arm_idler;
    DetectorSpec detector_signal;
    DetectorSpec detector_idler;
    CorrelatorSettings correlator;
    double duration_s = 1.0;
    uint64_t seed = 1;
    std::string output_dir;

    void validate() const;  // throws ConfigError
};

enum class SweepMode { Asymmetric, Symmetric };

std::string to_string(SweepMode mode);
SweepMode sweep_mode_from_string(const std::string& s);

// Length sweep over copies of the base experiment. Each point replaces the
// swept arm chains with a single segment of the given length; the segment
// template (lambda0, slope, attenuation) comes from the first segment of
// the base idler arm. Asymmetric mode leaves the signal arm as configured
// in the base and sweeps the idler arm; symmetric mode sweeps both arms
// with identical fiber.
struct SweepSpec {
    ExperimentConfig base;
    std::string swept_parameter = "arm_length_km";
    SweepMode mode = SweepMode::Asymmetric;
    std::vector<double> values_km;

    void validate() const;  // throws ConfigError
};

}  // namespace pairtime
