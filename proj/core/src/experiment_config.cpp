#include "pairtime/experiment_config.hpp"

#include "pairtime/errors.hpp"

namespace pairtime {

void CorrelatorSettings::validate() const {
    if (!(bin_width_ps > 0.0)) throw ConfigError("bin_width_ps must be positive");
    if (!(window_ps > 0.0)) throw ConfigError("window_ps must be positive");
    if (window_ps < 2.0 * bin_width_ps)
        throw ConfigError("window_ps must cover at least two bins");
}

void ExperimentConfig::validate() const {
    source.validate();
    arm_signal.validate();
    arm_idler.validate();
    detector_signal.validate();
    detector_idler.validate();
    correlator.validate();
    if (!(duration_s >= 0.0)) throw ConfigError("duration_s must be non-negative");
}

std::string to_string(SweepMode mode) {
    return mode == SweepMode::Asymmetric ? "asymmetric" : "symmetric";
}

SweepMode sweep_mode_from_string(const std::string& s) {
    if (s == "asymmetric") return SweepMode::Asymmetric;
    if (s == "symmetric") return SweepMode::Symmetric;
    throw ConfigError("unknown sweep mode '" + s + "' (expected asymmetric or symmetric)");
}

void SweepSpec::validate() const {
    base.validate();
    if (swept_parameter != "arm_length_km")
        throw ConfigError("unsupported swept parameter '" + swept_parameter +
                          "' (only arm_length_km is supported)");
    if (values_km.size() < 3)
        throw ConfigError("sweep needs at least three values");
    for (double v : values_km)
        if (!(v > 0.0)) throw ConfigError("sweep lengths must be positive");
}

}  // namespace pairtime
