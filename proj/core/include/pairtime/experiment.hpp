#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pairtime/correlator.hpp"
#include "pairtime/experiment_config.hpp"

namespace pairtime {

inline constexpr const char* kVersion = "0.1.0";

struct SummaryReport {
    uint64_t emitted_pairs = 0;
    uint64_t signal_detections = 0;
    uint64_t idler_detections = 0;
    uint64_t coincidences = 0;
    double accidental_estimate = 0.0;
    double tau_peak_ps = 0.0;
    // Peak position with the bulk latency difference subtracted; raw values
    // stay in the histogram and timestamp files.
    double tau_peak_net_ps = 0.0;
    PeakFit fit;
    double predicted_fwhm_ps = 0.0;
    double predicted_peak_ps = 0.0;
    CorrelationHistogram histogram;
};

// Full pipeline: emission, per-arm propagation, detection, correlation,
// peak fit, prediction. When config.output_dir is set, writes config.ini,
// signal.ptag, idler.ptag, histogram.csv, prediction.txt, fit.txt and
// run.log there. All outputs are byte-reproducible for a fixed seed,
// independent of the worker count.
SummaryReport run_experiment(const ExperimentConfig& config, int workers = 1);

// Deterministic text block of the summary (the run.log content).
std::string summary_text(const ExperimentConfig& config,
                         const SummaryReport& report);

struct SweepPoint {
    double length_km = 0.0;
    SummaryReport summary;
};

struct SweepReport {
    std::vector<SweepPoint> points;
    double slope_ps_per_km = 0.0;
    double slope_stderr_ps_per_km = 0.0;
    double intercept_ps = 0.0;
    double r_squared = 1.0;

    std::string csv() const;  // length_km,fwhm_ps,fwhm_stderr_ps
};

// Runs one experiment per swept length; point i is seeded from
// (base seed, i) so points are independent of execution order. A least
// squares line through (length, fitted FWHM) gives the slope. When all
// lengths are equal the slope is 0 with infinite stderr. When
// base.output_dir is set, per-point outputs go to point_<i>/ inside it,
// plus sweep.csv and sweep.log.
SweepReport run_sweep(const SweepSpec& sweep, int workers = 1);

// Named scenario presets. The *_sweep names are sweeps; the others are
// single runs. Sampled fiber parameters (deployed link) derive from the
// seed and are reported in the run log.
std::vector<std::string> preset_names();
bool preset_is_sweep(const std::string& name);
ExperimentConfig preset_config(const std::string& name, uint64_t seed = 42);
SweepSpec preset_sweep(const std::string& name, uint64_t seed = 42);

}  // namespace pairtime
