#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "pairtime/detection.hpp"

namespace pairtime {

struct CorrelationHistogram {
    double bin_width_ps = 125.0;
    double tau_start_ps = 0.0;  // left edge of the first bin
    std::vector<uint64_t> counts;

    std::size_t bins() const { return counts.size(); }
    double bin_center_ps(std::size_t k) const {
        return tau_start_ps + (static_cast<double>(k) + 0.5) * bin_width_ps;
    }
    uint64_t total() const;
};

struct PeakFit {
    double center_ps = 0.0;
    double fwhm_ps = 0.0;
    double fwhm_stderr_ps = 0.0;
    double amplitude = 0.0;
    double background_per_bin = 0.0;
    // Reduced chi-square of the converged fit; -1 flags the half-maximum
    // interpolation fallback.
    double goodness = 0.0;
};

struct EventPairing {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    double accidental_estimate = 0.0;
};

// Histogram of delays t_B - t_A over [tau_min, tau_min + bins*width) where
// bins = ceil((tau_max - tau_min)/width). Sort-merge sliding window,
// O(nA + nB + matches). Requires both streams on the same resolution.
CorrelationHistogram cross_correlate(const TimestampStream& a,
                                     const TimestampStream& b,
                                     double bin_width_ps, double tau_min_ps,
                                     double tau_max_ps);

// Center of the maximum bin; ties break toward smaller tau.
// Throws FitError when the histogram is empty or all zero.
double find_peak_ps(const CorrelationHistogram& hist);

// Gaussian-plus-constant least squares around the peak. Falls back to
// half-maximum interpolation (goodness = -1) when the fit does not
// converge. Throws FitError when fewer than 5 usable bins stand above
// the background.
PeakFit fit_fwhm(const CorrelationHistogram& hist);

// Greedy earliest-first one-to-one matching of events whose delay lies
// within window_ps/2 of tau_peak_ps. The accidental estimate repeats the
// matching in a sideband of equal width offset by 10 windows.
EventPairing pair_events(const TimestampStream& a, const TimestampStream& b,
                         double tau_peak_ps, double window_ps);

// CSV export, header `tau_ps,count`, one row per bin center.
void write_histogram_csv(const std::filesystem::path& path,
                         const CorrelationHistogram& hist);
std::string histogram_csv(const CorrelationHistogram& hist);

// key=value block: center_ps, fwhm_ps, fwhm_stderr_ps, amplitude,
// background, goodness.
std::string peak_fit_text(const PeakFit& fit);

}  // namespace pairtime
