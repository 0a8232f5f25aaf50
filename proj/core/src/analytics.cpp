#include "pairtime/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "pairtime/detection.hpp"
#include "pairtime/errors.hpp"

namespace pairtime {

namespace {

constexpr double kFwhmPerSigma = 2.3548200450309493;
constexpr double kSpeedOfLightNmPerPs = 2.99792458e5;

double chain_delay(const FiberChain& chain, double lambda_nm, double ref_nm) {
    return relative_group_delay_ps(chain, lambda_nm, ref_nm);
}

// FWHM of a weighted sample density via a fixed histogram and half-maximum
// interpolation, with zero density assumed outside the sample range.
double numeric_fwhm(const std::vector<double>& values,
                    const std::vector<double>& weights) {
    const auto [mn_it, mx_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *mn_it, hi = *mx_it;
    if (!(hi > lo)) return 0.0;

    constexpr int kBins = 512;
    std::vector<double> density(kBins, 0.0);
    const double width = (hi - lo) / kBins;
    for (std::size_t i = 0; i < values.size(); ++i) {
        auto b = static_cast<int>((values[i] - lo) / width);
        b = std::clamp(b, 0, kBins - 1);
        density[b] += weights[i];
    }

    int peak = 0;
    for (int b = 1; b < kBins; ++b)
        if (density[b] > density[peak]) peak = b;
    const double level = 0.5 * density[peak];
    const auto at = [&](int b) {
        return (b < 0 || b >= kBins) ? 0.0 : density[b];
    };
    const auto center = [&](int b) { return lo + (b + 0.5) * width; };

    double right = hi;
    for (int b = peak; b < kBins; ++b) {
        if (at(b) >= level && at(b + 1) < level) {
            const double f = (at(b) - level) / (at(b) - at(b + 1));
            right = center(b) + f * width;
            break;
        }
    }
    double left = lo;
    for (int b = peak; b >= 0; --b) {
        if (at(b) >= level && at(b - 1) < level) {
            const double f = (at(b) - level) / (at(b) - at(b - 1));
            left = center(b) - f * width;
            break;
        }
    }
    return std::max(right - left, 0.0);
}

}  // namespace

double franson_width_ps(const DispersionBudget& budget) {
    if (!(budget.sigma0_ps > 0.0)) throw ConfigError("sigma0_ps must be positive");
    return std::fabs(budget.beta1_x1_ps2 + budget.beta2_x2_ps2) /
           (std::sqrt(2.0) * budget.sigma0_ps);
}

double beta2_from_dispersion(double d_ps_per_nm_km, double lambda_nm) {
    if (!(lambda_nm > 0.0)) throw ConfigError("lambda_nm must be positive");
    return -d_ps_per_nm_km * lambda_nm * lambda_nm /
           (2.0 * 3.14159265358979323846 * kSpeedOfLightNmPerPs);
}

DelayBounds delay_bounds(const FiberChain& arm_signal,
                         const FiberChain& arm_idler, const SourceSpec& source,
                         int grid_points) {
    source.validate();
    arm_signal.validate();
    arm_idler.validate();
    if (grid_points < 2) throw ConfigError("grid_points must be at least 2");

    const double ref = source.degenerate_wavelength_nm();
    const Band band = source.coincident_signal_band();

    DelayBounds bounds;
    bool first = true;
    for (int k = 0; k < grid_points; ++k) {
        const double ls = band.lo_nm + band.width_nm() * k / (grid_points - 1);
        const double li = conjugate_wavelength(ls, source.pump_wavelength_nm);
        const double dtau =
            chain_delay(arm_idler, li, ref) - chain_delay(arm_signal, ls, ref);
        if (first || dtau < bounds.dtau_min_ps) bounds.dtau_min_ps = dtau;
        if (first || dtau > bounds.dtau_max_ps) bounds.dtau_max_ps = dtau;
        first = false;
    }

    const double ls_center = band.center_nm();
    const double li_center =
        conjugate_wavelength(ls_center, source.pump_wavelength_nm);
    bounds.tau_s_center_ps = chain_delay(arm_signal, ls_center, ref);
    bounds.tau_i_center_ps = chain_delay(arm_idler, li_center, ref);
    return bounds;
}

double delay_spread_fwhm_ps(const FiberChain& arm_signal,
                            const FiberChain& arm_idler,
                            const SourceSpec& source, int grid_points) {
    source.validate();
    arm_signal.validate();
    arm_idler.validate();
    if (grid_points < 2) throw ConfigError("grid_points must be at least 2");

    const double ref = source.degenerate_wavelength_nm();
    const Band band = source.coincident_signal_band();

    std::vector<double> delays(grid_points), weights(grid_points);
    for (int k = 0; k < grid_points; ++k) {
        const double ls = band.lo_nm + band.width_nm() * k / (grid_points - 1);
        const double li = conjugate_wavelength(ls, source.pump_wavelength_nm);
        delays[k] =
            chain_delay(arm_idler, li, ref) - chain_delay(arm_signal, ls, ref);
        if (source.spectral_shape == SpectralShape::Gaussian) {
            const double z = (ls - band.center_nm()) / source.shape_width_nm;
            weights[k] = std::exp(-0.5 * z * z);
        } else {
            weights[k] = 1.0;
        }
    }

    if (source.spectral_shape == SpectralShape::Gaussian) {
        double wsum = 0.0, mean = 0.0;
        for (int k = 0; k < grid_points; ++k) {
            wsum += weights[k];
            mean += weights[k] * delays[k];
        }
        mean /= wsum;
        double var = 0.0;
        for (int k = 0; k < grid_points; ++k) {
            const double d = delays[k] - mean;
            var += weights[k] * d * d;
        }
        var /= wsum;
        return kFwhmPerSigma * std::sqrt(std::max(var, 0.0));
    }
    return numeric_fwhm(delays, weights);
}

double predict_fwhm_ps(const ExperimentConfig& config) {
    config.validate();
    const double spread = delay_spread_fwhm_ps(config.arm_signal,
                                               config.arm_idler, config.source);
    const double floor = jitter_floor_fwhm(config.detector_signal,
                                           config.detector_idler,
                                           config.source.sigma0_ps);
    const double bin = config.correlator.bin_width_ps;
    const double bin_fwhm_sq = 8.0 * std::log(2.0) * bin * bin / 12.0;
    return std::sqrt(spread * spread + floor * floor + bin_fwhm_sq);
}

double predict_peak_ps(const ExperimentConfig& config) {
    config.validate();
    const double ref = config.source.degenerate_wavelength_nm();
    const double ls = config.source.coincident_signal_band().center_nm();
    const double li = conjugate_wavelength(ls, config.source.pump_wavelength_nm);
    return config.arm_idler.bulk_latency_ps() - config.arm_signal.bulk_latency_ps() +
           chain_delay(config.arm_idler, li, ref) -
           chain_delay(config.arm_signal, ls, ref);
}

}  // namespace pairtime
