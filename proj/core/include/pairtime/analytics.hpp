#pragma once

#include "pairtime/experiment_config.hpp"
#include "pairtime/fiber_channel.hpp"
#include "pairtime/spdc_source.hpp"

namespace pairtime {

// Accumulated group-delay dispersion of each arm (beta2 times length) and
// the intrinsic pair emission spread.
struct DispersionBudget {
    double beta1_x1_ps2 = 0.0;
    double beta2_x2_ps2 = 0.0;
    double sigma0_ps = 0.1;
};

// Extremes of the conjugate-pair delay difference across the collection
// bands, plus the band-center delay of each arm.
struct DelayBounds {
    double dtau_min_ps = 0.0;
    double dtau_max_ps = 0.0;
    double tau_s_center_ps = 0.0;
    double tau_i_center_ps = 0.0;

    double spread_ps() const { return dtau_max_ps - dtau_min_ps; }
};

// Dispersion-broadened coincidence width (Gaussian sigma, ps):
// |b1x1 + b2x2| / (sqrt(2) sigma0). Detector and binning floors are added
// separately by predict_fwhm.
double franson_width_ps(const DispersionBudget& budget);

// beta2 = -D lambda^2 / (2 pi c), ps^2/km for D in ps/(nm km).
double beta2_from_dispersion(double d_ps_per_nm_km, double lambda_nm);

// Scans conjugate wavelength pairs across the source bands on a uniform
// grid and evaluates delay(idler arm) - delay(signal arm), both referenced
// to the degenerate wavelength. Bulk latency is not included.
DelayBounds delay_bounds(const FiberChain& arm_signal,
                         const FiberChain& arm_idler, const SourceSpec& source,
                         int grid_points = 512);

// FWHM of the induced delay-difference distribution, from the spectral
// density mapped through the chain delays. For a Gaussian shape this is
// 2 sqrt(2 ln 2) times the weighted standard deviation; for a flat shape
// it is measured numerically from a histogram of the induced density
// (close to the full min-max spread when the delay is linear across the
// band). Bulk latency and detector effects are not included.
double delay_spread_fwhm_ps(const FiberChain& arm_signal,
                            const FiberChain& arm_idler,
                            const SourceSpec& source, int grid_points = 2048);

// Quadrature combination of the dispersion spread, the detector/pair
// jitter floor, and one histogram bin of quantization variance.
double predict_fwhm_ps(const ExperimentConfig& config);

// Expected histogram peak position: bulk latency difference plus the
// band-center differential delay.
double predict_peak_ps(const ExperimentConfig& config);

}  // namespace pairtime
