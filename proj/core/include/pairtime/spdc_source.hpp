#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pairtime {

enum class SpectralShape { Flat, Gaussian };

std::string to_string(SpectralShape shape);
SpectralShape spectral_shape_from_string(const std::string& s);

// A wavelength interval [lo_nm, hi_nm].
struct Band {
    double lo_nm = 0.0;
    double hi_nm = 0.0;
    double width_nm() const { return hi_nm - lo_nm; }
    double center_nm() const { return 0.5 * (lo_nm + hi_nm); }
    bool contains(double nm) const { return nm >= lo_nm && nm <= hi_nm; }
};

// Pair source description. Emission is degenerate at twice the pump
// wavelength; a bandpass window centered on the degenerate wavelength is
// split into a signal and an idler band at the demultiplexer edge.
struct SourceSpec {
    double pump_wavelength_nm = 658.0;
    double window_full_width_nm = 50.0;
    double wdm_edge_nm = 1316.0;
    SpectralShape spectral_shape = SpectralShape::Flat;
    // Gaussian sigma of the sampled (lower-band) wavelength density, in nm.
    // Ignored for the flat shape.
    double shape_width_nm = 12.0;
    double pair_rate_hz = 1.0e6;
    double sigma0_ps = 0.1;

    double degenerate_wavelength_nm() const { return 2.0 * pump_wavelength_nm; }

    // Window split at the WDM edge: signal takes the lower band, idler the
    // upper one.
    Band window() const;
    Band signal_band() const;
    Band idler_band() const;

    // Signal wavelengths whose energy-conjugate partner also lands inside
    // the idler band. Pairs outside this sub-band exit the same WDM port
    // and never produce a cross-channel coincidence, so sampling is
    // restricted to it.
    Band coincident_signal_band() const;

    void validate() const;  // throws ConfigError
};

// One emitted pair. Wavelengths satisfy 1/ls + 1/li = 1/lp exactly by
// construction; dt_pair is the signal-minus-idler emission offset.
struct PhotonPairEvent {
    double t_emit_ps = 0.0;
    double lambda_signal_nm = 0.0;
    double lambda_idler_nm = 0.0;
    double dt_pair_ps = 0.0;

    double t_signal_ps() const { return t_emit_ps + 0.5 * dt_pair_ps; }
    double t_idler_ps() const { return t_emit_ps - 0.5 * dt_pair_ps; }
};

// Energy-conserving partner wavelength: 1/result = 1/pump - 1/lambda_one.
// Throws std::domain_error when no physical conjugate exists
// (lambda_one <= pump).
double conjugate_wavelength(double lambda_one_nm, double pump_nm);

// Homogeneous Poisson emission over [0, duration], sorted by emission time.
// Sampling is chunked over fixed 1 ms wall-time slices with one RNG
// substream per slice, so results are independent of how many workers
// execute the slices. `workers` <= 0 picks the hardware concurrency.
std::vector<PhotonPairEvent> sample_emissions(const SourceSpec& spec,
                                              double duration_s,
                                              uint64_t seed,
                                              int workers = 1);

}  // namespace pairtime
