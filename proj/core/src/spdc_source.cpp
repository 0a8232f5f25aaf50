#include "pairtime/spdc_source.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pairtime/errors.hpp"
#include "pairtime/parallel.hpp"
#include "pairtime/rng.hpp"
#include "stream_tags.hpp"

namespace pairtime {

namespace {

constexpr double kChunkPs = 1.0e9;  // 1 ms emission slices

double sample_wavelength(const SourceSpec& spec, const Band& band, Rng& rng) {
    switch (spec.spectral_shape) {
        case SpectralShape::Flat:
            return rng.uniform(band.lo_nm, band.hi_nm);
        case SpectralShape::Gaussian:
            return rng.normal_truncated(band.center_nm(), spec.shape_width_nm,
                                        band.lo_nm, band.hi_nm);
    }
    throw std::logic_error("unhandled spectral shape");
}

}  // namespace

std::string to_string(SpectralShape shape) {
    switch (shape) {
        case SpectralShape::Flat: return "flat";
        case SpectralShape::Gaussian: return "gaussian";
    }
    throw std::logic_error("unhandled spectral shape");
}

SpectralShape spectral_shape_from_string(const std::string& s) {
    if (s == "flat") return SpectralShape::Flat;
    if (s == "gaussian") return SpectralShape::Gaussian;
    throw ConfigError("unknown spectral shape '" + s + "' (expected flat or gaussian)");
}

Band SourceSpec::window() const {
    const double c = degenerate_wavelength_nm();
    return {c - 0.5 * window_full_width_nm, c + 0.5 * window_full_width_nm};
}

Band SourceSpec::signal_band() const {
    return {window().lo_nm, wdm_edge_nm};
}

Band SourceSpec::idler_band() const {
    return {wdm_edge_nm, window().hi_nm};
}

Band SourceSpec::coincident_signal_band() const {
    const Band sig = signal_band();
    const Band idl = idler_band();
    // conjugate_wavelength is strictly decreasing in its argument, so the
    // idler-band constraint maps back to an interval of signal wavelengths.
    double lo = sig.lo_nm;
    double hi = sig.hi_nm;
    lo = std::max(lo, conjugate_wavelength(idl.hi_nm, pump_wavelength_nm));
    hi = std::min(hi, conjugate_wavelength(idl.lo_nm, pump_wavelength_nm));
    return {lo, hi};
}

void SourceSpec::validate() const {
    if (!(pump_wavelength_nm > 0.0))
        throw ConfigError("pump_wavelength_nm must be positive");
    if (!(window_full_width_nm > 0.0))
        throw ConfigError("window_full_width_nm must be positive");
    if (!(pair_rate_hz > 0.0))
        throw ConfigError("pair_rate_hz must be positive");
    if (!(sigma0_ps > 0.0))
        throw ConfigError("sigma0_ps must be positive");
    if (spectral_shape == SpectralShape::Gaussian && !(shape_width_nm > 0.0))
        throw ConfigError("shape_width_nm must be positive for the gaussian shape");
    const Band w = window();
    if (!(wdm_edge_nm > w.lo_nm) || !(wdm_edge_nm < w.hi_nm))
        throw ConfigError("wdm_edge_nm must lie strictly inside the collection window");
    if (!(w.lo_nm > pump_wavelength_nm))
        throw ConfigError("collection window must lie above the pump wavelength");
    const Band cs = coincident_signal_band();
    if (!(cs.width_nm() > 0.0))
        throw ConfigError("signal and idler bands admit no energy-conjugate pairs");
}

double conjugate_wavelength(double lambda_one_nm, double pump_nm) {
    if (!(pump_nm > 0.0)) throw std::domain_error("pump wavelength must be positive");
    if (!(lambda_one_nm > pump_nm))
        throw std::domain_error("no conjugate wavelength exists at or below the pump");
    return 1.0 / (1.0 / pump_nm - 1.0 / lambda_one_nm);
}

std::vector<PhotonPairEvent> sample_emissions(const SourceSpec& spec,
                                              double duration_s,
                                              uint64_t seed,
                                              int workers) {
    spec.validate();
    if (duration_s < 0.0) throw ConfigError("duration_s must be non-negative");
    const double duration_ps = duration_s * 1.0e12;
    if (duration_ps <= 0.0) return {};

    const auto n_chunks =
        static_cast<std::size_t>(std::ceil(duration_ps / kChunkPs));
    const double mean_gap_ps = 1.0e12 / spec.pair_rate_hz;
    const Band band = spec.coincident_signal_band();

    std::vector<std::vector<PhotonPairEvent>> per_chunk(n_chunks);
    parallel_for_index(n_chunks, workers, [&](std::size_t k) {
        const double t_begin = static_cast<double>(k) * kChunkPs;
        const double t_end = std::min(t_begin + kChunkPs, duration_ps);
        Rng rng(seed, stream_tag::kEmission, k);
        auto& out = per_chunk[k];
        out.reserve(static_cast<std::size_t>(1.2 * (t_end - t_begin) / mean_gap_ps) + 4);
        double t = t_begin;
        for (;;) {
            t += rng.exponential(mean_gap_ps);
            if (t >= t_end) break;
            PhotonPairEvent ev;
            ev.t_emit_ps = t;
            ev.lambda_signal_nm = sample_wavelength(spec, band, rng);
            ev.lambda_idler_nm =
                conjugate_wavelength(ev.lambda_signal_nm, spec.pump_wavelength_nm);
            ev.dt_pair_ps = rng.normal(0.0, spec.sigma0_ps);
            out.push_back(ev);
        }
    });

    std::size_t total = 0;
    for (const auto& c : per_chunk) total += c.size();
    std::vector<PhotonPairEvent> events;
    events.reserve(total);
    for (auto& c : per_chunk)
        events.insert(events.end(), c.begin(), c.end());
    return events;
}

}  // namespace pairtime
