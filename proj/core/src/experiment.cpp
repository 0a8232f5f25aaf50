#include "pairtime/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "pairtime/analytics.hpp"
#include "pairtime/config_io.hpp"
#include "pairtime/errors.hpp"
#include "pairtime/fiber_channel.hpp"
#include "pairtime/parallel.hpp"
#include "pairtime/rng.hpp"
#include "pairtime/spdc_source.hpp"
#include "pairtime/timestamp_file.hpp"
#include "stream_tags.hpp"

namespace pairtime {

namespace {

std::string format_double(const char* fmt, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, v);
    return buf;
}

struct ArmArrivals {
    std::vector<double> signal;
    std::vector<double> idler;
};

// One survival draw per photon, signal before idler, keyed by the event
// index so the result does not depend on chunking or thread count.
ArmArrivals propagate_pairs(const std::vector<PhotonPairEvent>& events,
                            const ExperimentConfig& cfg, int workers) {
    const double lambda_ref = cfg.source.degenerate_wavelength_nm();
    const std::size_t n = events.size();
    constexpr std::size_t kBlock = std::size_t{1} << 16;
    const std::size_t n_blocks = (n + kBlock - 1) / kBlock;
    std::vector<ArmArrivals> blocks(n_blocks);
    parallel_for_index(n_blocks, workers, [&](std::size_t b) {
        const std::size_t lo = b * kBlock;
        const std::size_t hi = std::min(n, lo + kBlock);
        auto& out = blocks[b];
        out.signal.reserve(hi - lo);
        out.idler.reserve(hi - lo);
        for (std::size_t i = lo; i < hi; ++i) {
            const auto& ev = events[i];
            Rng rng(cfg.seed, stream_tag::kChain, i);
            const auto ts = propagate(ev.t_signal_ps(), ev.lambda_signal_nm,
                                      cfg.arm_signal, lambda_ref, rng);
            const auto ti = propagate(ev.t_idler_ps(), ev.lambda_idler_nm,
                                      cfg.arm_idler, lambda_ref, rng);
            if (ts) out.signal.push_back(*ts);
            if (ti) out.idler.push_back(*ti);
        }
    });
    ArmArrivals all;
    all.signal.reserve(n);
    all.idler.reserve(n);
    for (auto& blk : blocks) {
        all.signal.insert(all.signal.end(), blk.signal.begin(), blk.signal.end());
        all.idler.insert(all.idler.end(), blk.idler.begin(), blk.idler.end());
    }
    std::sort(all.signal.begin(), all.signal.end());
    std::sort(all.idler.begin(), all.idler.end());
    return all;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string chain_text(const FiberChain& chain) {
    std::string s = chain.label.empty() ? std::string("(unlabeled)") : chain.label;
    s += " length_km=" + format_double("%.6g", chain.total_length_km());
    s += " segments=[";
    for (std::size_t i = 0; i < chain.segments.size(); ++i) {
        const auto& seg = chain.segments[i];
        if (i) s += " ";
        s += format_double("%.6g", seg.length_km) + "km@" +
             format_double("%.6g", seg.lambda0_nm) + "nm";
    }
    s += "]";
    return s;
}

double sweep_length(const SweepSpec& sweep, std::size_t i) {
    return sweep.values_km[i];
}

ExperimentConfig sweep_point_config(const SweepSpec& sweep, std::size_t i) {
    ExperimentConfig cfg = sweep.base;
    cfg.seed = hash_mix({sweep.base.seed, stream_tag::kSweep, i});
    FiberSegment seg;
    if (!sweep.base.arm_idler.segments.empty())
        seg = sweep.base.arm_idler.segments.front();
    seg.length_km = sweep_length(sweep, i);
    FiberChain swept;
    swept.segments = {seg};
    swept.bulk_latency_ps_per_km = sweep.base.arm_idler.bulk_latency_ps_per_km;
    if (sweep.mode == SweepMode::Asymmetric) {
        swept.label = "swept_idler";
        cfg.arm_idler = swept;
    } else {
        swept.label = "swept_arm";
        cfg.arm_signal = swept;
        cfg.arm_idler = swept;
    }
    if (!sweep.base.output_dir.empty()) {
        char sub[32];
        std::snprintf(sub, sizeof(sub), "point_%02zu", i);
        cfg.output_dir =
            (std::filesystem::path(sweep.base.output_dir) / sub).string();
    }
    return cfg;
}

FiberSegment make_segment(double length_km, double lambda0_nm,
                          double attenuation_db_per_km) {
    FiberSegment seg;
    seg.length_km = length_km;
    seg.lambda0_nm = lambda0_nm;
    seg.s0_ps_per_nm2_km = 0.092;
    seg.attenuation_db_per_km = attenuation_db_per_km;
    return seg;
}

// Source and detector settings shared by the presets. The wide collection
// window and the 11 nm signal-side width put the idler density centre about
// 70 nm (five sigma) above every preset lambda0, so the dispersion keeps
// one sign across the density and the fitted widths stay inside the
// calibrated ranges (see README, scenario presets).
SourceSpec preset_source() {
    SourceSpec src;
    src.pump_wavelength_nm = 658.0;
    src.window_full_width_nm = 316.0;
    src.wdm_edge_nm = 1316.0;
    src.spectral_shape = SpectralShape::Gaussian;
    src.shape_width_nm = 11.0;
    src.pair_rate_hz = 2.0e6;
    src.sigma0_ps = 0.1;
    return src;
}

// Dead time and dark counts stay off in the presets so they cannot mask
// the dispersion physics; both remain configurable for SNR studies.
DetectorSpec preset_detector(double jitter_fwhm_ps) {
    DetectorSpec det;
    det.jitter_fwhm_ps = jitter_fwhm_ps;
    det.efficiency = 0.25;
    det.dark_count_rate_hz = 0.0;
    det.dead_time_ps = 0.0;
    det.resolution_ps = 125.0;
    return det;
}

ExperimentConfig preset_base(uint64_t seed) {
    ExperimentConfig cfg;
    cfg.source = preset_source();
    cfg.detector_signal = preset_detector(87.0);
    cfg.detector_idler = preset_detector(110.0);
    cfg.correlator.bin_width_ps = 125.0;
    cfg.correlator.window_ps = 2.0e6;
    cfg.correlator.auto_center = true;
    cfg.duration_s = 1.0;
    cfg.seed = seed;
    return cfg;
}

ExperimentConfig preset_local(uint64_t seed) {
    ExperimentConfig cfg = preset_base(seed);
    cfg.arm_signal.segments = {make_segment(0.004, 1316.0, 0.35)};
    cfg.arm_signal.label = "signal_stub";
    cfg.arm_idler.segments = {make_segment(0.004, 1316.0, 0.35)};
    cfg.arm_idler.label = "idler_stub";
    return cfg;
}

ExperimentConfig preset_long_spools(uint64_t seed) {
    ExperimentConfig cfg = preset_base(seed);
    const std::vector<double> lengths = {10.0, 20.0, 50.0};
    for (double len : lengths) {
        cfg.arm_signal.segments.push_back(make_segment(len, 1320.0, 0.0));
        cfg.arm_idler.segments.push_back(make_segment(len, 1320.0, 0.0));
    }
    cfg.arm_signal.label = "signal_spools";
    cfg.arm_idler.label = "idler_spools";
    return cfg;
}

ExperimentConfig preset_deployed_link(uint64_t seed) {
    ExperimentConfig cfg = preset_base(seed);
    // Per-segment zero-dispersion wavelengths are drawn from the seed so
    // different seeds model different installed spans; the drawn values
    // land in the run log.
    Rng rng(seed, stream_tag::kPreset, 0);
    auto draw_lambda0 = [&rng] { return 1314.0 + 8.0 * rng.uniform(); };
    for (int i = 0; i < 5; ++i)
        cfg.arm_signal.segments.push_back(
            make_segment(2.084, draw_lambda0(), 0.35));
    for (int i = 0; i < 5; ++i)
        cfg.arm_idler.segments.push_back(
            make_segment(2.044, draw_lambda0(), 0.35));
    cfg.arm_signal.label = "deployed_a";
    cfg.arm_idler.label = "deployed_b";
    return cfg;
}

SweepSpec preset_length_sweep(uint64_t seed, SweepMode mode) {
    SweepSpec sweep;
    sweep.base = preset_base(seed);
    sweep.base.arm_signal.label = "signal_direct";
    sweep.base.arm_idler.segments = {make_segment(1.0, 1315.5, 0.35)};
    sweep.base.arm_idler.label = "idler_spool";
    sweep.mode = mode;
    sweep.values_km = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    return sweep;
}

}  // namespace

SummaryReport run_experiment(const ExperimentConfig& config, int workers) {
    config.validate();

    SummaryReport report;
    report.predicted_fwhm_ps = predict_fwhm_ps(config);
    report.predicted_peak_ps = predict_peak_ps(config);

    const auto events =
        sample_emissions(config.source, config.duration_s, config.seed, workers);
    report.emitted_pairs = events.size();

    const auto arrivals = propagate_pairs(events, config, workers);
    const auto signal_stream =
        detect(arrivals.signal, config.detector_signal, config.duration_s,
               hash_mix({config.seed, stream_tag::kDetect, 0}), 0);
    const auto idler_stream =
        detect(arrivals.idler, config.detector_idler, config.duration_s,
               hash_mix({config.seed, stream_tag::kDetect, 1}), 1);
    report.signal_detections = signal_stream.size();
    report.idler_detections = idler_stream.size();

    const double center = config.correlator.auto_center
                              ? report.predicted_peak_ps
                              : config.correlator.tau_center_ps;
    const double half_span = 0.5 * config.correlator.window_ps;
    report.histogram =
        cross_correlate(signal_stream, idler_stream,
                        config.correlator.bin_width_ps, center - half_span,
                        center + half_span);

    const bool writing = !config.output_dir.empty();
    std::filesystem::path dir(config.output_dir);
    if (writing) {
        std::filesystem::create_directories(dir);
        write_text_file(dir / "config.ini", serialize_config(config));
        write_timestamp_file(dir / "signal.ptag", signal_stream);
        write_timestamp_file(dir / "idler.ptag", idler_stream);
        write_histogram_csv(dir / "histogram.csv", report.histogram);
        std::string pred;
        pred += "predicted_peak_ps = " +
                format_double("%.6f", report.predicted_peak_ps) + "\n";
        pred += "predicted_fwhm_ps = " +
                format_double("%.6f", report.predicted_fwhm_ps) + "\n";
        const auto bounds =
            delay_bounds(config.arm_signal, config.arm_idler, config.source);
        pred += "delay_spread_fwhm_ps = " +
                format_double("%.6f", delay_spread_fwhm_ps(config.arm_signal,
                                                           config.arm_idler,
                                                           config.source)) +
                "\n";
        pred += "jitter_floor_fwhm_ps = " +
                format_double(
                    "%.6f",
                    jitter_floor_fwhm(config.detector_signal,
                                      config.detector_idler,
                                      config.source.sigma0_ps)) +
                "\n";
        pred += "dtau_min_ps = " + format_double("%.6f", bounds.dtau_min_ps) + "\n";
        pred += "dtau_max_ps = " + format_double("%.6f", bounds.dtau_max_ps) + "\n";
        write_text_file(dir / "prediction.txt", pred);
    }

    try {
        report.tau_peak_ps = find_peak_ps(report.histogram);
        report.fit = fit_fwhm(report.histogram);
    } catch (const FitError&) {
        if (writing)
            write_text_file(dir / "run.log", summary_text(config, report) +
                                                 "fit_status = error\n");
        throw;
    }
    report.tau_peak_net_ps =
        report.fit.center_ps - (config.arm_idler.bulk_latency_ps() -
                                config.arm_signal.bulk_latency_ps());

    const double pair_window =
        std::max(4.0 * report.fit.fwhm_ps, 4.0 * config.correlator.bin_width_ps);
    const auto pairing = pair_events(signal_stream, idler_stream,
                                     report.fit.center_ps, pair_window);
    report.coincidences = pairing.pairs.size();
    report.accidental_estimate = pairing.accidental_estimate;

    if (writing) {
        write_text_file(dir / "fit.txt", peak_fit_text(report.fit));
        write_text_file(dir / "run.log", summary_text(config, report));
    }
    return report;
}

std::string summary_text(const ExperimentConfig& config,
                         const SummaryReport& report) {
    std::string s;
    s += std::string("version = ") + kVersion + "\n";
    s += "seed = " + std::to_string(config.seed) + "\n";
    s += "duration_s = " + format_double("%.6g", config.duration_s) + "\n";
    s += "signal_chain = " + chain_text(config.arm_signal) + "\n";
    s += "idler_chain = " + chain_text(config.arm_idler) + "\n";
    s += "emitted_pairs = " + std::to_string(report.emitted_pairs) + "\n";
    s += "signal_detections = " + std::to_string(report.signal_detections) + "\n";
    s += "idler_detections = " + std::to_string(report.idler_detections) + "\n";
    s += "coincidences = " + std::to_string(report.coincidences) + "\n";
    s += "accidental_estimate = " +
         format_double("%.6f", report.accidental_estimate) + "\n";
    s += "predicted_peak_ps = " +
         format_double("%.6f", report.predicted_peak_ps) + "\n";
    s += "predicted_fwhm_ps = " +
         format_double("%.6f", report.predicted_fwhm_ps) + "\n";
    if (report.fit.fwhm_ps > 0.0) {
        s += "tau_peak_ps = " + format_double("%.6f", report.tau_peak_ps) + "\n";
        s += "tau_peak_net_ps = " +
             format_double("%.6f", report.tau_peak_net_ps) + "\n";
        s += "fit_center_ps = " + format_double("%.6f", report.fit.center_ps) + "\n";
        s += "fit_fwhm_ps = " + format_double("%.6f", report.fit.fwhm_ps) + "\n";
        s += "fit_fwhm_stderr_ps = " +
             format_double("%.6f", report.fit.fwhm_stderr_ps) + "\n";
        s += "fit_amplitude = " + format_double("%.6f", report.fit.amplitude) + "\n";
        s += "fit_background = " +
             format_double("%.6f", report.fit.background_per_bin) + "\n";
        s += "fit_goodness = " + format_double("%.6f", report.fit.goodness) + "\n";
    }
    return s;
}

std::string SweepReport::csv() const {
    std::string s = "length_km,fwhm_ps,fwhm_stderr_ps\n";
    for (const auto& p : points) {
        s += format_double("%.6f", p.length_km) + "," +
             format_double("%.6f", p.summary.fit.fwhm_ps) + "," +
             format_double("%.6f", p.summary.fit.fwhm_stderr_ps) + "\n";
    }
    return s;
}

SweepReport run_sweep(const SweepSpec& sweep, int workers) {
    sweep.validate();
    const std::size_t n = sweep.values_km.size();

    SweepReport report;
    report.points.resize(n);
    parallel_for_index(n, workers, [&](std::size_t i) {
        const ExperimentConfig cfg = sweep_point_config(sweep, i);
        report.points[i].length_km = sweep_length(sweep, i);
        report.points[i].summary = run_experiment(cfg, 1);
    });

    double sx = 0, sy = 0;
    for (const auto& p : report.points) {
        sx += p.length_km;
        sy += p.summary.fit.fwhm_ps;
    }
    const double mx = sx / static_cast<double>(n);
    const double my = sy / static_cast<double>(n);
    double sxx = 0, sxy = 0, syy = 0;
    for (const auto& p : report.points) {
        const double dx = p.length_km - mx;
        const double dy = p.summary.fit.fwhm_ps - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx > 0.0) {
        report.slope_ps_per_km = sxy / sxx;
        report.intercept_ps = my - report.slope_ps_per_km * mx;
        double ss_res = 0;
        for (const auto& p : report.points) {
            const double r = p.summary.fit.fwhm_ps - report.intercept_ps -
                             report.slope_ps_per_km * p.length_km;
            ss_res += r * r;
        }
        report.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
        report.slope_stderr_ps_per_km =
            n > 2 ? std::sqrt(ss_res / (static_cast<double>(n) - 2.0) / sxx)
                  : std::numeric_limits<double>::infinity();
    } else {
        // All points at one length: no slope information.
        report.slope_ps_per_km = 0.0;
        report.intercept_ps = my;
        report.r_squared = 1.0;
        report.slope_stderr_ps_per_km = std::numeric_limits<double>::infinity();
    }

    if (!sweep.base.output_dir.empty()) {
        const std::filesystem::path dir(sweep.base.output_dir);
        std::filesystem::create_directories(dir);
        write_text_file(dir / "sweep.csv", report.csv());
        std::string log;
        log += std::string("version = ") + kVersion + "\n";
        log += "seed = " + std::to_string(sweep.base.seed) + "\n";
        log += "mode = " + to_string(sweep.mode) + "\n";
        log += "points = " + std::to_string(n) + "\n";
        log += "slope_ps_per_km = " +
               format_double("%.6f", report.slope_ps_per_km) + "\n";
        log += "slope_stderr_ps_per_km = " +
               format_double("%.6f", report.slope_stderr_ps_per_km) + "\n";
        log += "intercept_ps = " + format_double("%.6f", report.intercept_ps) + "\n";
        log += "r_squared = " + format_double("%.6f", report.r_squared) + "\n";
        write_text_file(dir / "sweep.log", log);
    }
    return report;
}

std::vector<std::string> preset_names() {
    return {"local", "asymmetric_sweep", "symmetric_sweep", "long_spools",
            "deployed_link"};
}

bool preset_is_sweep(const std::string& name) {
    return name == "asymmetric_sweep" || name == "symmetric_sweep";
}

ExperimentConfig preset_config(const std::string& name, uint64_t seed) {
    if (name == "local") return preset_local(seed);
    if (name == "long_spools") return preset_long_spools(seed);
    if (name == "deployed_link") return preset_deployed_link(seed);
    if (preset_is_sweep(name))
        throw ConfigError("preset '" + name + "' is a sweep, use preset_sweep");
    throw ConfigError("unknown preset '" + name + "'");
}

SweepSpec preset_sweep(const std::string& name, uint64_t seed) {
    if (name == "asymmetric_sweep")
        return preset_length_sweep(seed, SweepMode::Asymmetric);
    if (name == "symmetric_sweep")
        return preset_length_sweep(seed, SweepMode::Symmetric);
    if (name == "local" || name == "long_spools" || name == "deployed_link")
        throw ConfigError("preset '" + name +
                          "' is a single run, use preset_config");
    throw ConfigError("unknown preset '" + name + "'");
}

}  // namespace pairtime
