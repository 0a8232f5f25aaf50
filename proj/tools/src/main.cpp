#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pairtime/analytics.hpp"
#include "pairtime/config_io.hpp"
#include "pairtime/correlator.hpp"
#include "pairtime/detection.hpp"
#include "pairtime/errors.hpp"
#include "pairtime/experiment.hpp"
#include "pairtime/timestamp_file.hpp"

namespace {

// Default output location: PAIRTIME_OUT_DIR when set, else ./pairtime_out.
// Config files and --out always take precedence.
std::string default_out_root() {
    const char* env = std::getenv("PAIRTIME_OUT_DIR");
    if (env != nullptr && *env != '\0') return env;
    return "pairtime_out";
}

void print_summary(const pairtime::ExperimentConfig& cfg,
                   const pairtime::SummaryReport& report) {
    std::fputs(pairtime::summary_text(cfg, report).c_str(), stdout);
    std::printf("output_dir = %s\n", cfg.output_dir.c_str());
}

// Re-throws parse failures with the offending file name attached.
template <class Parse>
auto load_config(const std::string& path, Parse parse) {
    try {
        return parse(path);
    } catch (const pairtime::ConfigError& e) {
        const std::string msg = e.what();
        if (msg.find(path) != std::string::npos) throw;
        throw pairtime::ConfigError(path + ": " + msg);
    }
}

int cmd_run(const std::string& config_path, int workers) {
    auto cfg = load_config(config_path, pairtime::parse_experiment_file);
    if (cfg.output_dir.empty()) cfg.output_dir = default_out_root();
    const auto report = pairtime::run_experiment(cfg, workers);
    print_summary(cfg, report);
    return 0;
}

int cmd_sweep(const std::string& config_path, int workers) {
    auto sweep = load_config(config_path, pairtime::parse_sweep_file);
    if (sweep.base.output_dir.empty()) sweep.base.output_dir = default_out_root();
    const auto report = pairtime::run_sweep(sweep, workers);
    std::printf("mode = %s\n", pairtime::to_string(sweep.mode).c_str());
    std::printf("points = %zu\n", report.points.size());
    std::printf("slope_ps_per_km = %.6f\n", report.slope_ps_per_km);
    std::printf("slope_stderr_ps_per_km = %.6f\n", report.slope_stderr_ps_per_km);
    std::printf("intercept_ps = %.6f\n", report.intercept_ps);
    std::printf("r_squared = %.6f\n", report.r_squared);
    std::printf("output_dir = %s\n", sweep.base.output_dir.c_str());
    return 0;
}

int cmd_preset(const std::string& name, const std::string& out, uint64_t seed,
               int workers) {
    std::string dir = out;
    if (dir.empty())
        dir = (std::filesystem::path(default_out_root()) / name).string();
    if (pairtime::preset_is_sweep(name)) {
        auto sweep = pairtime::preset_sweep(name, seed);
        sweep.base.output_dir = dir;
        const auto report = pairtime::run_sweep(sweep, workers);
        std::printf("preset = %s\n", name.c_str());
        std::printf("slope_ps_per_km = %.6f\n", report.slope_ps_per_km);
        std::printf("slope_stderr_ps_per_km = %.6f\n",
                    report.slope_stderr_ps_per_km);
        std::printf("r_squared = %.6f\n", report.r_squared);
        std::printf("output_dir = %s\n", dir.c_str());
        return 0;
    }
    auto cfg = pairtime::preset_config(name, seed);
    cfg.output_dir = dir;
    const auto report = pairtime::run_experiment(cfg, workers);
    std::printf("preset = %s\n", name.c_str());
    print_summary(cfg, report);
    return 0;
}

void fft(std::vector<std::complex<double>>& v, bool inverse) {
    const std::size_t n = v.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(v[i], v[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang =
            (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> step(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const auto u = v[i + k];
                const auto t = w * v[i + k + len / 2];
                v[i + k] = u + t;
                v[i + k + len / 2] = u - t;
                w *= step;
            }
        }
    }
    if (inverse)
        for (auto& x : v) x /= static_cast<double>(n);
}

struct CoarseLag {
    double lag_ps = 0.0;
    double bin_ps = 0.0;
};

// Dominant lag between two streams with unknown relative latency: bin both
// onto a shared coarse grid, correlate the count arrays via FFT, take the
// lag with the largest overlap. Resolution is one coarse bin; the caller
// refines from there. The marginal medians or means cannot do this, their
// statistical wobble is far larger than any usable fit window.
CoarseLag coarse_lag(const pairtime::TimestampStream& a,
                     const pairtime::TimestampStream& b) {
    constexpr std::size_t kBins = std::size_t{1} << 16;
    const double t_lo = std::min(a.time_ps(0), b.time_ps(0));
    const double t_hi = std::max(a.time_ps(a.size() - 1),
                                 b.time_ps(b.size() - 1));
    const double coarse = std::max((t_hi - t_lo) / static_cast<double>(kBins), 1.0);

    std::vector<std::complex<double>> ca(2 * kBins), cb(2 * kBins);
    const auto fill = [&](const pairtime::TimestampStream& s,
                          std::vector<std::complex<double>>& out) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            auto k = static_cast<std::size_t>((s.time_ps(i) - t_lo) / coarse);
            out[std::min(k, kBins - 1)] += 1.0;
        }
    };
    fill(a, ca);
    fill(b, cb);
    fft(ca, false);
    fft(cb, false);
    for (std::size_t k = 0; k < ca.size(); ++k) ca[k] = std::conj(ca[k]) * cb[k];
    fft(ca, true);

    // Correlation at lag s lives at index (s mod 2*kBins).
    std::size_t best = 0;
    for (std::size_t k = 1; k < ca.size(); ++k)
        if (ca[k].real() > ca[best].real()) best = k;
    const auto lag = static_cast<double>(
        best < kBins ? static_cast<long long>(best)
                     : static_cast<long long>(best) - 2 * static_cast<long long>(kBins));
    return {lag * coarse, coarse};
}

int cmd_correlate(const std::string& file_a, const std::string& file_b,
                  double bin_ps, double window_ps) {
    const auto a = pairtime::read_timestamp_file(file_a);
    const auto b = pairtime::read_timestamp_file(file_b);

    // Locate the peak before committing to the requested window: a coarse
    // FFT lag search followed by histogram refinement down to the final
    // bin width.
    double center = 0.0;
    if (!a.ticks.empty() && !b.ticks.empty()) {
        const CoarseLag found = coarse_lag(a, b);
        center = found.lag_ps;
        double range = 4.0 * found.bin_ps;
        while (true) {
            const double rbin = std::max(bin_ps, range / 4096.0);
            const auto h = pairtime::cross_correlate(
                a, b, rbin, center - 0.5 * range, center + 0.5 * range);
            center = pairtime::find_peak_ps(h);
            if (rbin == bin_ps || range <= window_ps) break;
            range = 16.0 * rbin;
        }
    }
    const auto hist = pairtime::cross_correlate(a, b, bin_ps,
                                                center - 0.5 * window_ps,
                                                center + 0.5 * window_ps);
    const std::filesystem::path dir(default_out_root());
    std::filesystem::create_directories(dir);
    pairtime::write_histogram_csv(dir / "histogram.csv", hist);
    const auto fit = pairtime::fit_fwhm(hist);
    std::fputs(pairtime::peak_fit_text(fit).c_str(), stdout);
    std::printf("histogram_csv = %s\n", (dir / "histogram.csv").string().c_str());
    return 0;
}

int cmd_predict(const std::string& config_path) {
    const auto cfg = load_config(config_path, pairtime::parse_experiment_file);
    const auto bounds =
        pairtime::delay_bounds(cfg.arm_signal, cfg.arm_idler, cfg.source);
    std::printf("predicted_peak_ps = %.6f\n", pairtime::predict_peak_ps(cfg));
    std::printf("predicted_fwhm_ps = %.6f\n", pairtime::predict_fwhm_ps(cfg));
    std::printf("delay_spread_fwhm_ps = %.6f\n",
                pairtime::delay_spread_fwhm_ps(cfg.arm_signal, cfg.arm_idler,
                                               cfg.source));
    std::printf("jitter_floor_fwhm_ps = %.6f\n",
                pairtime::jitter_floor_fwhm(cfg.detector_signal,
                                            cfg.detector_idler,
                                            cfg.source.sigma0_ps));
    std::printf("dtau_min_ps = %.6f\n", bounds.dtau_min_ps);
    std::printf("dtau_max_ps = %.6f\n", bounds.dtau_max_ps);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"photon pair transmission simulator"};
    app.set_version_flag("--version", pairtime::kVersion);
    app.require_subcommand(1);

    app.fallthrough();  // global flags may follow the subcommand

    int workers = 0;
    app.add_option("--workers", workers,
                   "worker threads (0 = hardware concurrency)");

    std::string run_config;
    auto* run = app.add_subcommand("run", "simulate one scenario config");
    run->add_option("config", run_config, "scenario .ini file")->required();

    std::string sweep_config;
    auto* sweep = app.add_subcommand("sweep", "run a length sweep config");
    sweep->add_option("config", sweep_config, "sweep .ini file")->required();

    std::string preset_name, preset_out;
    uint64_t preset_seed = 42;
    auto* preset = app.add_subcommand("preset", "run a named scenario preset");
    preset->add_option("name", preset_name,
                       "one of: local, asymmetric_sweep, symmetric_sweep, "
                       "long_spools, deployed_link")
        ->required();
    preset->add_option("--out", preset_out, "output directory");
    preset->add_option("--seed", preset_seed, "random seed");

    std::string corr_a, corr_b;
    double bin_ps = 125.0, window_ps = 2.0e6;
    auto* corr = app.add_subcommand("correlate",
                                    "cross-correlate two timestamp files");
    corr->add_option("fileA", corr_a, "first .ptag file")->required();
    corr->add_option("fileB", corr_b, "second .ptag file")->required();
    corr->add_option("--bin-ps", bin_ps, "histogram bin width, ps");
    corr->add_option("--window-ps", window_ps, "full histogram span, ps");

    std::string predict_config;
    auto* predict = app.add_subcommand("predict",
                                       "analytic width and peak, no simulation");
    predict->add_option("config", predict_config, "scenario .ini file")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (run->parsed()) return cmd_run(run_config, workers);
        if (sweep->parsed()) return cmd_sweep(sweep_config, workers);
        if (preset->parsed())
            return cmd_preset(preset_name, preset_out, preset_seed, workers);
        if (corr->parsed()) return cmd_correlate(corr_a, corr_b, bin_ps, window_ps);
        if (predict->parsed()) return cmd_predict(predict_config);
    } catch (const pairtime::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 1;
}
