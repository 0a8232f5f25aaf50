#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "pairtime/analytics.hpp"
#include "pairtime/config_io.hpp"
#include "pairtime/errors.hpp"
#include "pairtime/experiment.hpp"
#include "pairtime/timestamp_file.hpp"

using namespace pairtime;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::path("unit_out") / name;
    fs::remove_all(dir);
    return dir;
}

bool mentions(const std::string& text, const std::string& part) {
    return text.find(part) != std::string::npos;
}

ExperimentConfig quick_local(uint64_t seed, double duration_s) {
    ExperimentConfig cfg = preset_config("local", seed);
    cfg.duration_s = duration_s;
    return cfg;
}

const std::vector<std::string> kRunFiles = {
    "config.ini",     "signal.ptag",    "idler.ptag",
    "histogram.csv",  "prediction.txt", "fit.txt",
    "run.log"};

}  // namespace

TEST_CASE("zero duration runs fail the fit but leave outputs behind") {
    const auto dir = fresh_dir("zero");
    ExperimentConfig cfg;
    cfg.duration_s = 0.0;
    cfg.output_dir = dir.string();
    CHECK_THROWS_AS(run_experiment(cfg), FitError);

    for (const char* name : {"config.ini", "signal.ptag", "idler.ptag",
                             "histogram.csv", "prediction.txt", "run.log"})
        CHECK(fs::exists(dir / name));
    CHECK(!fs::exists(dir / "fit.txt"));
    CHECK(mentions(slurp(dir / "run.log"), "fit_status = error"));
    CHECK(read_timestamp_file(dir / "signal.ptag").ticks.empty());
    CHECK(read_timestamp_file(dir / "idler.ptag").ticks.empty());

    std::istringstream csv(slurp(dir / "histogram.csv"));
    std::string line;
    REQUIRE(std::getline(csv, line));
    CHECK(line == "tau_ps,count");
    while (std::getline(csv, line)) {
        REQUIRE(line.size() >= 2);
        CHECK(line.substr(line.rfind(',')) == ",0");
    }
}

TEST_CASE("a short local run writes a complete reproducible output set") {
    const auto dir_a = fresh_dir("local_a");
    const auto dir_b = fresh_dir("local_b");

    auto cfg = quick_local(7, 0.05);
    cfg.output_dir = dir_a.string();
    const auto report = run_experiment(cfg, 1);

    for (const auto& name : kRunFiles) CHECK(fs::exists(dir_a / name));

    CHECK(report.emitted_pairs > 0);
    CHECK(report.signal_detections <= report.emitted_pairs);
    CHECK(report.idler_detections <= report.emitted_pairs);
    CHECK(report.coincidences > 0);
    CHECK(report.coincidences <=
          std::min(report.signal_detections, report.idler_detections));
    CHECK(report.fit.fwhm_ps > 0.0);
    CHECK(report.fit.fwhm_ps ==
          doctest::Approx(report.predicted_fwhm_ps).epsilon(0.5));
    CHECK(report.accidental_estimate <
          0.1 * static_cast<double>(report.coincidences));

    const auto log = slurp(dir_a / "run.log");
    CHECK(mentions(log, std::string("version = ") + kVersion));
    CHECK(mentions(log, "seed = 7"));
    CHECK(mentions(log, "signal_chain = signal_stub"));
    CHECK(mentions(log, "idler_chain = idler_stub"));
    CHECK(mentions(log, "fit_fwhm_ps = "));
    CHECK(log == summary_text(cfg, report));
    CHECK(slurp(dir_a / "fit.txt") == peak_fit_text(report.fit));

    const auto echoed = parse_experiment_file(dir_a / "config.ini");
    CHECK(echoed.seed == 7);
    CHECK(echoed.output_dir.empty());
    CHECK(echoed.arm_signal.label == "signal_stub");

    // Same seed, different directory and worker count: bytes must match.
    auto cfg_b = cfg;
    cfg_b.output_dir = dir_b.string();
    const auto report_b = run_experiment(cfg_b, 4);
    CHECK(report_b.coincidences == report.coincidences);
    CHECK(report_b.fit.fwhm_ps == report.fit.fwhm_ps);
    CHECK(report_b.fit.center_ps == report.fit.center_ps);
    for (const auto& name : kRunFiles)
        CHECK(slurp(dir_a / name) == slurp(dir_b / name));
}

TEST_CASE("ten kilometres of one-arm fiber widens the peak as predicted") {
    ExperimentConfig cfg = preset_sweep("asymmetric_sweep", 11).base;
    cfg.arm_idler.segments.front().length_km = 10.0;
    cfg.duration_s = 0.05;

    const auto report = run_experiment(cfg);
    const double floor = jitter_floor_fwhm(cfg.detector_signal,
                                           cfg.detector_idler,
                                           cfg.source.sigma0_ps);
    CHECK(report.fit.fwhm_ps > 5.0 * floor);
    CHECK(report.fit.fwhm_ps ==
          doctest::Approx(report.predicted_fwhm_ps).epsilon(0.25));

    const double latency_diff =
        cfg.arm_idler.bulk_latency_ps() - cfg.arm_signal.bulk_latency_ps();
    CHECK(latency_diff == doctest::Approx(10.0 * 4.9e6));
    // Short run, so the fitted centre carries bin-scale statistical noise.
    CHECK(std::abs(report.fit.center_ps - report.predicted_peak_ps) <
          2.0 * cfg.correlator.bin_width_ps);
    CHECK(report.tau_peak_net_ps ==
          doctest::Approx(report.fit.center_ps - latency_diff));
    CHECK(report.tau_peak_net_ps > 0.0);
    CHECK(report.tau_peak_net_ps < 5000.0);
}

TEST_CASE("ten kilometre peak sits within one bin of the prediction") {
    ExperimentConfig cfg = preset_sweep("asymmetric_sweep", 42).base;
    cfg.arm_idler.segments.front().length_km = 10.0;

    const auto report = run_experiment(cfg);
    CHECK(std::abs(report.fit.center_ps - report.predicted_peak_ps) <=
          cfg.correlator.bin_width_ps);
}

TEST_CASE("sweeps fit a positive slope over increasing lengths") {
    const auto dir = fresh_dir("sweep_rising");
    SweepSpec sweep = preset_sweep("asymmetric_sweep", 3);
    sweep.base.duration_s = 0.02;
    sweep.base.output_dir = dir.string();
    sweep.values_km = {2.0, 6.0, 10.0};

    const auto report = run_sweep(sweep, 3);
    REQUIRE(report.points.size() == 3);
    CHECK(report.slope_ps_per_km > 0.0);
    CHECK(report.r_squared > 0.9);
    CHECK(std::isfinite(report.slope_stderr_ps_per_km));

    CHECK(fs::exists(dir / "sweep.csv"));
    CHECK(fs::exists(dir / "sweep.log"));
    const auto csv = slurp(dir / "sweep.csv");
    CHECK(csv == report.csv());
    std::istringstream rows(csv);
    std::string line;
    REQUIRE(std::getline(rows, line));
    CHECK(line == "length_km,fwhm_ps,fwhm_stderr_ps");
    std::size_t data_rows = 0;
    while (std::getline(rows, line)) ++data_rows;
    CHECK(data_rows == 3);

    std::set<uint64_t> seeds;
    for (std::size_t i = 0; i < 3; ++i) {
        char sub[16];
        std::snprintf(sub, sizeof(sub), "point_%02zu", i);
        const auto point_dir = dir / sub;
        for (const auto& name : kRunFiles) CHECK(fs::exists(point_dir / name));
        const auto cfg = parse_experiment_file(point_dir / "config.ini");
        CHECK(cfg.arm_idler.label == "swept_idler");
        CHECK(cfg.arm_signal.label == "signal_direct");
        REQUIRE(cfg.arm_idler.segments.size() == 1);
        CHECK(cfg.arm_idler.segments.front().length_km == sweep.values_km[i]);
        CHECK(cfg.seed != sweep.base.seed);
        seeds.insert(cfg.seed);
    }
    CHECK(seeds.size() == 3);  // every point gets its own stream

    // Re-running with a different worker count reproduces the table.
    SweepSpec again = sweep;
    again.base.output_dir.clear();
    CHECK(run_sweep(again, 1).csv() == csv);
}

TEST_CASE("repeated lengths give zero slope and unbounded uncertainty") {
    SweepSpec sweep = preset_sweep("symmetric_sweep", 5);
    sweep.base.duration_s = 0.02;
    sweep.values_km = {3.0, 3.0, 3.0};

    const auto report = run_sweep(sweep);
    CHECK(report.slope_ps_per_km == 0.0);
    CHECK(std::isinf(report.slope_stderr_ps_per_km));
    CHECK(report.r_squared == 1.0);
    CHECK(report.intercept_ps > 0.0);

    // Distinct per-point seeds: statistically independent width estimates.
    const double f0 = report.points[0].summary.fit.fwhm_ps;
    const double f1 = report.points[1].summary.fit.fwhm_ps;
    const double f2 = report.points[2].summary.fit.fwhm_ps;
    CHECK((f0 != f1 || f1 != f2));
    const double spread = std::max({f0, f1, f2}) - std::min({f0, f1, f2});
    CHECK(spread < 0.2 * report.intercept_ps);
}

TEST_CASE("sweep validation rejects short or bad point lists") {
    SweepSpec sweep = preset_sweep("asymmetric_sweep", 1);
    sweep.values_km = {1.0, 2.0};
    CHECK_THROWS_AS(run_sweep(sweep), ConfigError);
    sweep.values_km = {1.0, -2.0, 3.0};
    CHECK_THROWS_AS(run_sweep(sweep), ConfigError);
    sweep.values_km = {1.0, 2.0, 3.0};
    sweep.swept_parameter = "pump_power";
    CHECK_THROWS_AS(run_sweep(sweep), ConfigError);
}

TEST_CASE("presets cover the documented scenarios") {
    const auto names = preset_names();
    const std::vector<std::string> expected = {
        "local", "asymmetric_sweep", "symmetric_sweep", "long_spools",
        "deployed_link"};
    CHECK(names == expected);

    for (const auto& name : names) {
        if (preset_is_sweep(name)) {
            const auto sweep = preset_sweep(name);
            sweep.validate();
            CHECK(sweep.values_km.size() == 10);
            CHECK(sweep.values_km.front() == 1.0);
            CHECK(sweep.values_km.back() == 10.0);
            CHECK_THROWS_AS(preset_config(name), ConfigError);
        } else {
            const auto cfg = preset_config(name);
            cfg.validate();
            CHECK(cfg.seed == 42);
            // Impairments that could mask the dispersion physics stay off.
            CHECK(cfg.detector_signal.dark_count_rate_hz == 0.0);
            CHECK(cfg.detector_signal.dead_time_ps == 0.0);
            CHECK(cfg.detector_idler.dark_count_rate_hz == 0.0);
            CHECK(cfg.detector_idler.dead_time_ps == 0.0);
            CHECK_THROWS_AS(preset_sweep(name), ConfigError);
        }
    }
    CHECK_THROWS_AS(preset_config("warp_drive"), ConfigError);
    CHECK_THROWS_AS(preset_sweep("warp_drive"), ConfigError);

    CHECK(preset_sweep("asymmetric_sweep").mode == SweepMode::Asymmetric);
    CHECK(preset_sweep("symmetric_sweep").mode == SweepMode::Symmetric);

    const auto local = preset_config("local");
    CHECK(local.arm_signal.total_length_km() == 0.004);
    CHECK(local.arm_idler.total_length_km() == 0.004);

    const auto spools = preset_config("long_spools");
    REQUIRE(spools.arm_signal.segments.size() == 3);
    CHECK(spools.arm_signal.total_length_km() == 80.0);
    CHECK(spools.arm_idler.total_length_km() == 80.0);
    for (const auto& seg : spools.arm_signal.segments)
        CHECK(seg.attenuation_db_per_km == 0.0);

    const auto link = preset_config("deployed_link", 42);
    REQUIRE(link.arm_signal.segments.size() == 5);
    REQUIRE(link.arm_idler.segments.size() == 5);
    CHECK(link.arm_signal.total_length_km() == doctest::Approx(10.42));
    CHECK(link.arm_idler.total_length_km() == doctest::Approx(10.22));
    for (const auto& seg : link.arm_signal.segments) {
        CHECK(seg.lambda0_nm >= 1314.0);
        CHECK(seg.lambda0_nm <= 1322.0);
    }

    // Sampled spans derive from the seed: reproducible, seed-sensitive.
    const auto link_same = preset_config("deployed_link", 42);
    const auto link_other = preset_config("deployed_link", 43);
    CHECK(link_same.arm_signal.segments.front().lambda0_nm ==
          link.arm_signal.segments.front().lambda0_nm);
    CHECK(link_other.arm_signal.segments.front().lambda0_nm !=
          link.arm_signal.segments.front().lambda0_nm);
}

TEST_CASE("summary text reports the chain composition") {
    const auto cfg = preset_config("deployed_link", 9);
    SummaryReport report;
    report.predicted_fwhm_ps = predict_fwhm_ps(cfg);
    report.predicted_peak_ps = predict_peak_ps(cfg);
    const auto text = summary_text(cfg, report);
    CHECK(mentions(text, "signal_chain = deployed_a"));
    CHECK(mentions(text, "idler_chain = deployed_b"));
    CHECK(mentions(text, "2.084km@"));
    CHECK(mentions(text, "2.044km@"));
    CHECK(mentions(text, "seed = 9"));
    CHECK(!mentions(text, "fit_fwhm_ps"));  // no fit ran
}
