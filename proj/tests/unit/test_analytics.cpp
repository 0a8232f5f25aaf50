#include <cmath>

#include <doctest.h>

#include "pairtime/analytics.hpp"
#include "pairtime/errors.hpp"
#include "pairtime/rng.hpp"

using namespace pairtime;

namespace {

FiberChain chain_km(double len, double lam0, double atten = 0.0) {
    FiberChain c;
    FiberSegment seg;
    seg.length_km = len;
    seg.lambda0_nm = lam0;
    seg.s0_ps_per_nm2_km = 0.092;
    seg.attenuation_db_per_km = atten;
    c.segments = {seg};
    return c;
}

SourceSpec source_with_window(double window_nm) {
    SourceSpec src;
    src.window_full_width_nm = window_nm;
    return src;
}

}  // namespace

TEST_CASE("nonlocal width formula matches the symbolic oracle") {
    DispersionBudget b;
    b.beta1_x1_ps2 = 50.0;
    b.beta2_x2_ps2 = 0.0;
    b.sigma0_ps = 0.1;
    CHECK(franson_width_ps(b) == doctest::Approx(353.5533905932737).epsilon(1e-13));

    b.beta2_x2_ps2 = -50.0;  // perfect compensation
    CHECK(franson_width_ps(b) == doctest::Approx(0.0));

    b.sigma0_ps = 0.0;
    CHECK_THROWS_AS(franson_width_ps(b), ConfigError);
}

TEST_CASE("nonlocal width is homogeneous in the budget terms") {
    Rng rng(404);
    for (int i = 0; i < 100; ++i) {
        DispersionBudget b;
        b.beta1_x1_ps2 = rng.uniform(-200.0, 200.0);
        b.beta2_x2_ps2 = rng.uniform(-200.0, 200.0);
        b.sigma0_ps = rng.uniform(0.05, 2.0);
        const double base = franson_width_ps(b);
        const double k = rng.uniform(0.1, 10.0);

        DispersionBudget scaled = b;
        scaled.beta1_x1_ps2 *= k;
        scaled.beta2_x2_ps2 *= k;
        CHECK(franson_width_ps(scaled) == doctest::Approx(k * base).epsilon(1e-12));

        DispersionBudget narrowed = b;
        narrowed.sigma0_ps *= k;
        CHECK(franson_width_ps(narrowed) == doctest::Approx(base / k).epsilon(1e-12));
    }
}

TEST_CASE("beta2 conversion matches the dimensional oracle") {
    CHECK(beta2_from_dispersion(0.0, 1340.0) == doctest::Approx(0.0));
    CHECK(beta2_from_dispersion(2.15, 1340.0) ==
          doctest::Approx(-2.0494979363489714).epsilon(1e-13));
    CHECK(beta2_from_dispersion(1.0, 1316.0) < 0.0);
    CHECK(beta2_from_dispersion(-1.0, 1316.0) > 0.0);
}

TEST_CASE("delay bounds reproduce the one arm band edge spread") {
    const SourceSpec src;  // 50 nm window split at 1316
    const FiberChain empty;
    const auto idler = chain_km(10.0, 1316.0);
    const auto b = delay_bounds(empty, idler, src);
    CHECK(b.dtau_min_ps == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(b.dtau_max_ps == doctest::Approx(282.165174338661).epsilon(1e-9));
    CHECK(b.spread_ps() == doctest::Approx(282.165174338661).epsilon(1e-9));
    CHECK(b.tau_s_center_ps == doctest::Approx(0.0));
    CHECK(b.tau_i_center_ps == doctest::Approx(68.58228408178547).epsilon(1e-9));
}

TEST_CASE("swapping the arms mirrors the delay bounds") {
    const SourceSpec src;
    const FiberChain empty;
    const auto fiber = chain_km(10.0, 1316.0);
    const auto fwd = delay_bounds(empty, fiber, src);
    const auto rev = delay_bounds(fiber, empty, src);
    CHECK(rev.dtau_max_ps == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(rev.dtau_min_ps < 0.0);
    // band centers sit on slightly different wavelengths, so the mirrored
    // center delay agrees only to the band asymmetry
    const double fwd_center = fwd.tau_i_center_ps - fwd.tau_s_center_ps;
    const double rev_center = rev.tau_i_center_ps - rev.tau_s_center_ps;
    CHECK(rev_center == doctest::Approx(-fwd_center).epsilon(0.025));
}

TEST_CASE("matched fibers on both arms nearly cancel the spread") {
    const SourceSpec src;
    const auto fiber = chain_km(10.0, 1316.0);
    const auto sym = delay_bounds(fiber, fiber, src);
    const auto asym = delay_bounds(FiberChain{}, fiber, src);
    CHECK(sym.spread_ps() < 0.04 * asym.spread_ps());
}

TEST_CASE("symmetric suppression beats one percent on a narrow band") {
    const auto src = source_with_window(10.0);
    const auto fiber = chain_km(10.0, 1316.0);
    const auto sym = delay_bounds(fiber, fiber, src);
    const auto asym = delay_bounds(FiberChain{}, fiber, src);
    CHECK(asym.spread_ps() == doctest::Approx(11.456513557495782).epsilon(1e-9));
    CHECK(sym.spread_ps() <= 0.01 * asym.spread_ps());
}

TEST_CASE("doubling the scan grid leaves the bounds unchanged") {
    const auto src = source_with_window(40.0);
    const auto sig = chain_km(3.0, 1310.0);
    const auto idl = chain_km(7.0, 1320.0);
    const auto coarse = delay_bounds(sig, idl, src, 512);
    const auto fine = delay_bounds(sig, idl, src, 1024);
    CHECK(std::abs(fine.spread_ps() - coarse.spread_ps()) <
          1e-3 * coarse.spread_ps());
    CHECK(fine.tau_i_center_ps == doctest::Approx(coarse.tau_i_center_ps));
}

TEST_CASE("flat spectrum spread equals the bound span for a linear delay") {
    // lambda0 far below the band keeps D nearly constant across it, so the
    // induced delay density is close to flat and its FWHM is the full span.
    const auto src = source_with_window(10.0);
    const auto idler = chain_km(10.0, 1302.0);
    const auto b = delay_bounds(FiberChain{}, idler, src);
    const double fwhm = delay_spread_fwhm_ps(FiberChain{}, idler, src);
    CHECK(fwhm == doctest::Approx(b.spread_ps()).epsilon(0.01));
}

TEST_CASE("flat spectrum spread collapses when the band straddles lambda0") {
    // At lambda0 the delay derivative vanishes, so the density piles up at
    // zero and the half-maximum width is far below the min-max span.
    const auto src = source_with_window(10.0);
    const auto idler = chain_km(10.0, 1316.0);
    const auto b = delay_bounds(FiberChain{}, idler, src);
    const double fwhm = delay_spread_fwhm_ps(FiberChain{}, idler, src);
    CHECK(fwhm < 0.05 * b.spread_ps());
}

TEST_CASE("gaussian spectrum spread follows the weighted deviation") {
    SourceSpec src;
    src.spectral_shape = SpectralShape::Gaussian;
    src.shape_width_nm = 12.0;
    const auto fiber = chain_km(10.0, 1316.0);
    const double sym = delay_spread_fwhm_ps(fiber, fiber, src);
    CHECK(sym == doctest::Approx(6.378811729972597).epsilon(1e-6));
}

TEST_CASE("predicted width without fiber is the jitter and binning floor") {
    ExperimentConfig cfg;
    cfg.detector_signal.jitter_fwhm_ps = 87.0;
    cfg.detector_idler.jitter_fwhm_ps = 110.0;
    cfg.correlator.bin_width_ps = 125.0;
    CHECK(predict_fwhm_ps(cfg) ==
          doctest::Approx(163.97968954296508).epsilon(1e-12));
}

TEST_CASE("perfect compensation predicts the no fiber floor") {
    ExperimentConfig cfg;
    cfg.detector_signal.jitter_fwhm_ps = 87.0;
    cfg.detector_idler.jitter_fwhm_ps = 110.0;
    cfg.source.spectral_shape = SpectralShape::Gaussian;
    cfg.source.shape_width_nm = 12.0;
    const double bare = predict_fwhm_ps(cfg);
    cfg.arm_signal = chain_km(10.0, 1316.0);
    cfg.arm_idler = chain_km(10.0, 1316.0);
    CHECK(predict_fwhm_ps(cfg) == doctest::Approx(bare).epsilon(0.002));
}

TEST_CASE("prediction never drops below the floor") {
    Rng rng(606);
    for (int i = 0; i < 50; ++i) {
        ExperimentConfig cfg;
        cfg.detector_signal.jitter_fwhm_ps = rng.uniform(0.0, 200.0);
        cfg.detector_idler.jitter_fwhm_ps = rng.uniform(0.0, 200.0);
        cfg.correlator.bin_width_ps = rng.uniform(1.0, 500.0);
        cfg.source.window_full_width_nm = rng.uniform(10.0, 60.0);
        if (i % 2 == 0) cfg.arm_idler = chain_km(rng.uniform(0.1, 20.0),
                                                 rng.uniform(1302.0, 1322.0));
        if (i % 3 == 0) cfg.arm_signal = chain_km(rng.uniform(0.1, 20.0),
                                                  rng.uniform(1302.0, 1322.0));
        const double floor = jitter_floor_fwhm(cfg.detector_signal,
                                               cfg.detector_idler,
                                               cfg.source.sigma0_ps);
        CHECK(predict_fwhm_ps(cfg) >= floor);
    }
}

TEST_CASE("predicted peak combines latency and band center delays") {
    ExperimentConfig cfg;
    cfg.arm_idler = chain_km(10.0, 1316.0);
    const double expected = 10.0 * 4.9e6 + 68.58228408178547;
    CHECK(predict_peak_ps(cfg) == doctest::Approx(expected).epsilon(1e-12));
    // swapping arms negates the latency part and mirrors the delay part
    ExperimentConfig rev;
    rev.arm_signal = chain_km(10.0, 1316.0);
    CHECK(predict_peak_ps(rev) < -10.0 * 4.9e6 + 100.0);
}
