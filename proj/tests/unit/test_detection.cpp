#include <algorithm>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "pairtime/detection.hpp"
#include "pairtime/errors.hpp"

using namespace pairtime;

namespace {

DetectorSpec ideal() {
    DetectorSpec d;
    d.jitter_fwhm_ps = 0.0;
    d.efficiency = 1.0;
    d.dark_count_rate_hz = 0.0;
    d.dead_time_ps = 0.0;
    d.resolution_ps = 1.0;
    return d;
}

}  // namespace

TEST_CASE("ideal detector passes integer arrivals through unchanged") {
    const std::vector<double> arrivals = {0.0, 10.0, 55.0, 1234.0};
    const auto out = detect(arrivals, ideal(), 1e-6, 7);
    REQUIRE(out.size() == arrivals.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        CHECK(out.time_ps(i) == doctest::Approx(arrivals[i]));
    CHECK(out.resolution_ps == doctest::Approx(1.0));
}

TEST_CASE("quantization floors arrival times onto the tick grid") {
    auto spec = ideal();
    spec.resolution_ps = 125.0;
    const std::vector<double> arrivals = {10.0, 250.0, 374.999, 375.0};
    const auto out = detect(arrivals, spec, 1e-6, 7);
    REQUIRE(out.size() == 3);  // 374.999 and 250 share no tick; 374.999 -> 2, 375 -> 3
    CHECK(out.ticks[0] == 0);
    CHECK(out.ticks[1] == 2);
    CHECK(out.ticks[2] == 3);
}

TEST_CASE("events sharing a tick collapse even with zero dead time") {
    const std::vector<double> arrivals = {5.1, 5.7};
    const auto out = detect(arrivals, ideal(), 1e-6, 7);
    REQUIRE(out.size() == 1);
    CHECK(out.ticks[0] == 5);
}

TEST_CASE("dead time drops events closer than the configured gap") {
    auto spec = ideal();
    spec.dead_time_ps = 200.0;
    const std::vector<double> arrivals = {0.0, 100.0, 260.0};
    const auto out = detect(arrivals, spec, 1e-6, 7);
    REQUIRE(out.size() == 2);
    CHECK(out.time_ps(0) == doctest::Approx(0.0));
    CHECK(out.time_ps(1) == doctest::Approx(260.0));
}

TEST_CASE("output is strictly sorted with dead time enforced on the grid") {
    auto spec = ideal();
    spec.resolution_ps = 125.0;
    spec.dead_time_ps = 500.0;
    spec.jitter_fwhm_ps = 300.0;
    std::vector<double> arrivals;
    double t = 0.0;
    for (int i = 0; i < 20000; ++i) {
        t += 350.0;
        arrivals.push_back(t);
    }
    const auto out = detect(arrivals, spec, 1e-4, 99);
    REQUIRE(out.size() > 1000);
    for (std::size_t i = 1; i < out.size(); ++i) {
        REQUIRE(out.ticks[i] > out.ticks[i - 1]);
        REQUIRE(out.time_ps(i) - out.time_ps(i - 1) >= spec.dead_time_ps);
    }
}

TEST_CASE("jitter spread matches the configured width within two percent") {
    auto spec = ideal();
    const double sigma = 100.0;
    spec.jitter_fwhm_ps = 2.3548200450309493 * sigma;
    const int n = 100000;
    std::vector<double> arrivals(n);
    for (int i = 0; i < n; ++i) arrivals[i] = 1.0e5 + 1.0e7 * i;
    const auto out = detect(arrivals, spec, 1.1, 4);
    REQUIRE(out.size() == static_cast<std::size_t>(n));
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d = out.time_ps(i) - arrivals[i];
        sum += d;
        sumsq += d * d;
    }
    const double mean = sum / n;
    const double sd = std::sqrt(sumsq / n - mean * mean);
    CHECK(sd == doctest::Approx(sigma).epsilon(0.02));
}

TEST_CASE("efficiency thins the stream binomially") {
    auto spec = ideal();
    spec.efficiency = 0.3;
    const int n = 100000;
    std::vector<double> arrivals(n);
    for (int i = 0; i < n; ++i) arrivals[i] = 1.0e4 * (i + 1);
    const auto out = detect(arrivals, spec, 1.1, 8);
    const double expected = spec.efficiency * n;
    const double se = std::sqrt(spec.efficiency * (1.0 - spec.efficiency) * n);
    CHECK(std::abs(static_cast<double>(out.size()) - expected) < 5.0 * se);
}

TEST_CASE("dark count gaps pass an exponential KS test") {
    auto spec = ideal();
    spec.dark_count_rate_hz = 1.0e5;
    const double duration_s = 1.0;
    const auto out = detect({}, spec, duration_s, 31);
    REQUIRE(out.size() > 90000);
    std::vector<double> gaps(out.size() - 1);
    for (std::size_t i = 1; i < out.size(); ++i)
        gaps[i - 1] = out.time_ps(i) - out.time_ps(i - 1);
    std::sort(gaps.begin(), gaps.end());
    const double mean_gap = 1e12 / spec.dark_count_rate_hz;
    const auto n = static_cast<double>(gaps.size());
    // Kolmogorov-Smirnov against the exponential law, 1% critical value
    double d_stat = 0.0;
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        const double f = 1.0 - std::exp(-gaps[i] / mean_gap);
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        d_stat = std::max({d_stat, std::abs(f - lo), std::abs(f - hi)});
    }
    CHECK(d_stat < 1.628 / std::sqrt(n));
}

TEST_CASE("events jittered outside the acquisition are dropped") {
    auto spec = ideal();
    const std::vector<double> arrivals = {-5.0, 10.0, 2.0e6};
    const auto out = detect(arrivals, spec, 1.0e-6, 3);
    REQUIRE(out.size() == 1);
    CHECK(out.time_ps(0) == doctest::Approx(10.0));
}

TEST_CASE("detection is deterministic in the seed") {
    auto spec = ideal();
    spec.efficiency = 0.5;
    spec.jitter_fwhm_ps = 80.0;
    spec.dark_count_rate_hz = 1000.0;
    spec.resolution_ps = 125.0;
    std::vector<double> arrivals;
    for (int i = 0; i < 5000; ++i) arrivals.push_back(2.0e5 * (i + 1));
    const auto a = detect(arrivals, spec, 1.1e-3, 17, 1);
    const auto b = detect(arrivals, spec, 1.1e-3, 17, 1);
    CHECK(a.ticks == b.ticks);
    CHECK(a.channel_id == 1);
    const auto c = detect(arrivals, spec, 1.1e-3, 18, 1);
    CHECK(a.ticks != c.ticks);
}

TEST_CASE("jitter floor combines detector widths and the pair spread") {
    DetectorSpec a = ideal(), b = ideal();
    a.jitter_fwhm_ps = 87.0;
    b.jitter_fwhm_ps = 110.0;
    CHECK(jitter_floor_fwhm(a, b) ==
          doctest::Approx(140.24621207005913).epsilon(1e-13));
    CHECK(jitter_floor_fwhm(a, b, 0.1) ==
          doctest::Approx(140.24640976429467).epsilon(1e-13));
    CHECK(jitter_floor_fwhm(a, b, 0.1) == jitter_floor_fwhm(b, a, 0.1));
    DetectorSpec z = ideal();
    CHECK(jitter_floor_fwhm(z, z) == doctest::Approx(0.0));
    CHECK(jitter_floor_fwhm(z, z, 0.1) ==
          doctest::Approx(0.23548200450309493).epsilon(1e-13));
}

TEST_CASE("detector validation rejects out of range settings") {
    auto spec = ideal();
    spec.efficiency = 1.5;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec = ideal();
    spec.resolution_ps = 0.0;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec = ideal();
    spec.jitter_fwhm_ps = -1.0;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    CHECK_THROWS_AS(detect({}, ideal(), -1.0, 1), ConfigError);
}
