#include "pairtime/detection.hpp"

#include <algorithm>
#include <cmath>

#include "pairtime/errors.hpp"
#include "pairtime/rng.hpp"
#include "stream_tags.hpp"

namespace pairtime {

namespace {

constexpr double kFwhmPerSigma = 2.3548200450309493;  // 2 sqrt(2 ln 2)

}  // namespace

void DetectorSpec::validate() const {
    if (!(jitter_fwhm_ps >= 0.0))
        throw ConfigError("jitter_fwhm_ps must be non-negative");
    if (!(efficiency >= 0.0 && efficiency <= 1.0))
        throw ConfigError("efficiency must be in [0, 1]");
    if (!(dark_count_rate_hz >= 0.0))
        throw ConfigError("dark_count_rate_hz must be non-negative");
    if (!(dead_time_ps >= 0.0))
        throw ConfigError("dead_time_ps must be non-negative");
    if (!(resolution_ps > 0.0))
        throw ConfigError("resolution_ps must be positive");
}

TimestampStream detect(const std::vector<double>& arrivals_ps,
                       const DetectorSpec& spec, double duration_s,
                       uint64_t seed, int channel_id) {
    spec.validate();
    if (duration_s < 0.0) throw ConfigError("duration_s must be non-negative");
    const double duration_ps = duration_s * 1.0e12;
    const double sigma_ps = spec.jitter_fwhm_ps / kFwhmPerSigma;

    std::vector<double> times;
    times.reserve(arrivals_ps.size());
    for (std::size_t i = 0; i < arrivals_ps.size(); ++i) {
        Rng rng(seed, stream_tag::kDetect, i);
        if (spec.efficiency < 1.0 && rng.uniform() >= spec.efficiency) continue;
        double t = arrivals_ps[i];
        if (sigma_ps > 0.0) t += rng.normal(0.0, sigma_ps);
        if (t < 0.0 || t > duration_ps) continue;
        times.push_back(t);
    }

    if (spec.dark_count_rate_hz > 0.0 && duration_ps > 0.0) {
        Rng rng(seed, stream_tag::kDark, 0);
        const double mean_gap_ps = 1.0e12 / spec.dark_count_rate_hz;
        double t = 0.0;
        for (;;) {
            t += rng.exponential(mean_gap_ps);
            if (t >= duration_ps) break;
            times.push_back(t);
        }
    }

    std::sort(times.begin(), times.end());

    TimestampStream out;
    out.channel_id = channel_id;
    out.resolution_ps = spec.resolution_ps;
    out.ticks.reserve(times.size());
    double last_accepted_ps = 0.0;
    bool have_last = false;
    for (double t : times) {
        const auto tick = static_cast<int64_t>(std::floor(t / spec.resolution_ps));
        const double tq = static_cast<double>(tick) * spec.resolution_ps;
        if (have_last &&
            (tq <= last_accepted_ps || tq - last_accepted_ps < spec.dead_time_ps))
            continue;
        out.ticks.push_back(tick);
        last_accepted_ps = tq;
        have_last = true;
    }
    return out;
}

double jitter_floor_fwhm(const DetectorSpec& a, const DetectorSpec& b,
                         double sigma0_ps) {
    const double s0_fwhm = kFwhmPerSigma * sigma0_ps;
    return std::sqrt(a.jitter_fwhm_ps * a.jitter_fwhm_ps +
                     b.jitter_fwhm_ps * b.jitter_fwhm_ps + s0_fwhm * s0_fwhm);
}

}  // namespace pairtime
