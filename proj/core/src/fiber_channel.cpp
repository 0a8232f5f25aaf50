#include "pairtime/fiber_channel.hpp"

#include <cmath>

#include "pairtime/errors.hpp"
#include "pairtime/rng.hpp"

namespace pairtime {

namespace {

// Antiderivative of D with respect to wavelength, per unit length.
double delay_antiderivative(const FiberSegment& seg, double lambda_nm) {
    const double l0_sq = seg.lambda0_nm * seg.lambda0_nm;
    const double l0_4 = l0_sq * l0_sq;
    return 0.25 * seg.s0_ps_per_nm2_km *
           (0.5 * lambda_nm * lambda_nm + 0.5 * l0_4 / (lambda_nm * lambda_nm));
}

}  // namespace

void FiberSegment::validate(double lambda0_lo_nm, double lambda0_hi_nm) const {
    if (!(length_km > 0.0))
        throw ConfigError("fiber segment length_km must be positive");
    if (!(s0_ps_per_nm2_km > 0.0))
        throw ConfigError("fiber segment s0_ps_per_nm2_km must be positive");
    if (!(attenuation_db_per_km >= 0.0))
        throw ConfigError("fiber segment attenuation_db_per_km must be non-negative");
    if (!(lambda0_nm >= lambda0_lo_nm && lambda0_nm <= lambda0_hi_nm))
        throw ConfigError("fiber segment lambda0_nm outside validity band [" +
                          std::to_string(lambda0_lo_nm) + ", " +
                          std::to_string(lambda0_hi_nm) + "] nm");
}

double FiberChain::total_length_km() const {
    double sum = 0.0;
    for (const auto& s : segments) sum += s.length_km;
    return sum;
}

double FiberChain::total_attenuation_db() const {
    double sum = 0.0;
    for (const auto& s : segments) sum += s.length_km * s.attenuation_db_per_km;
    return sum;
}

double FiberChain::survival_probability() const {
    return std::pow(10.0, -total_attenuation_db() / 10.0);
}

double FiberChain::bulk_latency_ps() const {
    return total_length_km() * bulk_latency_ps_per_km;
}

void FiberChain::validate() const {
    if (!(bulk_latency_ps_per_km >= 0.0))
        throw ConfigError("bulk_latency_ps_per_km must be non-negative");
    for (const auto& s : segments) s.validate();
}

double dispersion_ps_per_nm_km(const FiberSegment& seg, double lambda_nm) {
    const double l0_sq = seg.lambda0_nm * seg.lambda0_nm;
    const double l0_4 = l0_sq * l0_sq;
    return 0.25 * seg.s0_ps_per_nm2_km *
           (lambda_nm - l0_4 / (lambda_nm * lambda_nm * lambda_nm));
}

double relative_group_delay_ps(const FiberChain& chain, double lambda_nm,
                               double lambda_ref_nm) {
    double delay = 0.0;
    for (const auto& seg : chain.segments)
        delay += seg.length_km * (delay_antiderivative(seg, lambda_nm) -
                                  delay_antiderivative(seg, lambda_ref_nm));
    return delay;
}

std::optional<double> propagate(double arrival_ps, double lambda_nm,
                                const FiberChain& chain, double lambda_ref_nm,
                                Rng& rng) {
    const double u = rng.uniform();
    if (u >= chain.survival_probability()) return std::nullopt;
    return arrival_ps + chain.bulk_latency_ps() +
           relative_group_delay_ps(chain, lambda_nm, lambda_ref_nm);
}

}  // namespace pairtime
