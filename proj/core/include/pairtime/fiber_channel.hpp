#pragma once

#include <optional>
#include <string>
#include <vector>

namespace pairtime {

class Rng;

// One span of G.652-style fiber with its own zero-dispersion wavelength.
struct FiberSegment {
    double length_km = 1.0;
    double lambda0_nm = 1313.0;
    double s0_ps_per_nm2_km = 0.092;
    double attenuation_db_per_km = 0.35;

    // throws ConfigError; the wavelength band guards against unit mistakes
    void validate(double lambda0_lo_nm = 1250.0, double lambda0_hi_nm = 1400.0) const;
};

// Ordered segments traversed by one arm. An empty chain is a zero-length
// pass-through (no delay, no loss), which models an arm with no fiber.
struct FiberChain {
    std::vector<FiberSegment> segments;
    std::string label;
    double bulk_latency_ps_per_km = 4.9e6;

    double total_length_km() const;
    double total_attenuation_db() const;
    double survival_probability() const;  // 10^(-dB/10)
    double bulk_latency_ps() const;       // total_length * bulk_latency_ps_per_km

    void validate() const;  // throws ConfigError
};

// D(lambda) = (S0/4) * (lambda - lambda0^4 / lambda^3), ps/(nm km).
double dispersion_ps_per_nm_km(const FiberSegment& seg, double lambda_nm);

// Integral of D from lambda_ref to lambda, times length, summed over the
// chain. Uses the closed-form antiderivative (S0/4)(l^2/2 + l0^4/(2 l^2)).
double relative_group_delay_ps(const FiberChain& chain, double lambda_nm,
                               double lambda_ref_nm);

// Applies loss and delay to one photon. Returns the shifted arrival time,
// or nothing when the photon is absorbed. Consumes exactly one uniform
// draw from rng.
std::optional<double> propagate(double arrival_ps, double lambda_nm,
                                const FiberChain& chain, double lambda_ref_nm,
                                Rng& rng);

}  // namespace pairtime
