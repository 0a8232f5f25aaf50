#include "pairtime/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pairtime {

double Rng::exponential(double mean) {
    return -mean * std::log(uniform_pos());
}

double Rng::normal() {
    const double u1 = uniform_pos();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::normal_truncated(double mu, double sigma, double lo, double hi) {
    if (!(lo < hi)) throw std::invalid_argument("normal_truncated: empty interval");
    // Rejection is fine here: callers keep the bulk of the mass inside [lo, hi].
    for (int i = 0; i < 10000; ++i) {
        const double x = mu + sigma * normal();
        if (x >= lo && x <= hi) return x;
    }
    // Distribution mass inside the window is negligible; fall back to the
    // nearest bound midpoint rather than spinning forever.
    return 0.5 * (lo + hi);
}

}  // namespace pairtime
