#pragma once

#include <cstdint>
#include <initializer_list>

namespace pairtime {

// SplitMix64 step. Used for seed expansion and stateless per-event hashing.
inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Mixes an arbitrary list of words (seed, stream tags, indices) into one
// well-scrambled 64-bit value. Order-sensitive.
inline uint64_t hash_mix(std::initializer_list<uint64_t> words) {
    uint64_t state = 0x6a09e667f3bcc909ULL;
    for (uint64_t w : words) {
        state ^= w + 0x9e3779b97f4a7c15ULL + (state << 6) + (state >> 2);
        (void)splitmix64(state);
    }
    return splitmix64(state);
}

// xoshiro256++ with explicit floating-point conversions. All distributions
// are implemented here rather than through <random> so that streams are
// bit-identical across standard libraries and platforms.
//
// Distribution draws consume a fixed number of raw outputs per call
// (normal() always burns two), keeping substreams index-stable.
class Rng {
public:
    explicit Rng(uint64_t seed) { reseed(seed); }
    Rng(uint64_t seed, uint64_t stream, uint64_t substream = 0) {
        reseed(hash_mix({seed, stream, substream}));
    }

    void reseed(uint64_t seed) {
        uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0, 1), 53-bit mantissa.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1]; safe as a log() argument.
    double uniform_pos() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double exponential(double mean);

    // Standard normal via Box-Muller. Always consumes exactly two uniforms;
    // the second variate is discarded.
    double normal();
    double normal(double mu, double sigma) { return mu + sigma * normal(); }

    // Normal truncated to [lo, hi] by rejection (variable consumption; use
    // only inside a single sequential stream).
    double normal_truncated(double mu, double sigma, double lo, double hi);

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    uint64_t s_[4];
};

}  // namespace pairtime
