#pragma once

#include <cstdint>

namespace pairtime::stream_tag {

// Fixed stream labels mixed into per-purpose RNG substreams so distinct
// stages never share a sequence even under the same user seed.
inline constexpr uint64_t kEmission = 0x45'4d'49'54ull;  // "EMIT"
inline constexpr uint64_t kDetect = 0x44'45'54'43ull;    // "DETC"
inline constexpr uint64_t kDark = 0x44'41'52'4bull;      // "DARK"
inline constexpr uint64_t kChain = 0x43'48'4e'53ull;     // "CHNS"
inline constexpr uint64_t kSweep = 0x53'57'50'50ull;     // "SWPP"
inline constexpr uint64_t kPreset = 0x50'52'53'54ull;    // "PRST"

}  // namespace pairtime::stream_tag
