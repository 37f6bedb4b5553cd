#pragma once

#include <cstdint>

namespace streamad {

/// SplitMix64 finalizer. 64-bit avalanche mix used everywhere a stable,
/// platform-independent hash is needed (encoders, column pools).
inline uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t hash_combine(uint64_t seed, uint64_t v) {
  return mix64(seed ^ mix64(v));
}

inline uint64_t hash_combine(uint64_t seed, uint64_t a, uint64_t b) {
  return mix64(hash_combine(seed, a) ^ mix64(b + 0x517cc1b727220a95ULL));
}

/// Deterministic bounded draw from a raw 64-bit generator output.
/// std::uniform_int_distribution is implementation-defined, so tests and
/// learning must not depend on it; this modulo draw is reproducible
/// everywhere (bias is irrelevant at our bounds).
template <typename Rng>
uint64_t draw_below(Rng& rng, uint64_t bound) {
  return bound == 0 ? 0 : rng() % bound;
}

/// Uniform double in [0,1) from the top 53 bits of a 64-bit draw.
template <typename Rng>
double draw_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace streamad
