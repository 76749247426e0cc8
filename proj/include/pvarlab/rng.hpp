#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace pvarlab {

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// SplitMix64: counter-based 64-bit generator. The state is a plain counter
/// stepped by the golden-gamma constant and passed through an avalanching
/// finalizer, so distinct seeds give independent, reproducible streams.
class SplitMix64 {
  public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return mix64(state_ += 0x9E3779B97F4A7C15ull); }

  private:
    std::uint64_t state_;
};

/// Derive the seed of an independent substream from a base seed and up to two
/// stream indices (e.g. mesh index, path index).
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t s = mix64(seed + 0x9E3779B97F4A7C15ull * (a + 1));
    return mix64(s + 0x9E3779B97F4A7C15ull * (b + 1));
}

/// Uniform draw on the open interval (0, 1); never returns 0 or 1.
inline double uniform_open(SplitMix64& g) {
    return (static_cast<double>(g() >> 11) + 0.5) * 0x1.0p-53;
}

/// Standard exponential draw.
inline double exponential_draw(SplitMix64& g) { return -std::log(uniform_open(g)); }

} // namespace pvarlab
