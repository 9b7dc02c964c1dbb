// rng.hpp
// Deterministic counter-based randomness: every draw is addressed by
// (seed, counter), so parallel consumers reproduce the serial stream.

#pragma once

#include <cstdint>

namespace synqkd {

// SplitMix64 finalizer (Stafford mix13).
constexpr std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

inline constexpr std::uint64_t golden_gamma = 0x9e3779b97f4a7c15ULL;

// Random access into the SplitMix64 output stream of `seed`.
constexpr std::uint64_t stream_at(std::uint64_t seed, std::uint64_t counter) {
    return mix64(seed + (counter + 1) * golden_gamma);
}

// 53-bit mantissa double in [0, 1).
constexpr double unit_double(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Sequential generator for consumers that do not need random access.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += golden_gamma;
        return mix64(state_);
    }

    double next_double() { return unit_double(next()); }

    // Unbiased-enough integer in [0, n) via 128-bit multiply.
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  private:
    std::uint64_t state_;
};

}  // namespace synqkd
