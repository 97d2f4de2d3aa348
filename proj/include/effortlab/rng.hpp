#pragma once

#include <cstdint>

namespace effortlab {

/// Deterministic 64-bit generator (splitmix64).
///
/// Constants are the published splitmix64 ones: increment
/// 0x9E3779B97F4A7C15, mixers 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB.
/// The same seed produces the same stream on every platform, which is what
/// makes weight initialisation bitwise reproducible.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53 bits of precision.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [-0.5, 0.5).
    double next_weight() { return next_unit() - 0.5; }

private:
    std::uint64_t state_;
};

} // namespace effortlab
