#pragma once

#include <cstdint>

namespace hysterobeam {

/// SplitMix64 (Steele, Lea & Flood, 2014). This is the single PRNG used for
/// every random draw in the project. The algorithm is small enough to restate
/// completely, so a reimplementation in any language reproduces the identical
/// stream from the same seed:
///
///   state += 0x9E3779B97F4A7C15
///   z = state
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   output = z ^ (z >> 31)
///
/// uniform01() takes the top 53 bits of the output and scales by 2^-53.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform in [-1, 1).
    double uniform_sym() { return 2.0 * uniform01() - 1.0; }

private:
    std::uint64_t state_;
};

}  // namespace hysterobeam
