#pragma once

#include <cstdint>

namespace tolldag {

/// Counter-based generator: every draw is a pure function of
/// (seed, stream, counter), built from chained SplitMix64 finalisers.
/// Simulations use stream = CoDAG node and counter = step, so the noise
/// schedule does not depend on any other simulation parameter.
class CounterRng {
public:
    explicit constexpr CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}

    constexpr std::uint64_t seed() const noexcept { return seed_; }

    constexpr std::uint64_t bits(std::uint64_t stream, std::uint64_t counter) const noexcept {
        return mix(mix(mix(seed_) ^ stream) ^ counter);
    }

    /// Uniform on [0, 1) with 53 random bits.
    constexpr double uniform01(std::uint64_t stream, std::uint64_t counter) const noexcept {
        return static_cast<double>(bits(stream, counter) >> 11) * 0x1.0p-53;
    }

    constexpr double uniform(double lo, double hi, std::uint64_t stream,
                             std::uint64_t counter) const noexcept {
        return lo + (hi - lo) * uniform01(stream, counter);
    }

private:
    static constexpr std::uint64_t mix(std::uint64_t x) noexcept {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::uint64_t seed_;
};

}  // namespace tolldag
