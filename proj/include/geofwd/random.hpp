#pragma once

#include <cstdint>
#include <limits>

namespace geofwd {

/// Finalizer of SplitMix64; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Counter-based sub-seed: the stream for `index` depends only on (seed, index),
/// never on how work is split across threads.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return mix64(seed ^ mix64(index + 0x9E3779B97F4A7C15ULL));
}

/// SplitMix64 stream. Satisfies UniformRandomBitGenerator so it can drive
/// the standard distributions.
class Stream {
public:
    using result_type = std::uint64_t;

    constexpr explicit Stream(std::uint64_t seed) noexcept : state_(seed) {}
    constexpr Stream(std::uint64_t seed, std::uint64_t index) noexcept
        : state_(derive_seed(seed, index)) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix64(state_);
    }

    /// Uniform on [0, 1) with 53 random bits.
    constexpr double uniform() noexcept {
        return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
    }

    Stream split(std::uint64_t index) noexcept { return Stream((*this)(), index); }

private:
    std::uint64_t state_;
};

} // namespace geofwd
