#pragma once

// Counter-based generator used for every random draw in the library.
//
// Algorithm "splitmix64-ctr/1":
//   output(key, i) = mix64(key + (i + 1) * 0x9E3779B97F4A7C15), i = 0, 1, ...
//   mix64(z): z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//             z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//             return z ^ (z >> 31)
// This is exactly the SplitMix64 stream seeded with `key`, so any
// implementation of SplitMix64 reproduces it bit for bit.
//
// Integer-to-index mappings:
//   uniform01()  = (x >> 11) * 2^-53            in [0, 1)
//   bounded(b)   = floor(x * b / 2^64)          in [0, b)
//
// Substreams: derive_seed(seed, j) = mix64(seed ^ mix64(j + 0x5851F42D4C957F2D)).

#include <cstdint>
#include <limits>

namespace randset {

inline constexpr const char* rng_name = "splitmix64-ctr/1";

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    return mix64(seed ^ mix64(stream + 0x5851F42D4C957F2DULL));
}

class CounterRng {
public:
    using result_type = std::uint64_t;

    constexpr explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept {
        return std::numeric_limits<result_type>::max();
    }

    constexpr result_type operator()() noexcept {
        ++counter_;
        return mix64(key_ + counter_ * 0x9E3779B97F4A7C15ULL);
    }

    constexpr double uniform01() noexcept {
        return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
    }

    /// Index in [0, bound). bound must be positive.
    constexpr std::uint64_t bounded(std::uint64_t bound) noexcept {
        const unsigned __int128 product =
            static_cast<unsigned __int128>((*this)()) * bound;
        return static_cast<std::uint64_t>(product >> 64);
    }

    constexpr std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace randset
