#pragma once

// Random streams.
//
// Every stochastic routine takes an explicit `rng&`. The core generator is
// xoshiro256** (Blackman & Vigna, 2018), seeded by expanding a 64-bit seed
// through four successive SplitMix64 outputs. All derived draws (bounded
// integers, unit reals, shuffles) are defined here rather than through
// <random> distributions, whose algorithms are implementation-defined, so a
// given seed yields the same stream on every platform.
//
// Replication streams:
//     seed_r = mix64(master_seed ^ (r * 0xD1B54A32D192ED03))
// where mix64 is the SplitMix64 finalizer (Stafford variant 13):
//     z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//     z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//     z =  z ^ (z >> 31)

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>

namespace rdslab {

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kStreamStride = 0xD1B54A32D192ED03ULL;
constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t replication_seed(std::uint64_t master_seed, std::uint64_t r) noexcept {
    return mix64(master_seed ^ (r * kStreamStride));
}

/// xoshiro256** engine. Models UniformRandomBitGenerator.
class rng {
public:
    using result_type = std::uint64_t;

    explicit constexpr rng(std::uint64_t seed) noexcept {
        std::uint64_t x = seed;
        for (auto& word : s_) {
            x += kGoldenGamma;
            word = mix64(x);
        }
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform integer in [0, bound). Lemire's multiply-shift with rejection; unbiased.
    std::uint64_t below(std::uint64_t bound) noexcept {
        if (bound <= 1) return 0;
        unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = static_cast<unsigned __int128>((*this)()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Uniform real in [0, 1) with 53 random bits.
    double unit() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) noexcept { return unit() < p; }

    /// Exponential with the given mean, by inversion.
    double exponential(double mean) noexcept { return -mean * std::log1p(-unit()); }

    /// Partial Fisher-Yates: afterwards items[0..k) is a uniform random
    /// k-subset of the input in uniformly random order.
    template <class T>
    void partial_shuffle(std::span<T> items, std::size_t k) noexcept {
        const std::size_t n = items.size();
        for (std::size_t i = 0; i < k && i + 1 < n; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(below(n - i));
            std::swap(items[i], items[j]);
        }
    }

    static constexpr rng for_replication(std::uint64_t master_seed, std::uint64_t r) noexcept {
        return rng(replication_seed(master_seed, r));
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> s_{};
};

}  // namespace rdslab
