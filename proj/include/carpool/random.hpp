#ifndef CARPOOL_RANDOM_HPP
#define CARPOOL_RANDOM_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace carpool {

/// SplitMix64 (Steele, Lea & Flood). Used for seeding and stream derivation.
class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    constexpr std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

/// xoshiro256** 1.0 (Blackman & Vigna), state filled from SplitMix64.
///
/// All distributions below are written out by hand instead of going through
/// <random> distributions, whose algorithms are implementation-defined; this
/// keeps every draw bit-identical across standard libraries.
class Xoshiro256 {
public:
    using result_type = std::uint64_t;

    explicit constexpr Xoshiro256(std::uint64_t seed) noexcept {
        SplitMix64 sm(seed);
        for (auto& word : s_) {
            word = sm.next();
        }
    }

    /// Independent stream `index` of a base seed. Streams are what make the
    /// serial and OpenMP kernels produce the same numbers: each work item owns
    /// one, regardless of which thread runs it.
    static constexpr Xoshiro256 stream(std::uint64_t seed, std::uint64_t index) noexcept {
        SplitMix64 mix(seed ^ (0xD1B54A32D192ED03ULL * (index + 1)));
        mix.next();
        return Xoshiro256(mix.next());
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

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

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform on {0, ..., n-1}, unbiased (Lemire's multiply-and-reject).
    std::uint64_t uniform_below(std::uint64_t n) noexcept {
        unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * n;
        auto low = static_cast<std::uint64_t>(m);
        if (low < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (low < threshold) {
                m = static_cast<unsigned __int128>((*this)()) * n;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Exponential with the given rate (inverse-CDF).
    double exponential(double rate) noexcept { return -std::log1p(-uniform01()) / rate; }

    /// Two independent standard normals (Box-Muller).
    std::pair<double, double> normal_pair() noexcept {
        const double u1 = 1.0 - uniform01();  // (0, 1]
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(theta), r * std::sin(theta)};
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

    std::array<std::uint64_t, 4> s_{};
};

}  // namespace carpool

#endif  // CARPOOL_RANDOM_HPP
