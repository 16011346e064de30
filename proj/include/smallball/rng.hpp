#pragma once

// Counter-based random numbers (Philox4x32-10). A draw is a pure function of
// (seed, stream, index, position), so samples can be generated in any order
// and on any number of threads with identical results.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace smallball {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

constexpr PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) noexcept {
    constexpr std::uint32_t m0 = 0xD2511F53u;
    constexpr std::uint32_t m1 = 0xCD9E8D57u;
    constexpr std::uint32_t w0 = 0x9E3779B9u;
    constexpr std::uint32_t w1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(m0) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(m1) * ctr[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += w0;
        key[1] += w1;
    }
    return ctr;
}

/// Stream ids keep independent consumers of one user seed apart.
enum class StreamId : std::uint32_t {
    ChainPaths = 1,
    SphereSamples = 2,
    WalkSamples = 3,
    Instances = 4,
};

/// Sequential view of the counter space for one (seed, stream, index) triple.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint32_t stream, std::uint64_t index) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          index_(index),
          stream_(stream) {}

    CounterRng(std::uint64_t seed, StreamId stream, std::uint64_t index) noexcept
        : CounterRng(seed, static_cast<std::uint32_t>(stream), index) {}

    std::uint32_t next_u32() noexcept {
        if (pos_ == 4) refill();
        return buffer_[pos_++];
    }

    std::uint64_t next_u64() noexcept {
        const std::uint64_t hi = next_u32();
        return (hi << 32) | next_u32();
    }

    /// Uniform on [0,1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound); bound must be positive. Lemire's method.
    std::uint64_t below(std::uint64_t bound) noexcept {
        for (;;) {
            const std::uint64_t x = next_u64();
            const unsigned __int128 m = static_cast<unsigned __int128>(x) * bound;
            const auto low = static_cast<std::uint64_t>(m);
            if (low >= bound || low >= (0 - bound) % bound) return static_cast<std::uint64_t>(m >> 64);
        }
    }

    /// Standard normal via Box-Muller (one value per call, the sine branch is dropped).
    double normal() noexcept {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    void refill() noexcept {
        buffer_ = philox4x32_10({static_cast<std::uint32_t>(index_), static_cast<std::uint32_t>(index_ >> 32), stream_,
                                 block_++},
                                key_);
        pos_ = 0;
    }

    PhiloxKey key_;
    std::uint64_t index_;
    std::uint32_t stream_;
    std::uint32_t block_ = 0;
    PhiloxCounter buffer_{};
    int pos_ = 4;
};

}  // namespace smallball
