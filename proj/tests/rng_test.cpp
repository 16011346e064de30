#include "smallball/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace smallball;

TEST_CASE("philox known-answer vectors") {
    static_assert(philox4x32_10({0, 0, 0, 0}, {0, 0}) ==
                  PhiloxCounter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          PhiloxCounter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          PhiloxCounter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are pure functions of their coordinates") {
    CounterRng a(42, StreamId::ChainPaths, 17);
    CounterRng b(42, StreamId::ChainPaths, 17);
    CounterRng c(42, StreamId::SphereSamples, 17);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next_u32();
        CHECK(x == b.next_u32());
        differs |= x != c.next_u32();
    }
    CHECK(differs);
}

TEST_CASE("uniform, below and normal have the right moments") {
    CounterRng rng(1, StreamId::Instances, 0);
    const int count = 200000;
    double sum = 0.0, sum2 = 0.0, nsum = 0.0, nsum2 = 0.0;
    int hist[7] = {};
    for (int i = 0; i < count; ++i) {
        const double u = rng.uniform();
        CHECK_UNARY(u >= 0.0);
        CHECK_UNARY(u < 1.0);
        sum += u;
        sum2 += u * u;
        ++hist[rng.below(7)];
        const double g = rng.normal();
        nsum += g;
        nsum2 += g * g;
    }
    CHECK(std::abs(sum / count - 0.5) < 0.005);
    CHECK(std::abs(sum2 / count - 1.0 / 3.0) < 0.005);
    for (int h : hist) CHECK(std::abs(h / static_cast<double>(count) - 1.0 / 7.0) < 0.005);
    CHECK(std::abs(nsum / count) < 0.01);
    CHECK(std::abs(nsum2 / count - 1.0) < 0.02);
}
