#include <doctest.h>

#include <cmath>

#include "msamp/rng.hpp"

using namespace msamp;

TEST_CASE("philox4x32-10 known-answer vectors") {
    using A = std::array<std::uint32_t, 4>;
    CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          A{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          A{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("stream values depend only on their address") {
    const CounterStream stream(42, StreamPurpose::Wiener, 3);
    Matrix a(5, 7), b(5, 7);
    stream.fill_normal(11, a);
    stream.fill_normal(11, b);
    CHECK(a == b);
    CHECK(stream.normal(11, 9) == a(9 % 5, 9 / 5));
    CHECK(stream.normal(11, 10) == a(0, 2));

    stream.fill_normal(12, b);
    CHECK(a != b);
    const CounterStream other_chain(42, StreamPurpose::Wiener, 4);
    other_chain.fill_normal(11, b);
    CHECK(a != b);
    const CounterStream other_seed(43, StreamPurpose::Wiener, 3);
    other_seed.fill_normal(11, b);
    CHECK(a != b);
}

TEST_CASE("uniform and normal draws have the right low moments") {
    const CounterStream stream(7, StreamPurpose::Test);
    Matrix u(1, 200000), z(1, 200000);
    stream.fill_uniform(0, u);
    stream.fill_normal(1, z);
    CHECK(u.minCoeff() >= 0.0);
    CHECK(u.maxCoeff() < 1.0);
    // 5 standard errors
    CHECK(std::abs(u.mean() - 0.5) < 5 * std::sqrt(1.0 / 12 / 200000));
    const double mean = z.mean();
    const double var = (z.array() - mean).square().sum() / (z.size() - 1);
    CHECK(std::abs(mean) < 5 * std::sqrt(1.0 / 200000));
    CHECK(std::abs(var - 1.0) < 5 * std::sqrt(2.0 / 200000));
    const double kurt = (z.array() - mean).pow(4).mean() / (var * var);
    CHECK(std::abs(kurt - 3.0) < 0.1);
}

TEST_CASE("block index beyond 32 bits is rejected") {
    const CounterStream stream(1, StreamPurpose::Test);
    CHECK_THROWS_AS(stream.uniform(1ull << 32, 0), DataError);
}
