#include "msamp/rng.hpp"

#include <cmath>
#include <numbers>

namespace msamp {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(product >> 32);
    lo = static_cast<std::uint32_t>(product);
}

// 53-bit uniform in [0,1) from two 32-bit words.
inline double to_unit(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
    return static_cast<double>(bits) * 0x1.0p-53;
}

} // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

CounterStream::CounterStream(std::uint64_t seed, std::uint32_t stream_id)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      stream_(stream_id) {}

CounterStream::CounterStream(std::uint64_t seed, StreamPurpose purpose, std::uint32_t chain)
    : CounterStream(seed, (chain << 2) | static_cast<std::uint32_t>(purpose)) {
    if (chain >= (1u << 30)) {
        throw DataError("chain index out of range");
    }
}

std::array<std::uint32_t, 4> CounterStream::raw(std::uint64_t block,
                                                std::uint64_t counter_index) const {
    if (block > 0xFFFFFFFFull) {
        throw DataError("random stream block index exceeds 2^32");
    }
    return philox4x32({static_cast<std::uint32_t>(counter_index),
                       static_cast<std::uint32_t>(counter_index >> 32),
                       static_cast<std::uint32_t>(block), stream_},
                      key_);
}

double CounterStream::uniform(std::uint64_t block, std::uint64_t index) const {
    const auto w = raw(block, index / 2);
    return (index % 2 == 0) ? to_unit(w[0], w[1]) : to_unit(w[2], w[3]);
}

double CounterStream::normal(std::uint64_t block, std::uint64_t index) const {
    const auto w = raw(block, index / 2);
    const double u1 = 1.0 - to_unit(w[0], w[1]); // (0, 1]
    const double u2 = to_unit(w[2], w[3]);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return (index % 2 == 0) ? radius * std::cos(angle) : radius * std::sin(angle);
}

void CounterStream::fill_normal(std::uint64_t block, Eigen::Ref<Matrix> out) const {
    const Index total = out.size();
    double* data = out.data();
    const Index stride = out.outerStride();
    const Index rows = out.rows();
    for (Index flat = 0; flat < total; flat += 2) {
        const auto w = raw(block, static_cast<std::uint64_t>(flat / 2));
        const double u1 = 1.0 - to_unit(w[0], w[1]);
        const double u2 = to_unit(w[2], w[3]);
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        data[(flat / rows) * stride + flat % rows] = radius * std::cos(angle);
        if (flat + 1 < total) {
            const Index next = flat + 1;
            data[(next / rows) * stride + next % rows] = radius * std::sin(angle);
        }
    }
}

void CounterStream::fill_uniform(std::uint64_t block, Eigen::Ref<Matrix> out) const {
    const Index rows = out.rows();
    for (Index flat = 0; flat < out.size(); ++flat) {
        out(flat % rows, flat / rows) = uniform(block, static_cast<std::uint64_t>(flat));
    }
}

} // namespace msamp
