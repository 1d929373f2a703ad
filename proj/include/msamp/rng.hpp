#ifndef MSAMP_RNG_HPP
#define MSAMP_RNG_HPP

#include <array>
#include <cstdint>

#include "msamp/common.hpp"

namespace msamp {

/**
 * Philox4x32-10 block function (Salmon et al., SC'11).
 *
 * Maps a 128-bit counter and a 64-bit key to 128 pseudo-random bits.
 * Stateless, so any element of a stream can be computed independently.
 */
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Stream identifiers, so draws for different purposes never overlap.
enum class StreamPurpose : std::uint32_t {
    Wiener = 0,
    InitialVelocity = 1,
    Synthetic = 2,
    Test = 3,
};

/**
 * Reproducible random stream keyed by (seed, stream id).
 *
 * Variates are addressed by (block, index): block is typically the
 * integration step and index the flattened matrix entry.  The same address
 * always yields the same value, independent of call order or thread count.
 */
class CounterStream {
public:
    CounterStream(std::uint64_t seed, std::uint32_t stream_id);
    CounterStream(std::uint64_t seed, StreamPurpose purpose, std::uint32_t chain = 0);

    /// Uniform in [0, 1).
    double uniform(std::uint64_t block, std::uint64_t index) const;

    /// Standard normal (Box-Muller on two 53-bit uniforms).
    double normal(std::uint64_t block, std::uint64_t index) const;

    /// Fill with independent N(0,1) draws, column-major entry order.
    void fill_normal(std::uint64_t block, Eigen::Ref<Matrix> out) const;
    void fill_uniform(std::uint64_t block, Eigen::Ref<Matrix> out) const;

private:
    std::array<std::uint32_t, 4> raw(std::uint64_t block, std::uint64_t counter_index) const;

    std::array<std::uint32_t, 2> key_;
    std::uint32_t stream_;
};

} // namespace msamp

#endif
