#pragma once

// Counter-based Gaussian streams.  Every variate is a pure function of
// (master_seed, path_id, purpose, index), so ensembles are reproducible
// bit-for-bit no matter how paths are scheduled across threads, and the
// initial-data draws of a path can never collide with its Brownian
// increments (they live under different purpose tags).
//
// The generator is the 10-round Philox 4x32 block cipher; one block yields
// one N(0,1) variate through a Box-Muller transform on two 53-bit uniforms.

#include <cmath>
#include <cstdint>

namespace mra {

namespace philox {

constexpr std::uint32_t M0 = 0xD2511F53u;
constexpr std::uint32_t M1 = 0xCD9E8D57u;
constexpr std::uint32_t W0 = 0x9E3779B9u;
constexpr std::uint32_t W1 = 0xBB67AE85u;

struct Block {
    std::uint32_t v[4];
};

inline Block philox4x32_10(std::uint32_t c0, std::uint32_t c1, std::uint32_t c2, std::uint32_t c3,
                           std::uint32_t k0, std::uint32_t k1) {
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(M0) * c0;
        const std::uint64_t p1 = static_cast<std::uint64_t>(M1) * c2;
        const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
        const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
        const std::uint32_t n0 = hi1 ^ c1 ^ k0;
        const std::uint32_t n1 = lo1;
        const std::uint32_t n2 = hi0 ^ c3 ^ k1;
        const std::uint32_t n3 = lo0;
        c0 = n0; c1 = n1; c2 = n2; c3 = n3;
        k0 += W0;
        k1 += W1;
    }
    return Block{{c0, c1, c2, c3}};
}

} // namespace philox

enum class StreamPurpose : std::uint32_t {
    wiener = 0,   // Brownian increments
    initial = 1,  // initial-data draws
};

namespace detail {

// 53-bit uniform from two 32-bit lanes.
inline std::uint64_t lanes53(std::uint32_t a, std::uint32_t b) {
    return ((static_cast<std::uint64_t>(a) << 32) | b) >> 11;
}

} // namespace detail

// One standard normal per (seed, path, purpose, index).  index must stay
// below 2^56; the top byte of the last counter lane carries the purpose.
inline double counter_gauss(std::uint64_t master_seed, std::uint64_t path_id,
                            StreamPurpose purpose, std::uint64_t index) {
    const philox::Block blk = philox::philox4x32_10(
        static_cast<std::uint32_t>(path_id),
        static_cast<std::uint32_t>(path_id >> 32),
        static_cast<std::uint32_t>(index),
        static_cast<std::uint32_t>(index >> 32) | (static_cast<std::uint32_t>(purpose) << 24),
        static_cast<std::uint32_t>(master_seed),
        static_cast<std::uint32_t>(master_seed >> 32));
    const double u1 = (detail::lanes53(blk.v[0], blk.v[1]) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = detail::lanes53(blk.v[2], blk.v[3]) * 0x1.0p-53;        // [0, 1)
    const double two_pi = 6.28318530717958647692528676655900577;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

// Uniform in [0, 1) on the same keyed lattice.
inline double counter_uniform(std::uint64_t master_seed, std::uint64_t path_id,
                              StreamPurpose purpose, std::uint64_t index) {
    const philox::Block blk = philox::philox4x32_10(
        static_cast<std::uint32_t>(path_id),
        static_cast<std::uint32_t>(path_id >> 32),
        static_cast<std::uint32_t>(index),
        static_cast<std::uint32_t>(index >> 32) | (static_cast<std::uint32_t>(purpose) << 24),
        static_cast<std::uint32_t>(master_seed) ^ 0x5851F42Du,
        static_cast<std::uint32_t>(master_seed >> 32) ^ 0x4C957F2Du);
    return detail::lanes53(blk.v[0], blk.v[1]) * 0x1.0p-53;
}

// Brownian increments of one path: increment(k) ~ N(0, dt) is the step over
// [t_k, t_k + dt], addressable in any order.
struct BrownianStream {
    std::uint64_t master_seed = 0;
    std::uint64_t path_id = 0;
    double dt = 0.0;

    double increment(std::uint64_t step) const {
        return std::sqrt(dt) * counter_gauss(master_seed, path_id, StreamPurpose::wiener, step);
    }
};

} // namespace mra
