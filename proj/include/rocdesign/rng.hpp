#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "rocdesign/normal.hpp"

namespace rocdesign {

/// SplitMix64 mixing step; used to derive independent stream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Counter-based stream derivation: stream (master, index) is independent of
/// any other index, so replications can be farmed out to workers in any order
/// without sharing generator state.
inline std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t s = master ^ (0xD1B54A32D192ED03ULL * (index + 1));
    std::uint64_t out = splitmix64(s);
    out ^= splitmix64(s) << 1;
    return out;
}

/// Deterministic random stream. All variates are produced by inverse-CDF
/// transforms of 53-bit uniforms from mt19937_64, so a (master seed, index)
/// pair yields bit-identical draws on every platform.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) {
        std::uint64_t s = seed;
        const std::uint32_t init[8] = {
            static_cast<std::uint32_t>(splitmix64(s)), static_cast<std::uint32_t>(s >> 32),
            static_cast<std::uint32_t>(splitmix64(s)), static_cast<std::uint32_t>(s >> 32),
            static_cast<std::uint32_t>(splitmix64(s)), static_cast<std::uint32_t>(s >> 32),
            static_cast<std::uint32_t>(splitmix64(s)), static_cast<std::uint32_t>(s >> 32)};
        std::seed_seq seq(init, init + 8);
        engine_.seed(seq);
    }

    static RandomStream for_replication(std::uint64_t master, std::uint64_t index) {
        return RandomStream(derive_stream_seed(master, index));
    }

    /// Uniform on (0,1); never returns an exact 0 or 1.
    double uniform() {
        const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        return u > 0.0 ? u : 0x1.0p-53;
    }

    double normal() { return normal_quantile(uniform()); }

    double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

private:
    std::mt19937_64 engine_;
};

} // namespace rocdesign
