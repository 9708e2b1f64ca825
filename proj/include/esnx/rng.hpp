#pragma once

#include <cstdint>

#include "esnx/normal.hpp"

namespace esnx {

// splitmix64; used both as a stream-derivation hash and to seed the generator state.
inline std::uint64_t splitmix64(std::uint64_t& s) {
    s += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// xoshiro256++, deterministically seeded. All randomness in the library flows through
// this generator so results are identical across platforms and thread counts.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& w : state_) w = splitmix64(s);
    }

    // substream for (seed, index...) — order-sensitive hash chain
    static Rng stream(std::uint64_t seed, std::uint64_t i0) {
        std::uint64_t s = seed;
        std::uint64_t h = splitmix64(s) ^ (i0 + 0x9e3779b97f4a7c15ULL);
        return Rng(splitmix64(h));
    }
    static Rng stream(std::uint64_t seed, std::uint64_t i0, std::uint64_t i1) {
        std::uint64_t s = seed;
        std::uint64_t h = splitmix64(s) ^ (i0 + 0x9e3779b97f4a7c15ULL);
        h = splitmix64(h) ^ (i1 + 0x9e3779b97f4a7c15ULL);
        return Rng(splitmix64(h));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // uniform on the open interval (0,1)
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54; }

    // exact inverse-CDF standard normal draw
    double normal() { return std_normal_quantile(uniform01()); }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t state_[4];
};

}  // namespace esnx
