#pragma once
// Small deterministic RNG for the Monte Carlo driver.  SplitMix64: fast,
// seedable, and identical across platforms (no libstdc++ distribution
// dependence, so streams are byte-reproducible).

#include <cmath>
#include <cstdint>

namespace ultradiff {

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Exponential waiting time with the given rate; log1p keeps full precision
    // near u = 0.
    double exponential(double rate) { return -std::log1p(-uniform01()) / rate; }

private:
    std::uint64_t state_;
};

// Decorrelated per-stream seed (walker w of a base seed).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 r(seed ^ (0x632be59bd9b4e019ULL * (stream + 1)));
    r.next_u64();
    return r.next_u64();
}

}  // namespace ultradiff
