#pragma once

#include <cstdint>
#include <random>

namespace tiltbound {

// splitmix64 step; used to derive well-separated per-block seeds from (seed, block).
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Sampling is organized in fixed-size blocks, each with its own engine seeded from
// (seed, block index). Draw i therefore never depends on how many threads produced
// the buffer, which is what makes outputs byte-identical across thread counts.
constexpr std::size_t kSampleBlock = 65536;

class BlockRng {
public:
    BlockRng(std::uint64_t seed, std::uint64_t block)
        : engine_(mix64(mix64(seed) ^ mix64(block + 0x51ed270b0a1cd21aULL))) {}

    // Uniform in [0, 1) with 53 random bits; open at 1, and never exactly 0 is not
    // guaranteed, so call uniform_pos() where a log is taken.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform in (0, 1]; safe under log().
    double uniform_pos() { return 1.0 - uniform(); }

    std::uint64_t bits() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace tiltbound
