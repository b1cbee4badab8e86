#pragma once

#include <array>
#include <cstdint>

namespace slicevis {

/// Independent random streams carved out of one master seed. Each consumer
/// draws from its own stream so adding draws to one never shifts another.
enum class Stream : std::uint64_t {
    kpi = 1,
    fractal = 2,
    shuffle = 3,
    perlin_permutation = 4,
    split = 5,
};

inline constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// xoshiro256** keyed by (seed, stream, index). The key is hashed through
/// splitmix64 so neighbouring indices give uncorrelated generators; this is
/// what lets samples be produced on any worker in any order.
class Rng {
public:
    Rng(std::uint64_t seed, Stream stream, std::uint64_t index = 0) noexcept {
        std::uint64_t key = seed;
        std::uint64_t h = splitmix64(key);
        key = h ^ (static_cast<std::uint64_t>(stream) * 0xD1B54A32D192ED03ULL);
        h = splitmix64(key);
        key = h ^ (index * 0xA24BAED4963EE407ULL + 0x632BE59BD9B4E019ULL);
        for (auto& s : state_) s = splitmix64(key);
    }

    std::uint64_t next() noexcept {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform on the open interval (0, 1).
    double uniform_open() noexcept {
        return (static_cast<double>(next() >> 12) + 0.5) * 0x1.0p-52;
    }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller (one variate per call, nothing cached).
    double normal() noexcept;

    /// Uniform integer in [0, bound) by rejection.
    std::uint64_t below(std::uint64_t bound) noexcept;

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }
    std::array<std::uint64_t, 4> state_{};
};

}  // namespace slicevis
