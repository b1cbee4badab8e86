#pragma once

#include <array>
#include <cstdint>

namespace slicevis {

/// Lattice permutation for gradient noise: a bijection on 0..255.
class Permutation {
public:
    /// Ken Perlin's reference table.
    Permutation() noexcept;
    /// Fisher-Yates shuffle of 0..255 driven by `seed`.
    explicit Permutation(std::uint64_t seed) noexcept;
    /// Throws ConfigError if `table` is not a bijection.
    explicit Permutation(const std::array<std::uint8_t, 256>& table);

    std::uint8_t operator[](int i) const noexcept { return p_[static_cast<std::size_t>(i & 511)]; }
    bool operator==(const Permutation&) const = default;

private:
    std::array<std::uint8_t, 512> p_{};
};

/// Classic 2-D gradient noise with unit gradients on 8 directions and the
/// quintic fade. Zero on integer lattice points, bounded by sqrt(2)/2.
double perlin2(double x, double y, const Permutation& perm) noexcept;

}  // namespace slicevis
