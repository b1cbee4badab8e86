#include "slicevis/perlin.hpp"

#include <cmath>
#include <numeric>

#include "slicevis/error.hpp"
#include "slicevis/rng.hpp"

namespace slicevis {

namespace {

constexpr std::array<std::uint8_t, 256> kReference{
    151, 160, 137, 91,  90,  15,  131, 13,  201, 95,  96,  53,  194, 233, 7,   225, 140, 36,
    103, 30,  69,  142, 8,   99,  37,  240, 21,  10,  23,  190, 6,   148, 247, 120, 234, 75,
    0,   26,  197, 62,  94,  252, 219, 203, 117, 35,  11,  32,  57,  177, 33,  88,  237, 149,
    56,  87,  174, 20,  125, 136, 171, 168, 68,  175, 74,  165, 71,  134, 139, 48,  27,  166,
    77,  146, 158, 231, 83,  111, 229, 122, 60,  211, 133, 230, 220, 105, 92,  41,  55,  46,
    245, 40,  244, 102, 143, 54,  65,  25,  63,  161, 1,   216, 80,  73,  209, 76,  132, 187,
    208, 89,  18,  169, 200, 196, 135, 130, 116, 188, 159, 86,  164, 100, 109, 198, 173, 186,
    3,   64,  52,  217, 226, 250, 124, 123, 5,   202, 38,  147, 118, 126, 255, 82,  85,  212,
    207, 206, 59,  227, 47,  16,  58,  17,  182, 189, 28,  42,  223, 183, 170, 213, 119, 248,
    152, 2,   44,  154, 163, 70,  221, 153, 101, 155, 167, 43,  172, 9,   129, 22,  39,  253,
    19,  98,  108, 110, 79,  113, 224, 232, 178, 185, 112, 104, 218, 246, 97,  228, 251, 34,
    242, 193, 238, 210, 144, 12,  191, 179, 162, 241, 81,  51,  145, 235, 249, 14,  239, 107,
    49,  192, 214, 31,  181, 199, 106, 157, 184, 84,  204, 176, 115, 121, 50,  45,  127, 4,
    150, 254, 138, 236, 205, 93,  222, 114, 67,  29,  24,  72,  243, 141, 128, 195, 78,  66,
    215, 61,  156, 180};

constexpr double kDiag = 0.70710678118654752440;

// Unit gradients at multiples of 45 degrees.
constexpr std::array<std::array<double, 2>, 8> kGradients{{
    {1.0, 0.0},
    {kDiag, kDiag},
    {0.0, 1.0},
    {-kDiag, kDiag},
    {-1.0, 0.0},
    {-kDiag, -kDiag},
    {0.0, -1.0},
    {kDiag, -kDiag},
}};

constexpr double fade(double t) noexcept { return t * t * t * (t * (t * 6.0 - 15.0) + 10.0); }
constexpr double lerp(double t, double a, double b) noexcept { return a + t * (b - a); }

double grad(std::uint8_t hash, double x, double y) noexcept {
    const auto& g = kGradients[hash & 7];
    return g[0] * x + g[1] * y;
}

}  // namespace

Permutation::Permutation() noexcept {
    for (std::size_t i = 0; i < 512; ++i) p_[i] = kReference[i & 255];
}

Permutation::Permutation(std::uint64_t seed) noexcept {
    std::array<std::uint8_t, 256> t{};
    std::iota(t.begin(), t.end(), std::uint8_t{0});
    Rng rng(seed, Stream::perlin_permutation);
    for (std::size_t i = t.size() - 1; i > 0; --i) std::swap(t[i], t[rng.below(i + 1)]);
    for (std::size_t i = 0; i < 512; ++i) p_[i] = t[i & 255];
}

Permutation::Permutation(const std::array<std::uint8_t, 256>& table) {
    std::array<bool, 256> seen{};
    for (auto v : table) {
        if (seen[v]) throw ConfigError("perlin.permutation: table is not a bijection on 0..255");
        seen[v] = true;
    }
    for (std::size_t i = 0; i < 512; ++i) p_[i] = table[i & 255];
}

double perlin2(double x, double y, const Permutation& perm) noexcept {
    const double fx = std::floor(x);
    const double fy = std::floor(y);
    const int xi = static_cast<int>(static_cast<long long>(fx) & 255);
    const int yi = static_cast<int>(static_cast<long long>(fy) & 255);
    const double dx = x - fx;
    const double dy = y - fy;
    const double u = fade(dx);
    const double v = fade(dy);

    const int a = perm[xi] + yi;
    const int b = perm[xi + 1] + yi;
    const double n00 = grad(perm[a], dx, dy);
    const double n10 = grad(perm[b], dx - 1.0, dy);
    const double n01 = grad(perm[a + 1], dx, dy - 1.0);
    const double n11 = grad(perm[b + 1], dx - 1.0, dy - 1.0);
    return lerp(v, lerp(u, n00, n10), lerp(u, n01, n11));
}

}  // namespace slicevis
