#include <cmath>
#include <numbers>

#include "slicevis/encoders.hpp"

namespace slicevis {

namespace {
// Bound of perlin2 with unit gradients; maps the octave average onto [0, 1].
constexpr double kNoiseBound = std::numbers::sqrt2 / 2.0;
}  // namespace

PerlinSettings perlin_settings(const NormalizedKpiVector& kpi, const PerlinParams& p) noexcept {
    PerlinSettings s;
    s.frequency[0] = p.base_frequency[0] * (1.0 + kpi[Kpi::delay] + kpi[Kpi::jitter]);
    s.frequency[1] = p.base_frequency[1] * (1.0 + kpi[Kpi::throughput]);
    s.frequency[2] = p.base_frequency[2] * (1.0 + kpi[Kpi::loss]);
    s.octaves = p.octave_base + static_cast<int>(std::floor(p.octave_gain * kpi[Kpi::throughput]));
    s.persistence = p.persistence_base + kpi[Kpi::snr];
    return s;
}

ImagePatch encode_perlin(const NormalizedKpiVector& kpi, const PerlinParams& p, std::size_t n) {
    const auto s = perlin_settings(kpi, p);
    const double nd = static_cast<double>(n);

    double amplitude_sum = 0.0;
    for (int o = 1; o <= s.octaves; ++o) amplitude_sum += std::pow(s.persistence, -o);

    ImagePatch patch(n);
    for (std::size_t c = 0; c < 3; ++c) {
        const double f = s.frequency[c];
        for (std::size_t y = 0; y < n; ++y)
            for (std::size_t x = 0; x < n; ++x) {
                double total = 0.0;
                double lacunarity = 1.0;
                for (int o = 1; o <= s.octaves; ++o) {
                    const double u = f * static_cast<double>(x) / nd * lacunarity;
                    const double v = f * static_cast<double>(y) / nd * lacunarity;
                    total += perlin2(u, v, p.permutation) / std::pow(s.persistence, o);
                    lacunarity *= 2.0;
                }
                const double mean = total / amplitude_sum;
                patch.at(x, y, c) = 0.5 * (mean / kNoiseBound + 1.0);
            }
    }
    return finalize_patch(std::move(patch), "perlin");
}

}  // namespace slicevis
