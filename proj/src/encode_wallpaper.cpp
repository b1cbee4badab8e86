#include <cmath>
#include <numbers>

#include "slicevis/encoders.hpp"

namespace slicevis {

WallpaperPeriods wallpaper_periods(const NormalizedKpiVector& kpi, const WallpaperParams& p,
                                   std::size_t n) noexcept {
    const double p3 = p.period_3.value_or(static_cast<double>(n) / 2.0);
    return {
        .p1x = 2.0 + std::floor(5.0 * kpi[Kpi::delay]),
        .p1y = p.period_1y,
        .p2x = p.period_2x,
        .p2y = 3.0 + std::floor(7.0 * kpi[Kpi::throughput]),
        .p3x = p3,
        .p3y = p3,
    };
}

double wallpaper_phi1(double u, double v) noexcept {
    const double stair = std::fmod(std::floor(u + v), 2.0);
    return std::sin(2.0 * std::numbers::pi * u) + (stair < 0.0 ? stair + 2.0 : stair);
}

double wallpaper_phi2(double u, double v) noexcept {
    auto rect = [](double z) { return z - std::floor(z) < 0.5 ? 1.0 : 0.0; };
    return rect(u) * rect(v);
}

double wallpaper_phi3(double u, double v) noexcept { return std::exp(-(u * u + v * v)); }

ImagePatch encode_wallpaper(const NormalizedKpiVector& kpi, const WallpaperParams& p,
                            std::size_t n) {
    const auto per = wallpaper_periods(kpi, p, n);
    const double nd = static_cast<double>(n);
    const double centre = (nd - 1.0) / 2.0;
    // Strong signal widens the coverage blob.
    const double coverage = 1.0 - kpi[Kpi::rssi] + 0.1;
    const double resource = 0.5 * (kpi[Kpi::cpu] + kpi[Kpi::mem]);

    ImagePatch patch(n);
    for (std::size_t y = 0; y < n; ++y)
        for (std::size_t x = 0; x < n; ++x) {
            const double xd = static_cast<double>(x);
            const double yd = static_cast<double>(y);
            const std::array<double, 3> basis{
                wallpaper_phi1(xd / per.p1x, yd / per.p1y),
                wallpaper_phi2(xd / per.p2x, yd / per.p2y),
                wallpaper_phi3((xd - centre) / per.p3x * coverage,
                               (yd - centre) / per.p3y * coverage),
            };
            const double gradient = 1.0 + p.resource_gain * resource * (xd + yd) / (2.0 * nd);
            for (std::size_t c = 0; c < 3; ++c) {
                double v = 0.0;
                for (std::size_t k = 0; k < 3; ++k) v += p.weights[c][k] * basis[k];
                patch.at(x, y, c) = v * gradient;
            }
        }
    return finalize_patch(std::move(patch), "wallpaper");
}

}  // namespace slicevis
