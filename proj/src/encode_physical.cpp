#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "slicevis/encoders.hpp"

namespace slicevis {

Plane gaussian_blur(const Plane& in, double sigma) {
    if (!(sigma > 0.0)) return in;
    const std::size_t n = in.side();
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    double total = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double w = std::exp(-0.5 * (i * i) / (sigma * sigma));
        kernel[static_cast<std::size_t>(i + radius)] = w;
        total += w;
    }
    for (double& w : kernel) w /= total;

    const int last = static_cast<int>(n) - 1;
    auto clampi = [last](int v) { return static_cast<std::size_t>(std::clamp(v, 0, last)); };

    Plane tmp(n);
    for (std::size_t y = 0; y < n; ++y)
        for (std::size_t x = 0; x < n; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += kernel[static_cast<std::size_t>(i + radius)] *
                       in(clampi(static_cast<int>(x) + i), y);
            tmp(x, y) = acc;
        }
    Plane out(n);
    for (std::size_t y = 0; y < n; ++y)
        for (std::size_t x = 0; x < n; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += kernel[static_cast<std::size_t>(i + radius)] *
                       tmp(x, clampi(static_cast<int>(y) + i));
            out(x, y) = acc;
        }
    return out;
}

ImagePatch encode_physical(const NormalizedKpiVector& kpi, SliceType t, const PhysicalParams& p,
                           std::size_t n) {
    const double nd = static_cast<double>(n);
    const double delay = kpi[Kpi::delay];
    const double jitter = kpi[Kpi::jitter];
    const double loss = kpi[Kpi::loss];
    const double throughput = kpi[Kpi::throughput];
    const double retrans = kpi[Kpi::retrans];
    const double rssi = kpi[Kpi::rssi];

    const double sigma_delta = p.sigma_delta_gain.value_or(nd / 4.0) * (0.5 + delay);
    const double f_jitter = p.f_j_gain * jitter;
    const double centre = (nd - 1.0) / 2.0;
    const double cross = delay * jitter * loss;

    std::array<Plane, 3> planes{Plane(n), Plane(n), Plane(n)};
    for (std::size_t y = 0; y < n; ++y) {
        const double yd = static_cast<double>(y);
        const double stripe = std::sin(std::numbers::pi * p.stripe_gain * throughput * yd / nd);
        const double ramp = loss * std::pow(yd / nd, p.gamma);
        for (std::size_t x = 0; x < n; ++x) {
            const double xd = static_cast<double>(x);
            const double xc = xd - centre;
            const double yc = yd - centre;
            const double radial =
                delay * std::exp(-(xc * xc + yc * yc) / (2.0 * sigma_delta * sigma_delta));
            const double checker = static_cast<double>((x + y) % 2);

            planes[0](x, y) = radial + stripe * stripe;
            planes[1](x, y) =
                jitter * std::sin(2.0 * std::numbers::pi * f_jitter * xd / nd) + retrans * checker;
            planes[2](x, y) = ramp;
            if (x == y)
                for (auto& pl : planes) pl(x, y) += cross;
        }
    }

    // Weak signal rolls the pattern further right.
    const double shift_gain = p.shift_gain.value_or(nd / 4.0);
    const auto shift = static_cast<std::size_t>(std::floor(shift_gain * (1.0 - rssi))) % n;
    const double smooth = p.smooth_sigma[index_of(t)];
    for (auto& pl : planes) {
        Plane rolled(n);
        for (std::size_t y = 0; y < n; ++y)
            for (std::size_t x = 0; x < n; ++x) rolled((x + shift) % n, y) = pl(x, y);
        pl = gaussian_blur(rolled, smooth);
    }
    return finalize_patch(planes, "physical");
}

}  // namespace slicevis
