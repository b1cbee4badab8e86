#include "slicevis/profile.hpp"

#include <cmath>
#include <string>

#include "slicevis/error.hpp"

namespace slicevis {

const SliceProfile& ProfileTable::at(SliceType t) const {
    const auto& p = slices[index_of(t)];
    if (!p) throw ConfigError("profiles." + std::string(slice_name(t)) + ": missing profile");
    return *p;
}

ProfileTable ProfileTable::defaults() {
    // Rows are KPIs in canonical order, columns eMBB / URLLC / mIoT.
    static constexpr std::array<std::array<Moments, kNumSlices>, kNumKpis> rows{{
        {{{10.0, 1.5}, {0.5, 0.075}, {50.0, 7.5}}},
        {{{2.0, 0.3}, {0.1, 0.015}, {10.0, 1.5}}},
        {{{1.0, 0.2}, {0.001, 0.0002}, {5.0, 1.0}}},
        {{{200.0, 20.0}, {5.0, 0.5}, {0.1, 0.02}}},
        {{{2.0, 0.4}, {0.1, 0.02}, {4.0, 0.8}}},
        {{{0.5, 0.1}, {0.01, 0.002}, {2.0, 0.4}}},
        {{{-65.0, 5.0}, {-60.0, 3.0}, {-85.0, 8.0}}},
        {{{25.0, 3.0}, {30.0, 2.0}, {10.0, 4.0}}},
        {{{60.0, 10.0}, {40.0, 8.0}, {20.0, 10.0}}},
        {{{55.0, 10.0}, {35.0, 8.0}, {25.0, 10.0}}},
    }};
    ProfileTable table;
    for (auto t : kAllSlices) {
        SliceProfile p;
        for (std::size_t k = 0; k < kNumKpis; ++k) p.kpis[k] = rows[k][index_of(t)];
        table.set(t, p);
    }
    return table;
}

void validate(const ProfileTable& table) {
    for (auto t : kAllSlices) {
        const auto& slot = table.slices[index_of(t)];
        if (!slot) continue;
        for (std::size_t k = 0; k < kNumKpis; ++k) {
            const auto kpi = static_cast<Kpi>(k);
            const auto& m = slot->kpis[k];
            const auto path =
                "profiles." + std::string(slice_name(t)) + "." + std::string(kpi_name(kpi));
            if (!std::isfinite(m.mu) || !std::isfinite(m.sigma))
                throw ConfigError(path + ": values must be finite");
            if (m.sigma < 0.0) throw ConfigError(path + ": sigma must be >= 0");
            const auto d = kpi_domain(kpi);
            if (m.mu < d.lo || m.mu > d.hi)
                throw ConfigError(path + ": mu outside the KPI domain");
        }
    }
}

namespace {
void check_probability(double p, const char* path) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string(path) + ": must lie in [0, 1]");
}
}  // namespace

void validate(const NoiseConfig& n) {
    if (!(n.alpha >= 0.0 && n.alpha < 1.0)) throw ConfigError("noise.alpha: must lie in [0, 1)");
    check_probability(n.beta, "noise.beta");
    if (!(n.noise_scale >= 0.0 && std::isfinite(n.noise_scale)))
        throw ConfigError("noise.noise_scale: must be a finite value >= 0");
    check_probability(n.contamination_prob, "noise.contamination_prob");
    check_probability(n.outlier_prob, "noise.outlier_prob");
    if (!(n.weibull_shape > 0.0)) throw ConfigError("noise.weibull_shape: must be > 0");
    if (!(n.weibull_scale > 0.0)) throw ConfigError("noise.weibull_scale: must be > 0");
}

void validate(const ClassMix& mix) {
    double sum = 0.0;
    for (std::size_t i = 0; i < kNumSlices; ++i) {
        if (!(mix.p[i] >= 0.0))
            throw ConfigError("class_mix." + std::string(slice_name(static_cast<SliceType>(i))) +
                              ": must be >= 0");
        sum += mix.p[i];
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("class_mix: entries must sum to 1");
}

NormalizationBounds default_bounds(const ProfileTable& table) {
    std::array<Interval, kNumKpis> b{};
    for (std::size_t k = 0; k < kNumKpis; ++k) {
        const auto kpi = static_cast<Kpi>(k);
        const auto d = kpi_domain(kpi);
        if (kpi == Kpi::rssi || kpi == Kpi::snr) {
            b[k] = d;
            continue;
        }
        double hi = d.lo;
        for (auto t : kAllSlices) {
            const auto& m = table.at(t)[kpi];
            hi = std::max(hi, m.mu + 4.0 * m.sigma);
        }
        b[k] = {d.lo, std::min(hi, d.hi)};
    }
    return NormalizationBounds(b);
}

}  // namespace slicevis
