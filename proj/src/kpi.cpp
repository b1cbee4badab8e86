#include "slicevis/kpi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "slicevis/error.hpp"

namespace slicevis {

namespace {

constexpr std::array<std::string_view, kNumKpis> kKpiNames{
    "delay_ms", "jitter_ms", "loss_pct", "throughput_mbps", "retrans_pct",
    "discard_pct", "rssi_dbm", "snr_db", "cpu_pct", "mem_pct"};

constexpr std::array<std::string_view, kNumSlices> kSliceNames{"eMBB", "URLLC", "mIoT"};

constexpr double kInf = std::numeric_limits<double>::infinity();

constexpr std::array<Interval, kNumKpis> kDomains{{
    {0.0, kInf},      // delay
    {0.0, kInf},      // jitter
    {0.0, 100.0},     // loss
    {0.0, kInf},      // throughput
    {0.0, 100.0},     // retrans
    {0.0, 100.0},     // discard
    {-120.0, -20.0},  // rssi
    {-10.0, 50.0},    // snr
    {0.0, 100.0},     // cpu
    {0.0, 100.0},     // mem
}};

}  // namespace

std::string_view slice_name(SliceType t) noexcept { return kSliceNames[index_of(t)]; }

std::optional<SliceType> slice_from_name(std::string_view name) noexcept {
    for (auto t : kAllSlices)
        if (slice_name(t) == name) return t;
    return std::nullopt;
}

std::optional<SliceType> slice_from_code(int code) noexcept {
    if (code < 0 || code >= static_cast<int>(kNumSlices)) return std::nullopt;
    return static_cast<SliceType>(code);
}

std::string_view kpi_name(Kpi k) noexcept { return kKpiNames[index_of(k)]; }

std::optional<Kpi> kpi_from_name(std::string_view name) noexcept {
    for (std::size_t i = 0; i < kNumKpis; ++i)
        if (kKpiNames[i] == name) return static_cast<Kpi>(i);
    return std::nullopt;
}

Interval kpi_domain(Kpi k) noexcept { return kDomains[index_of(k)]; }

std::size_t KpiVector::missing_count() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(values.begin(), values.end(), [](const auto& v) { return !v; }));
}

void clamp_to_domain(KpiVector& k) noexcept {
    for (std::size_t i = 0; i < kNumKpis; ++i) {
        if (!k.values[i]) continue;
        const auto d = kDomains[i];
        k.values[i] = std::clamp(*k.values[i], d.lo, d.hi);
    }
}

NormalizationBounds::NormalizationBounds(const std::array<Interval, kNumKpis>& bounds)
    : bounds_(bounds) {
    for (std::size_t i = 0; i < kNumKpis; ++i) {
        const auto& b = bounds_[i];
        if (!std::isfinite(b.lo) || !std::isfinite(b.hi) || !(b.hi > b.lo))
            throw ConfigError("normalization." + std::string(kKpiNames[i]) +
                              ": bounds must be finite with hi > lo");
    }
}

NormalizedKpiVector normalize(const KpiVector& k, const NormalizationBounds& bounds) noexcept {
    NormalizedKpiVector out;
    for (std::size_t i = 0; i < kNumKpis; ++i) {
        if (!k.values[i]) {
            out.values[i] = 0.0;
            out.missing.set(i);
            continue;
        }
        const auto& b = bounds.all()[i];
        out.values[i] = std::clamp((*k.values[i] - b.lo) / (b.hi - b.lo), 0.0, 1.0);
    }
    return out;
}

}  // namespace slicevis
