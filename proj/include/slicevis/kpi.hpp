#pragma once

#include <array>
#include <bitset>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace slicevis {

/// Slice label. The integer codes are the on-disk labels and never change.
enum class SliceType : std::uint8_t { eMBB = 0, URLLC = 1, mIoT = 2 };

inline constexpr std::size_t kNumSlices = 3;
inline constexpr std::array<SliceType, kNumSlices> kAllSlices{SliceType::eMBB, SliceType::URLLC,
                                                              SliceType::mIoT};

constexpr std::size_t index_of(SliceType t) noexcept { return static_cast<std::size_t>(t); }
std::string_view slice_name(SliceType t) noexcept;
std::optional<SliceType> slice_from_name(std::string_view name) noexcept;
std::optional<SliceType> slice_from_code(int code) noexcept;

/// The ten KPIs in canonical column order.
enum class Kpi : std::uint8_t {
    delay = 0,
    jitter,
    loss,
    throughput,
    retrans,
    discard,
    rssi,
    snr,
    cpu,
    mem,
};

inline constexpr std::size_t kNumKpis = 10;

constexpr std::size_t index_of(Kpi k) noexcept { return static_cast<std::size_t>(k); }

/// Column name, e.g. "delay_ms".
std::string_view kpi_name(Kpi k) noexcept;
std::optional<Kpi> kpi_from_name(std::string_view name) noexcept;

struct Interval {
    double lo;
    double hi;
};

/// Physical range every KPI is clamped into after sampling and after noise.
Interval kpi_domain(Kpi k) noexcept;

/// Raw metrics in physical units. An empty optional is a missing reading.
struct KpiVector {
    std::array<std::optional<double>, kNumKpis> values{};

    std::optional<double>& operator[](Kpi k) noexcept { return values[index_of(k)]; }
    const std::optional<double>& operator[](Kpi k) const noexcept { return values[index_of(k)]; }

    std::size_t missing_count() const noexcept;
    bool operator==(const KpiVector&) const = default;
};

/// Clamp every present value into its domain.
void clamp_to_domain(KpiVector& k) noexcept;

/// KPIs mapped to [0, 1]. Missing entries hold exactly 0 and have their mask
/// bit set.
struct NormalizedKpiVector {
    std::array<double, kNumKpis> values{};
    std::bitset<kNumKpis> missing{};

    double operator[](Kpi k) const noexcept { return values[index_of(k)]; }
    double& operator[](Kpi k) noexcept { return values[index_of(k)]; }
    bool operator==(const NormalizedKpiVector&) const = default;
};

/// Per-KPI affine normalization range. Construction checks hi > lo.
class NormalizationBounds {
public:
    explicit NormalizationBounds(const std::array<Interval, kNumKpis>& bounds);

    const Interval& operator[](Kpi k) const noexcept { return bounds_[index_of(k)]; }
    const std::array<Interval, kNumKpis>& all() const noexcept { return bounds_; }

private:
    std::array<Interval, kNumKpis> bounds_;
};

NormalizedKpiVector normalize(const KpiVector& k, const NormalizationBounds& bounds) noexcept;

}  // namespace slicevis
