#pragma once

#include <array>
#include <optional>

#include "slicevis/kpi.hpp"

namespace slicevis {

struct Moments {
    double mu = 0.0;
    double sigma = 0.0;
};

/// (mu, sigma) for each KPI of one slice type.
struct SliceProfile {
    std::array<Moments, kNumKpis> kpis{};

    const Moments& operator[](Kpi k) const noexcept { return kpis[index_of(k)]; }
    Moments& operator[](Kpi k) noexcept { return kpis[index_of(k)]; }
};

/// One profile per slice type. A slot left empty is a configuration error
/// when it is first needed.
struct ProfileTable {
    std::array<std::optional<SliceProfile>, kNumSlices> slices{};

    const SliceProfile& at(SliceType t) const;
    void set(SliceType t, const SliceProfile& p) { slices[index_of(t)] = p; }

    /// Table 3 values for delay, jitter, loss and throughput, plus the
    /// documented defaults for the remaining six KPIs.
    static ProfileTable defaults();
};

/// Validates sigma >= 0 and mu inside the KPI domain for every present slice.
void validate(const ProfileTable& table);

struct NoiseConfig {
    double alpha = 0.15;               ///< half-width of the multiplicative variation
    double beta = 0.05;                ///< per-entry missing probability
    double noise_scale = 0.2;          ///< measurement noise std as a fraction of sigma_t
    double contamination_prob = 0.02;  ///< chance of drawing from another slice
    double outlier_prob = 0.01;        ///< chance per vector of one Weibull outlier
    double weibull_shape = 1.5;
    double weibull_scale = 0.1;
};

void validate(const NoiseConfig& noise);

/// Class mix (eMBB, URLLC, mIoT). Must be non-negative and sum to 1.
struct ClassMix {
    std::array<double, kNumSlices> p{0.2, 0.1, 0.7};
};

void validate(const ClassMix& mix);

/// Default tilde bounds: lo is the domain minimum, hi the largest mu + 4 sigma
/// across slices. RSSI and SNR use their clamp domains.
NormalizationBounds default_bounds(const ProfileTable& table);

}  // namespace slicevis
