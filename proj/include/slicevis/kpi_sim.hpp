#pragma once

#include "slicevis/copula.hpp"
#include "slicevis/kpi.hpp"
#include "slicevis/profile.hpp"
#include "slicevis/rng.hpp"

namespace slicevis {

/// Maps u in [0, 1) to the slice whose cumulative interval contains it.
SliceType sample_slice_type(double u, const ClassMix& mix);

/// Draws one clean vector for slice `t`:
/// contamination -> copula marginals -> (1 + U(-alpha, alpha)) variation ->
/// optional Weibull outlier -> domain clamp. The label is never changed by
/// contamination; only the profile used for sampling is.
KpiVector sample_kpi_vector(SliceType t, const ProfileTable& table, const NoiseConfig& noise,
                            const CorrelationModel& corr, Rng& rng);

/// Per entry: missing with probability beta, otherwise additive
/// N(0, noise_scale * sigma_t) followed by the domain clamp.
KpiVector apply_measurement_model(const KpiVector& k, SliceType t, const ProfileTable& table,
                                  const NoiseConfig& noise, Rng& rng);

}  // namespace slicevis
