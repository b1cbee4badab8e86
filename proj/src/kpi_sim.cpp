#include "slicevis/kpi_sim.hpp"

#include <cmath>

namespace slicevis {

SliceType sample_slice_type(double u, const ClassMix& mix) {
    validate(mix);
    double upper = 0.0;
    for (std::size_t i = 0; i + 1 < kNumSlices; ++i) {
        upper += mix.p[i];
        if (u < upper) return static_cast<SliceType>(i);
    }
    return static_cast<SliceType>(kNumSlices - 1);
}

KpiVector sample_kpi_vector(SliceType t, const ProfileTable& table, const NoiseConfig& noise,
                            const CorrelationModel& corr, Rng& rng) {
    // Every branch draws the same number of variates so the stream position
    // after this call does not depend on which effects fired.
    const double contamination_u = rng.uniform();
    const auto other_pick = rng.below(kNumSlices - 1);
    SliceType source = t;
    if (contamination_u < noise.contamination_prob) {
        const auto shifted = (index_of(t) + 1 + other_pick) % kNumSlices;
        source = static_cast<SliceType>(shifted);
    }
    const SliceProfile& profile = table.at(source);
    table.at(t);  // the true slice must exist even when contaminated

    const auto u = gaussian_copula_sample(corr, rng);

    KpiVector out;
    for (std::size_t k = 0; k < kNumKpis; ++k) {
        const auto& m = profile.kpis[k];
        double x = m.mu + m.sigma * normal_quantile(u[k]);
        x *= 1.0 + rng.uniform(-noise.alpha, noise.alpha);
        out.values[k] = x;
    }

    const double outlier_u = rng.uniform();
    const auto outlier_kpi = rng.below(kNumKpis);
    const double weibull_u = rng.uniform_open();
    if (outlier_u < noise.outlier_prob) {
        const double w =
            noise.weibull_scale * std::pow(-std::log(weibull_u), 1.0 / noise.weibull_shape);
        *out.values[outlier_kpi] *= 1.0 + w;
    }

    clamp_to_domain(out);
    return out;
}

KpiVector apply_measurement_model(const KpiVector& k, SliceType t, const ProfileTable& table,
                                  const NoiseConfig& noise, Rng& rng) {
    const SliceProfile& profile = table.at(t);
    KpiVector out = k;
    for (std::size_t i = 0; i < kNumKpis; ++i) {
        const double missing_u = rng.uniform();
        const double eps = rng.normal();
        if (missing_u < noise.beta || !out.values[i]) {
            out.values[i].reset();
            continue;
        }
        *out.values[i] += noise.noise_scale * profile.kpis[i].sigma * eps;
    }
    clamp_to_domain(out);
    return out;
}

}  // namespace slicevis
