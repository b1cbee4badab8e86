#pragma once

#include <array>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "slicevis/kpi.hpp"
#include "slicevis/rng.hpp"

namespace slicevis {

using CorrelationMatrix = Eigen::Matrix<double, kNumKpis, kNumKpis>;

/// Gaussian-copula dependence between the ten KPIs.
///
/// The input matrix must be symmetric with unit diagonal and entries in
/// [-1, 1]. If it is not positive definite, eigenvalues are floored at
/// `kEigenFloor` and the result is rescaled back to unit diagonal. The
/// Cholesky factor of the repaired matrix is kept for sampling.
class CorrelationModel {
public:
    static constexpr double kEigenFloor = 1e-6;

    explicit CorrelationModel(const CorrelationMatrix& matrix);

    static CorrelationModel identity();

    /// delay-jitter 0.7, delay-loss 0.5, throughput-loss -0.4, cpu-mem 0.6,
    /// retrans-loss 0.5, everything else 0.
    static CorrelationModel defaults();

    /// Build from off-diagonal (kpi, kpi, rho) entries; the rest is identity.
    static CorrelationModel from_pairs(const std::vector<std::tuple<Kpi, Kpi, double>>& pairs);

    /// The matrix as supplied, before any repair.
    const CorrelationMatrix& input() const noexcept { return input_; }
    const CorrelationMatrix& matrix() const noexcept { return matrix_; }
    const CorrelationMatrix& cholesky() const noexcept { return chol_; }
    bool repaired() const noexcept { return repaired_; }

private:
    CorrelationMatrix input_;
    CorrelationMatrix matrix_;
    CorrelationMatrix chol_;
    bool repaired_ = false;
};

/// Ten uniforms in (0, 1) whose dependence follows the model's Gaussian copula.
std::array<double, kNumKpis> gaussian_copula_sample(const CorrelationModel& model, Rng& rng);

/// Standard normal CDF and quantile.
double normal_cdf(double z) noexcept;
double normal_quantile(double u);

}  // namespace slicevis
