#include "slicevis/copula.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/distributions/normal.hpp>

#include "slicevis/error.hpp"

namespace slicevis {

namespace {

constexpr double kSymmetryTol = 1e-12;

CorrelationMatrix repair_to_positive_definite(const CorrelationMatrix& a) {
    Eigen::SelfAdjointEigenSolver<CorrelationMatrix> eig(a);
    if (eig.info() != Eigen::Success) throw ConfigError("correlation: eigen decomposition failed");
    const Eigen::Matrix<double, kNumKpis, 1> values = eig.eigenvalues().cwiseMax(CorrelationModel::kEigenFloor);
    CorrelationMatrix r = eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
    const Eigen::Matrix<double, kNumKpis, 1> inv_sd = r.diagonal().cwiseSqrt().cwiseInverse();
    r = inv_sd.asDiagonal() * r * inv_sd.asDiagonal();
    r = 0.5 * (r + r.transpose()).eval();
    r.diagonal().setOnes();
    return r;
}

}  // namespace

CorrelationModel::CorrelationModel(const CorrelationMatrix& matrix)
    : input_(matrix), matrix_(matrix) {
    for (Eigen::Index i = 0; i < matrix_.rows(); ++i) {
        for (Eigen::Index j = 0; j < matrix_.cols(); ++j) {
            const double v = matrix_(i, j);
            const auto where = "correlation[" + std::to_string(i) + "][" + std::to_string(j) + "]";
            if (!std::isfinite(v) || v < -1.0 || v > 1.0)
                throw ConfigError(where + ": entries must lie in [-1, 1]");
            if (std::abs(v - matrix_(j, i)) > kSymmetryTol)
                throw ConfigError(where + ": matrix must be symmetric");
        }
        if (matrix_(i, i) != 1.0)
            throw ConfigError("correlation[" + std::to_string(i) + "][" + std::to_string(i) +
                              "]: diagonal must be 1");
    }

    Eigen::SelfAdjointEigenSolver<CorrelationMatrix> eig(matrix_, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < kEigenFloor) {
        matrix_ = repair_to_positive_definite(matrix_);
        repaired_ = true;
    }
    Eigen::LLT<CorrelationMatrix> llt(matrix_);
    if (llt.info() != Eigen::Success)
        throw ConfigError("correlation: matrix is not positive definite after repair");
    chol_ = llt.matrixL();
}

CorrelationModel CorrelationModel::identity() {
    return CorrelationModel(CorrelationMatrix::Identity());
}

CorrelationModel CorrelationModel::from_pairs(
    const std::vector<std::tuple<Kpi, Kpi, double>>& pairs) {
    CorrelationMatrix m = CorrelationMatrix::Identity();
    for (const auto& [a, b, rho] : pairs) {
        if (a == b) {
            throw ConfigError("correlation." + std::string(kpi_name(a)) +
                              ": a KPI cannot be paired with itself");
        }
        m(index_of(a), index_of(b)) = rho;
        m(index_of(b), index_of(a)) = rho;
    }
    return CorrelationModel(m);
}

CorrelationModel CorrelationModel::defaults() {
    return from_pairs({
        {Kpi::delay, Kpi::jitter, 0.7},
        {Kpi::delay, Kpi::loss, 0.5},
        {Kpi::throughput, Kpi::loss, -0.4},
        {Kpi::cpu, Kpi::mem, 0.6},
        {Kpi::retrans, Kpi::loss, 0.5},
    });
}

double normal_cdf(double z) noexcept { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_quantile(double u) {
    return boost::math::quantile(boost::math::normal_distribution<double>(), u);
}

std::array<double, kNumKpis> gaussian_copula_sample(const CorrelationModel& model, Rng& rng) {
    Eigen::Matrix<double, kNumKpis, 1> g;
    for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = rng.normal();
    const Eigen::Matrix<double, kNumKpis, 1> z = model.cholesky() * g;

    // Keep u strictly inside (0, 1) so the marginal quantile stays finite.
    constexpr double kEdge = 1e-15;
    std::array<double, kNumKpis> u{};
    for (std::size_t i = 0; i < kNumKpis; ++i)
        u[i] = std::clamp(normal_cdf(z(static_cast<Eigen::Index>(i))), kEdge, 1.0 - kEdge);
    return u;
}

}  // namespace slicevis
