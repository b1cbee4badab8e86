#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "slicevis/dataset.hpp"
#include "slicevis/kpi.hpp"

namespace slicevis {

/// Row-major sample-by-feature matrix. NaN marks a missing raw KPI.
using Features = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Labels = std::vector<SliceType>;

// ---------------------------------------------------------------------------
// Splitting
// ---------------------------------------------------------------------------

struct SplitSpec {
    double train_fraction = 0.8;
    bool stratified = true;
    std::uint64_t seed = 7;
    /// Classes with fewer samples than this (but at least one) are a
    /// DataError. Set to 1 to let singleton classes land in train.
    std::size_t min_per_class = 2;
};

struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Per class: shuffle that class's indices with the split seed, then move
/// round((1 - f) * c) of them to test, kept within [1, c - 1] whenever
/// c >= 2. Both index lists come back sorted.
Split stratified_split(std::span<const SliceType> labels, const SplitSpec& spec);

// ---------------------------------------------------------------------------
// Feature pipeline
// ---------------------------------------------------------------------------

/// Ten raw KPI columns in physical units; missing entries are NaN.
Features raw_features(const Dataset& ds);
/// n*n*3 intensities per sample, row-major and channel-last.
Features image_features(const Dataset& ds, Method m);

Features select_rows(const Features& x, std::span<const std::size_t> rows);
Labels select_labels(const Labels& y, std::span<const std::size_t> rows);

/// Replaces NaN with the per-column median of the fitted (train) matrix.
class MedianImputer {
public:
    void fit(const Features& train);
    Features transform(const Features& x) const;
    const Eigen::VectorXd& medians() const noexcept { return medians_; }

private:
    Eigen::VectorXd medians_;
};

/// (x - mean) / std with train statistics. Zero-variance columns use std 1.
class Standardizer {
public:
    void fit(const Features& train);
    Features transform(const Features& x) const;
    const Eigen::VectorXd& mean() const noexcept { return mean_; }
    const Eigen::VectorXd& scale() const noexcept { return scale_; }

private:
    Eigen::VectorXd mean_;
    Eigen::VectorXd scale_;
};

struct PreparedFeatures {
    Features train;
    Features test;
};

/// Imputes with train medians, then standardizes with train statistics,
/// each exactly once.
PreparedFeatures prepare_features(const Features& train, const Features& test);

// ---------------------------------------------------------------------------
// Classifiers (inputs already imputed and standardized)
// ---------------------------------------------------------------------------

/// Euclidean k-NN with majority vote; ties go to the smallest summed
/// distance, then to the lowest class code.
Labels fit_predict_knn(const Features& train, const Labels& train_y, const Features& test,
                       std::size_t k);

/// Gaussian naive Bayes with per-class variances floored at kVarianceFloor.
inline constexpr double kVarianceFloor = 1e-9;
Labels fit_predict_gnb(const Features& train, const Labels& train_y, const Features& test);

struct LogRegOptions {
    int epochs = 500;
    double learning_rate = 0.5;
    double l2 = 1e-4;
};

/// Multinomial logistic regression parameters: weights (features x 3) and
/// bias (3).
struct LogRegModel {
    Eigen::MatrixXd weights;
    Eigen::VectorXd bias;
};

struct LossGradient {
    double loss;
    LogRegModel gradient;
};

/// Mean cross-entropy plus 0.5 * l2 * |W|^2, and its exact gradient.
LossGradient logreg_loss_gradient(const LogRegModel& model, const Features& x, const Labels& y,
                                  double l2);

/// Full-batch gradient descent from zero weights. Throws TrainingError if
/// the loss stops being finite.
LogRegModel fit_logreg(const Features& train, const Labels& train_y, const LogRegOptions& opts);
Labels predict_logreg(const LogRegModel& model, const Features& x);
Labels fit_predict_logreg(const Features& train, const Labels& train_y, const Features& test,
                          const LogRegOptions& opts = {});

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;
    bool absent = false;  ///< class never occurs in the truth labels
};

struct Metrics {
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    std::array<ClassMetrics, kNumSlices> per_class{};
    /// confusion[truth][predicted]
    std::array<std::array<std::size_t, kNumSlices>, kNumSlices> confusion{};

    double f1(SliceType t) const noexcept { return per_class[index_of(t)].f1; }
};

Metrics evaluate(std::span<const SliceType> predictions, std::span<const SliceType> truth);
Metrics metrics_from_confusion(
    const std::array<std::array<std::size_t, kNumSlices>, kNumSlices>& confusion);

// ---------------------------------------------------------------------------
// Reporting
// ---------------------------------------------------------------------------

struct ClassifierResult {
    std::string classifier;  ///< "k-NN", "Naive Bayes", "Logistic Reg."
    std::string features;    ///< "raw" or a method name
    Metrics metrics;
};

/// Relative improvements in percent; empty when the baseline is zero.
struct Improvement {
    std::optional<double> accuracy;
    std::optional<double> urllc_f1;
    std::optional<double> macro_f1;
};

double relative_improvement_pct(double baseline, double improved);
/// Compares the best value of each metric across both groups.
Improvement improvement_report(std::span<const Metrics> ml, std::span<const Metrics> image);

enum class Classifier { knn, gnb, logreg };
std::string classifier_name(Classifier c);

struct EvalOptions {
    std::size_t k = 5;
    LogRegOptions logreg{};
    std::vector<Classifier> raw_classifiers{Classifier::knn, Classifier::gnb, Classifier::logreg};
    std::vector<Classifier> image_classifiers{Classifier::knn};
};

struct EvalReport {
    std::uint64_t split_seed = 0;
    std::size_t train_size = 0;
    std::size_t test_size = 0;
    std::vector<ClassifierResult> raw;
    std::vector<ClassifierResult> image;
    Improvement improvement;
};

/// Runs one classifier end to end on already split features.
Metrics run_classifier(Classifier c, const Features& train, const Labels& train_y,
                       const Features& test, const Labels& test_y, const EvalOptions& opts);

/// Raw-KPI block plus one block per image method, on one shared split.
EvalReport run_evaluation(const Dataset& ds, std::span<const Method> methods,
                          const SplitSpec& split, const EvalOptions& opts = {});

nlohmann::json report_json(const EvalReport& r);
std::string report_text(const EvalReport& r);

}  // namespace slicevis
