#include "slicevis/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

#include "slicevis/error.hpp"
#include "slicevis/rng.hpp"

namespace slicevis {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Splitting

Split stratified_split(std::span<const SliceType> labels, const SplitSpec& spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
        throw UsageError("split: train fraction must lie in (0, 1)");

    std::array<std::vector<std::size_t>, kNumSlices> groups;
    if (spec.stratified) {
        for (std::size_t i = 0; i < labels.size(); ++i) groups[index_of(labels[i])].push_back(i);
    } else {
        groups[0].resize(labels.size());
        std::iota(groups[0].begin(), groups[0].end(), std::size_t{0});
    }

    Split out;
    for (std::size_t k = 0; k < kNumSlices; ++k) {
        auto& idx = groups[k];
        const std::size_t c = idx.size();
        if (c == 0) continue;
        if (c < spec.min_per_class)
            throw DataError("split: class " + std::string(slice_name(static_cast<SliceType>(k))) +
                            " has " + std::to_string(c) + " sample(s); at least " +
                            std::to_string(spec.min_per_class) + " required");
        Rng rng(spec.seed, Stream::split, k);
        for (std::size_t i = c - 1; i > 0; --i) std::swap(idx[i], idx[rng.below(i + 1)]);

        auto n_test = static_cast<std::size_t>(
            std::llround((1.0 - spec.train_fraction) * static_cast<double>(c)));
        if (c >= 2) n_test = std::clamp<std::size_t>(n_test, 1, c - 1);
        else n_test = 0;
        out.test.insert(out.test.end(), idx.begin(), idx.begin() + static_cast<long>(n_test));
        out.train.insert(out.train.end(), idx.begin() + static_cast<long>(n_test), idx.end());
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

// ---------------------------------------------------------------------------
// Features

Features raw_features(const Dataset& ds) {
    Features x(static_cast<Eigen::Index>(ds.size()), static_cast<Eigen::Index>(kNumKpis));
    for (std::size_t i = 0; i < ds.size(); ++i)
        for (std::size_t k = 0; k < kNumKpis; ++k) {
            const auto& v = ds.samples[i].x.values[k];
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
                v ? *v : std::numeric_limits<double>::quiet_NaN();
        }
    return x;
}

Features image_features(const Dataset& ds, Method m) {
    if (ds.samples.empty()) return Features(0, 0);
    const std::size_t size = ds.samples.front().image(m).size();
    const auto dims = static_cast<Eigen::Index>(size);
    Features x(static_cast<Eigen::Index>(ds.size()), dims);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto data = ds.samples[i].image(m).data();
        if (data.size() != size)
            throw DataError("sample " + std::to_string(i) + ": image size differs from sample 0");
        for (Eigen::Index j = 0; j < dims; ++j)
            x(static_cast<Eigen::Index>(i), j) = data[static_cast<std::size_t>(j)];
    }
    return x;
}

Features select_rows(const Features& x, std::span<const std::size_t> rows) {
    Features out(static_cast<Eigen::Index>(rows.size()), x.cols());
    for (std::size_t i = 0; i < rows.size(); ++i)
        out.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(rows[i]));
    return out;
}

Labels select_labels(const Labels& y, std::span<const std::size_t> rows) {
    Labels out;
    out.reserve(rows.size());
    for (auto r : rows) out.push_back(y[r]);
    return out;
}

void MedianImputer::fit(const Features& train) {
    medians_ = Eigen::VectorXd::Zero(train.cols());
    std::vector<double> column;
    for (Eigen::Index j = 0; j < train.cols(); ++j) {
        column.clear();
        for (Eigen::Index i = 0; i < train.rows(); ++i)
            if (!std::isnan(train(i, j))) column.push_back(train(i, j));
        if (column.empty()) continue;
        std::sort(column.begin(), column.end());
        const std::size_t mid = column.size() / 2;
        medians_(j) = column.size() % 2 ? column[mid] : 0.5 * (column[mid - 1] + column[mid]);
    }
}

Features MedianImputer::transform(const Features& x) const {
    Features out = x;
    for (Eigen::Index i = 0; i < out.rows(); ++i)
        for (Eigen::Index j = 0; j < out.cols(); ++j)
            if (std::isnan(out(i, j))) out(i, j) = medians_(j);
    return out;
}

void Standardizer::fit(const Features& train) {
    if (train.rows() == 0) throw DataError("standardize: empty training set");
    mean_ = train.colwise().mean().transpose();
    scale_ = ((train.rowwise() - mean_.transpose()).array().square().colwise().sum() /
              static_cast<double>(train.rows()))
                 .sqrt()
                 .transpose();
    for (Eigen::Index j = 0; j < scale_.size(); ++j)
        if (!(scale_(j) > 1e-12)) scale_(j) = 1.0;
}

Features Standardizer::transform(const Features& x) const {
    return ((x.rowwise() - mean_.transpose()).array().rowwise() / scale_.transpose().array())
        .matrix();
}

PreparedFeatures prepare_features(const Features& train, const Features& test) {
    MedianImputer imputer;
    imputer.fit(train);
    const Features train_i = imputer.transform(train);
    Standardizer scaler;
    scaler.fit(train_i);
    return {scaler.transform(train_i), scaler.transform(imputer.transform(test))};
}

// ---------------------------------------------------------------------------
// k-NN

Labels fit_predict_knn(const Features& train, const Labels& train_y, const Features& test,
                       std::size_t k) {
    if (train.rows() == 0) throw DataError("knn: empty training set");
    if (k == 0) throw UsageError("knn: k must be >= 1");
    if (static_cast<std::size_t>(train.rows()) != train_y.size())
        throw DataError("knn: feature and label counts differ");
    k = std::min<std::size_t>(k, static_cast<std::size_t>(train.rows()));

    const Eigen::VectorXd train_sq = train.rowwise().squaredNorm();
    Labels out;
    out.reserve(static_cast<std::size_t>(test.rows()));
    std::vector<std::pair<double, std::size_t>> dist(static_cast<std::size_t>(train.rows()));

    constexpr Eigen::Index kBlock = 256;
    for (Eigen::Index start = 0; start < test.rows(); start += kBlock) {
        const Eigen::Index len = std::min(kBlock, test.rows() - start);
        const auto block = test.middleRows(start, len);
        const Eigen::MatrixXd cross = block * train.transpose();
        const Eigen::VectorXd test_sq = block.rowwise().squaredNorm();
        for (Eigen::Index q = 0; q < len; ++q) {
            for (Eigen::Index i = 0; i < train.rows(); ++i) {
                const double d2 = test_sq(q) + train_sq(i) - 2.0 * cross(q, i);
                dist[static_cast<std::size_t>(i)] = {std::sqrt(std::max(d2, 0.0)),
                                                     static_cast<std::size_t>(i)};
            }
            std::partial_sort(dist.begin(), dist.begin() + static_cast<long>(k), dist.end());

            std::array<std::size_t, kNumSlices> votes{};
            std::array<double, kNumSlices> summed{};
            for (std::size_t j = 0; j < k; ++j) {
                const auto c = index_of(train_y[dist[j].second]);
                ++votes[c];
                summed[c] += dist[j].first;
            }
            std::size_t best = 0;
            for (std::size_t c = 1; c < kNumSlices; ++c) {
                if (votes[c] > votes[best] ||
                    (votes[c] == votes[best] && votes[c] > 0 && summed[c] < summed[best]))
                    best = c;
            }
            out.push_back(static_cast<SliceType>(best));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Gaussian naive Bayes

Labels fit_predict_gnb(const Features& train, const Labels& train_y, const Features& test) {
    if (train.rows() == 0) throw DataError("gnb: empty training set");
    const Eigen::Index d = train.cols();
    std::array<Eigen::VectorXd, kNumSlices> mean;
    std::array<Eigen::VectorXd, kNumSlices> var;
    std::array<double, kNumSlices> log_prior{};
    std::array<std::size_t, kNumSlices> count{};
    for (auto y : train_y) ++count[index_of(y)];

    for (std::size_t c = 0; c < kNumSlices; ++c) {
        if (count[c] == 0) {
            log_prior[c] = -std::numeric_limits<double>::infinity();
            continue;
        }
        mean[c] = Eigen::VectorXd::Zero(d);
        var[c] = Eigen::VectorXd::Zero(d);
        for (Eigen::Index i = 0; i < train.rows(); ++i)
            if (index_of(train_y[static_cast<std::size_t>(i)]) == c)
                mean[c] += train.row(i).transpose();
        mean[c] /= static_cast<double>(count[c]);
        for (Eigen::Index i = 0; i < train.rows(); ++i)
            if (index_of(train_y[static_cast<std::size_t>(i)]) == c)
                var[c] += (train.row(i).transpose() - mean[c]).array().square().matrix();
        var[c] /= static_cast<double>(count[c]);
        var[c] = var[c].cwiseMax(kVarianceFloor);
        log_prior[c] =
            std::log(static_cast<double>(count[c]) / static_cast<double>(train.rows()));
    }

    Labels out;
    out.reserve(static_cast<std::size_t>(test.rows()));
    for (Eigen::Index i = 0; i < test.rows(); ++i) {
        std::size_t best = 0;
        double best_score = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < kNumSlices; ++c) {
            if (count[c] == 0) continue;
            const auto diff = (test.row(i).transpose() - mean[c]).array();
            const double ll =
                -0.5 * ((diff.square() / var[c].array()).sum() +
                        (2.0 * M_PI * var[c].array()).log().sum());
            const double score = log_prior[c] + ll;
            if (score > best_score) {
                best_score = score;
                best = c;
            }
        }
        out.push_back(static_cast<SliceType>(best));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Logistic regression

namespace {

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits) {
    Eigen::MatrixXd p = logits;
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        const double mx = p.row(i).maxCoeff();
        p.row(i) = (p.row(i).array() - mx).exp();
        p.row(i) /= p.row(i).sum();
    }
    return p;
}

}  // namespace

LossGradient logreg_loss_gradient(const LogRegModel& model, const Features& x, const Labels& y,
                                  double l2) {
    const auto m = static_cast<double>(x.rows());
    Eigen::MatrixXd logits = x * model.weights;
    logits.rowwise() += model.bias.transpose();
    Eigen::MatrixXd p = softmax_rows(logits);

    double loss = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const auto c = static_cast<Eigen::Index>(index_of(y[static_cast<std::size_t>(i)]));
        const double mx = logits.row(i).maxCoeff();
        const double lse = mx + std::log((logits.row(i).array() - mx).exp().sum());
        loss += lse - logits(i, c);
        p(i, c) -= 1.0;
    }
    loss = loss / m + 0.5 * l2 * model.weights.squaredNorm();

    LogRegModel grad;
    grad.weights = x.transpose() * p / m + l2 * model.weights;
    grad.bias = p.colwise().sum().transpose() / m;
    return {loss, std::move(grad)};
}

LogRegModel fit_logreg(const Features& train, const Labels& train_y, const LogRegOptions& opts) {
    if (train.rows() == 0) throw DataError("logreg: empty training set");
    LogRegModel model{Eigen::MatrixXd::Zero(train.cols(), kNumSlices),
                      Eigen::VectorXd::Zero(kNumSlices)};
    for (int epoch = 0; epoch < opts.epochs; ++epoch) {
        auto [loss, grad] = logreg_loss_gradient(model, train, train_y, opts.l2);
        if (!std::isfinite(loss))
            throw TrainingError("logreg: loss became non-finite at epoch " +
                                std::to_string(epoch) + "; try a smaller learning rate");
        model.weights -= opts.learning_rate * grad.weights;
        model.bias -= opts.learning_rate * grad.bias;
    }
    if (!model.weights.allFinite() || !model.bias.allFinite())
        throw TrainingError("logreg: weights diverged; try a smaller learning rate");
    return model;
}

Labels predict_logreg(const LogRegModel& model, const Features& x) {
    Eigen::MatrixXd logits = x * model.weights;
    logits.rowwise() += model.bias.transpose();
    Labels out;
    out.reserve(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        Eigen::Index best = 0;
        for (Eigen::Index c = 1; c < logits.cols(); ++c)
            if (logits(i, c) > logits(i, best)) best = c;
        out.push_back(static_cast<SliceType>(best));
    }
    return out;
}

Labels fit_predict_logreg(const Features& train, const Labels& train_y, const Features& test,
                          const LogRegOptions& opts) {
    return predict_logreg(fit_logreg(train, train_y, opts), test);
}

// ---------------------------------------------------------------------------
// Metrics

Metrics metrics_from_confusion(
    const std::array<std::array<std::size_t, kNumSlices>, kNumSlices>& confusion) {
    Metrics m;
    m.confusion = confusion;
    std::size_t total = 0;
    std::size_t trace = 0;
    for (std::size_t t = 0; t < kNumSlices; ++t) {
        trace += confusion[t][t];
        for (std::size_t p = 0; p < kNumSlices; ++p) total += confusion[t][p];
    }
    m.accuracy = total ? static_cast<double>(trace) / static_cast<double>(total) : 0.0;

    for (std::size_t c = 0; c < kNumSlices; ++c) {
        std::size_t row = 0;
        std::size_t col = 0;
        for (std::size_t o = 0; o < kNumSlices; ++o) {
            row += confusion[c][o];
            col += confusion[o][c];
        }
        auto& pc = m.per_class[c];
        const auto tp = static_cast<double>(confusion[c][c]);
        pc.support = row;
        pc.absent = row == 0;
        pc.precision = col ? tp / static_cast<double>(col) : 0.0;
        pc.recall = row ? tp / static_cast<double>(row) : 0.0;
        pc.f1 = pc.precision + pc.recall > 0.0
                    ? 2.0 * pc.precision * pc.recall / (pc.precision + pc.recall)
                    : 0.0;
        m.macro_f1 += pc.f1 / static_cast<double>(kNumSlices);
    }
    return m;
}

Metrics evaluate(std::span<const SliceType> predictions, std::span<const SliceType> truth) {
    if (predictions.size() != truth.size())
        throw DataError("evaluate: " + std::to_string(predictions.size()) + " predictions for " +
                        std::to_string(truth.size()) + " labels");
    std::array<std::array<std::size_t, kNumSlices>, kNumSlices> confusion{};
    for (std::size_t i = 0; i < truth.size(); ++i)
        ++confusion[index_of(truth[i])][index_of(predictions[i])];
    return metrics_from_confusion(confusion);
}

// ---------------------------------------------------------------------------
// Reporting

double relative_improvement_pct(double baseline, double improved) {
    return (improved - baseline) / baseline * 100.0;
}

Improvement improvement_report(std::span<const Metrics> ml, std::span<const Metrics> image) {
    auto best = [](std::span<const Metrics> group, auto metric) {
        double b = -std::numeric_limits<double>::infinity();
        for (const auto& m : group) b = std::max(b, metric(m));
        return b;
    };
    auto rel = [&](auto metric) -> std::optional<double> {
        if (ml.empty() || image.empty()) return std::nullopt;
        const double base = best(ml, metric);
        if (base == 0.0) return std::nullopt;
        return relative_improvement_pct(base, best(image, metric));
    };
    return {
        rel([](const Metrics& m) { return m.accuracy; }),
        rel([](const Metrics& m) { return m.f1(SliceType::URLLC); }),
        rel([](const Metrics& m) { return m.macro_f1; }),
    };
}

std::string classifier_name(Classifier c) {
    switch (c) {
        case Classifier::knn:
            return "k-NN";
        case Classifier::gnb:
            return "Naive Bayes";
        case Classifier::logreg:
            return "Logistic Reg.";
    }
    return "?";
}

Metrics run_classifier(Classifier c, const Features& train, const Labels& train_y,
                       const Features& test, const Labels& test_y, const EvalOptions& opts) {
    const auto prepared = prepare_features(train, test);
    Labels pred;
    switch (c) {
        case Classifier::knn:
            pred = fit_predict_knn(prepared.train, train_y, prepared.test, opts.k);
            break;
        case Classifier::gnb:
            pred = fit_predict_gnb(prepared.train, train_y, prepared.test);
            break;
        case Classifier::logreg:
            pred = fit_predict_logreg(prepared.train, train_y, prepared.test, opts.logreg);
            break;
    }
    return evaluate(pred, test_y);
}

EvalReport run_evaluation(const Dataset& ds, std::span<const Method> methods,
                          const SplitSpec& split_spec, const EvalOptions& opts) {
    const Labels labels = ds.labels();
    const Split split = stratified_split(labels, split_spec);
    const Labels train_y = select_labels(labels, split.train);
    const Labels test_y = select_labels(labels, split.test);

    EvalReport report;
    report.split_seed = split_spec.seed;
    report.train_size = split.train.size();
    report.test_size = split.test.size();

    const Features raw = raw_features(ds);
    const Features raw_train = select_rows(raw, split.train);
    const Features raw_test = select_rows(raw, split.test);
    for (auto c : opts.raw_classifiers)
        report.raw.push_back({classifier_name(c), "raw",
                              run_classifier(c, raw_train, train_y, raw_test, test_y, opts)});

    for (auto m : methods) {
        const Features img = image_features(ds, m);
        const Features img_train = select_rows(img, split.train);
        const Features img_test = select_rows(img, split.test);
        for (auto c : opts.image_classifiers)
            report.image.push_back({classifier_name(c), std::string(method_name(m)),
                                    run_classifier(c, img_train, train_y, img_test, test_y, opts)});
    }

    std::vector<Metrics> ml;
    std::vector<Metrics> im;
    for (const auto& r : report.raw) ml.push_back(r.metrics);
    for (const auto& r : report.image) im.push_back(r.metrics);
    report.improvement = improvement_report(ml, im);
    return report;
}

namespace {

json metrics_json(const ClassifierResult& r) {
    const auto& m = r.metrics;
    json j{{"classifier", r.classifier},
           {"features", r.features},
           {"accuracy", m.accuracy},
           {"macro_f1", m.macro_f1}};
    for (auto t : kAllSlices) {
        const auto& pc = m.per_class[index_of(t)];
        j["f1"][std::string(slice_name(t))] = pc.f1;
        j["precision"][std::string(slice_name(t))] = pc.precision;
        j["recall"][std::string(slice_name(t))] = pc.recall;
        j["support"][std::string(slice_name(t))] = pc.support;
        if (pc.absent) j["absent_classes"].push_back(std::string(slice_name(t)));
    }
    j["confusion"] = m.confusion;
    return j;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string optional_pct(const std::optional<double>& v) {
    return v ? fmt("%+.2f%%", *v) : std::string("undefined");
}

void table(std::ostringstream& out, const std::vector<ClassifierResult>& rows) {
    out << "  classifier      features    accuracy  URLLC F1  eMBB F1  mIoT F1  macro F1\n";
    for (const auto& r : rows) {
        char line[160];
        std::snprintf(line, sizeof line, "  %-15s %-11s %8.4f  %8.2f  %7.2f  %7.2f  %8.4f\n",
                      r.classifier.c_str(), r.features.c_str(), r.metrics.accuracy,
                      r.metrics.f1(SliceType::URLLC), r.metrics.f1(SliceType::eMBB),
                      r.metrics.f1(SliceType::mIoT), r.metrics.macro_f1);
        out << line;
    }
}

}  // namespace

json report_json(const EvalReport& r) {
    json j;
    j["split"] = {{"seed", r.split_seed}, {"train", r.train_size}, {"test", r.test_size}};
    j["raw"] = json::array();
    for (const auto& x : r.raw) j["raw"].push_back(metrics_json(x));
    j["image"] = json::array();
    for (const auto& x : r.image) j["image"].push_back(metrics_json(x));
    j["improvement_pct"] = {{"accuracy", optional_json(r.improvement.accuracy)},
                            {"urllc_f1", optional_json(r.improvement.urllc_f1)},
                            {"macro_f1", optional_json(r.improvement.macro_f1)}};
    return j;
}

std::string report_text(const EvalReport& r) {
    std::ostringstream out;
    out << "split seed " << r.split_seed << ": " << r.train_size << " train / " << r.test_size
        << " test\n\n";
    out << "Raw KPI classifiers\n";
    table(out, r.raw);
    out << "\nImage-based classifiers\n";
    table(out, r.image);
    out << "\nImprovement (best image vs best raw)\n";
    out << "  accuracy   " << optional_pct(r.improvement.accuracy) << "\n";
    out << "  URLLC F1   " << optional_pct(r.improvement.urllc_f1) << "\n";
    out << "  macro F1   " << optional_pct(r.improvement.macro_f1) << "\n";
    return out.str();
}

}  // namespace slicevis
