#pragma once

// Cross-validation and year-window experiment protocols.

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "expred/balance.hpp"
#include "expred/dataset.hpp"
#include "expred/eval/folds.hpp"
#include "expred/eval/metrics.hpp"
#include "expred/features/standardizer.hpp"
#include "expred/learn/classifier.hpp"

namespace expred::eval {

/// Everything one fold saw and produced; handed to an optional observer so
/// callers can audit which rows fed each stage.
struct FoldTrace {
    std::size_t fold = 0;
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
    features::Standardizer standardizer;
    balance::ResampleResult resampled;  // training rows after resampling (standardized space)
    std::uint64_t sampler_seed = 0;
    learn::TrainedModel model;
    std::vector<double> test_scores;
};

using FoldObserver = std::function<void(const FoldTrace&)>;

struct CvResult {
    FoldAssignment assignment;
    std::vector<MetricsResult> folds;
    std::vector<ConfusionCounts> fold_counts;
    /// Arithmetic means of per-fold precision and recall; fscore is their
    /// harmonic mean. The mean of per-fold F-scores is kept separately.
    MetricsResult mean;
    double mean_fold_fscore = 0.0;
    std::vector<double> oof_scores;  // pooled out-of-fold scores, instance order
    PrCurve curve;
    double threshold = 0.5;

    std::vector<double> fold_fscores() const {
        std::vector<double> out;
        for (const auto& m : folds) out.push_back(m.fscore);
        return out;
    }
};

inline MetricsResult average_metrics(const std::vector<MetricsResult>& folds, double* mean_fscore = nullptr) {
    MetricsResult m;
    double f = 0.0;
    for (const auto& r : folds) {
        m.precision += r.precision;
        m.recall += r.recall;
        f += r.fscore;
    }
    const double n = static_cast<double>(folds.size());
    m.precision /= n;
    m.recall /= n;
    m.fscore = harmonic_fscore(m.precision, m.recall);
    if (mean_fscore) *mean_fscore = f / n;
    return m;
}

namespace detail {

struct SplitOutcome {
    std::vector<double> scores;
    features::Standardizer standardizer;
    balance::ResampleResult resampled;
    std::uint64_t sampler_seed;
    learn::TrainedModel model;
};

// Standardize on train, resample train, fit, score test. Test rows never
// reach the standardizer, sampler or learner.
inline SplitOutcome train_and_score(const learn::ClassifierSpec& spec, const balance::SamplerConfig& sampler,
                                    const Matrix& X_train, const Labels& y_train, const Matrix& X_test,
                                    std::uint64_t seed, std::uint64_t index) {
    auto standardizer = features::fit_standardizer(X_train);
    const Matrix train_std = features::apply_standardizer(standardizer, X_train);
    const Matrix test_std = features::apply_standardizer(standardizer, X_test);
    const std::uint64_t sampler_seed = derive_seed(seed, "balance", index);
    auto resampled = balance::resample(sampler, train_std, y_train, sampler_seed);
    auto model = learn::fit(spec.with_seed(derive_seed(seed, "learn", index)), resampled.X, resampled.y);
    auto scores = learn::score(model, test_std);
    return {std::move(scores), std::move(standardizer), std::move(resampled), sampler_seed, std::move(model)};
}

}  // namespace detail

/// Stratified k-fold CV. Per fold: standardize and resample the training rows
/// only, fit, score the held-out rows. Point metrics use the classifier's default
/// threshold and are averaged over folds; the PR curve pools out-of-fold scores.
inline CvResult cross_validate(const learn::ClassifierSpec& spec, const balance::SamplerConfig& sampler,
                               const Matrix& X, const Labels& y, std::size_t k, std::uint64_t seed,
                               const FoldObserver& observer = {}) {
    if (X.rows() != y.size()) throw PipelineError("X and y row counts differ");
    CvResult r;
    r.assignment = stratified_kfold(y, k, derive_seed(seed, "folds"));
    r.threshold = spec.default_threshold();
    r.oof_scores.assign(y.size(), 0.0);

    for (std::size_t f = 0; f < k; ++f) {
        const auto train = r.assignment.train_indices(f);
        const auto test = r.assignment.test_indices(f);
        const Labels y_train = select(y, train);
        const Labels y_test = select(y, test);
        auto out = detail::train_and_score(spec, sampler, X.select_rows(train), y_train, X.select_rows(test), seed, f);

        Labels pred(test.size());
        for (std::size_t i = 0; i < test.size(); ++i) {
            pred[i] = out.scores[i] >= r.threshold ? 1 : 0;
            r.oof_scores[test[i]] = out.scores[i];
        }
        const auto counts = confusion(y_test, pred);
        r.fold_counts.push_back(counts);
        r.folds.push_back(metrics_from_counts(counts));
        if (observer) {
            observer(FoldTrace{f, train, test, std::move(out.standardizer), std::move(out.resampled), out.sampler_seed,
                               std::move(out.model), std::move(out.scores)});
        }
    }
    r.mean = average_metrics(r.folds, &r.mean_fold_fscore);
    r.curve = pr_curve(y, r.oof_scores);
    return r;
}

struct TemporalResult {
    bool single_year = false;  // true: in-year stratified CV
    MetricsResult metrics;
    PrCurve curve;
    std::size_t train_size = 0;
    std::size_t test_size = 0;
    std::optional<CvResult> cv;
};

/// Train on `train_years`, test on `test_year`. When train_years is exactly
/// {test_year} this is stratified CV inside that year.
inline TemporalResult temporal_experiment(const Dataset& dataset, ExploitKind label, const std::set<int>& train_years,
                                          int test_year, const learn::ClassifierSpec& spec,
                                          const balance::SamplerConfig& sampler, std::size_t k, std::uint64_t seed) {
    if (train_years.empty()) throw PipelineError("temporal experiment needs at least one training year");
    TemporalResult r;
    if (train_years.size() == 1 && *train_years.begin() == test_year) {
        const Dataset year = dataset.filter_years({test_year});
        if (year.size() == 0) throw PipelineError("no instances for year " + std::to_string(test_year));
        const auto m = build_matrix(year);
        r.single_year = true;
        r.cv = cross_validate(spec, sampler, m.X, m.labels(label), k, seed);
        r.metrics = r.cv->mean;
        r.curve = r.cv->curve;
        r.train_size = r.test_size = year.size();
        return r;
    }
    if (train_years.count(test_year)) {
        throw PipelineError("test year " + std::to_string(test_year) + " must not be among the training years");
    }
    const Dataset train = dataset.filter_years(train_years);
    const Dataset test = dataset.filter_years({test_year});
    if (train.size() == 0) throw PipelineError("no instances in the training years");
    if (test.size() == 0) throw PipelineError("no instances in test year " + std::to_string(test_year));
    const auto mtrain = build_matrix(train);
    const auto mtest = build_matrix(test);
    const Labels& y_test = mtest.labels(label);
    auto out = detail::train_and_score(spec, sampler, mtrain.X, mtrain.labels(label), mtest.X, seed, 0);
    Labels pred(out.scores.size());
    for (std::size_t i = 0; i < pred.size(); ++i) pred[i] = out.scores[i] >= spec.default_threshold() ? 1 : 0;
    r.metrics = point_metrics(y_test, pred);
    r.curve = pr_curve(y_test, out.scores);
    r.train_size = train.size();
    r.test_size = test.size();
    return r;
}

}  // namespace expred::eval
