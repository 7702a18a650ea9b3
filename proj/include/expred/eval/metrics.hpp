#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <vector>

#include <json.hpp>

#include "expred/common.hpp"
#include "expred/matrix.hpp"

namespace expred::eval {

struct ConfusionCounts {
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;

    std::size_t total() const { return tp + fp + fn + tn; }
    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

struct MetricsResult {
    double precision = 0.0;
    double recall = 0.0;
    double fscore = 0.0;

    friend bool operator==(const MetricsResult&, const MetricsResult&) = default;
};

/// Harmonic mean with 0/0 -> 0.
inline double harmonic_fscore(double precision, double recall) {
    const double s = precision + recall;
    return s > 0.0 ? 2.0 * precision * recall / s : 0.0;
}

inline MetricsResult metrics_from_counts(const ConfusionCounts& c) {
    const auto ratio = [](std::size_t a, std::size_t b) { return b ? static_cast<double>(a) / static_cast<double>(b) : 0.0; };
    const double p = ratio(c.tp, c.tp + c.fp);
    const double r = ratio(c.tp, c.tp + c.fn);
    return {p, r, harmonic_fscore(p, r)};
}

inline ConfusionCounts confusion(std::span<const unsigned char> y_true, std::span<const unsigned char> y_pred) {
    if (y_true.size() != y_pred.size()) throw PipelineError("y_true and y_pred lengths differ");
    ConfusionCounts c;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (y_true[i]) {
            (y_pred[i] ? c.tp : c.fn)++;
        } else {
            (y_pred[i] ? c.fp : c.tn)++;
        }
    }
    return c;
}

inline MetricsResult point_metrics(std::span<const unsigned char> y_true, std::span<const unsigned char> y_pred) {
    return metrics_from_counts(confusion(y_true, y_pred));
}

struct PrPoint {
    double threshold;
    double precision;
    double recall;

    friend bool operator==(const PrPoint&, const PrPoint&) = default;
};

/// One point per distinct score, thresholds descending.
struct PrCurve {
    std::vector<PrPoint> points;
    double average_precision = 0.0;

    friend bool operator==(const PrCurve&, const PrCurve&) = default;
};

/// Sweeps every distinct score as a ">= threshold" cut.
/// AP = sum_i (R_i - R_{i-1}) * P_i with R_0 = 0.
inline PrCurve pr_curve(std::span<const unsigned char> y_true, std::span<const double> scores) {
    if (y_true.size() != scores.size()) throw PipelineError("labels and scores lengths differ");
    const auto positives = static_cast<std::size_t>(std::count(y_true.begin(), y_true.end(), 1));
    if (positives == 0) throw PipelineError("PR curve needs at least one positive instance");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    PrCurve curve;
    std::size_t tp = 0, taken = 0;
    double prev_recall = 0.0;
    for (std::size_t i = 0; i < order.size();) {
        const double t = scores[order[i]];
        while (i < order.size() && scores[order[i]] == t) {
            tp += y_true[order[i]] ? 1 : 0;
            ++taken;
            ++i;
        }
        const double p = static_cast<double>(tp) / static_cast<double>(taken);
        const double r = static_cast<double>(tp) / static_cast<double>(positives);
        curve.points.push_back({t, p, r});
        curve.average_precision += (r - prev_recall) * p;
        prev_recall = r;
    }
    return curve;
}

inline std::string pr_curve_csv(const PrCurve& c) {
    std::string out = "threshold,precision,recall\n";
    for (const auto& p : c.points) {
        out += format_double(p.threshold) + "," + format_double(p.precision) + "," + format_double(p.recall) + "\n";
    }
    return out;
}

inline nlohmann::json metrics_json(const MetricsResult& m) {
    return {{"precision", m.precision}, {"recall", m.recall}, {"fscore", m.fscore}};
}

}  // namespace expred::eval
