#pragma once

// Paired t-test over per-fold scores.

#include <cmath>
#include <vector>

#include <boost/math/distributions/students_t.hpp>
#include <json.hpp>

#include "expred/common.hpp"

namespace expred::eval {

struct TTestResult {
    double t_statistic = 0.0;
    double p_value = 1.0;  // two-tailed
    int dof = 0;
    bool degenerate = false;  // zero variance in the differences

    /// Conventional 5% rule: only p <= 0.05 counts as a significant difference.
    bool significant(double alpha = 0.05) const { return p_value <= alpha; }
};

/// Two-tailed p-value of Student's t with `dof` degrees of freedom.
inline double t_two_tailed_p(double t, int dof) {
    const boost::math::students_t dist(static_cast<double>(dof));
    return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t))));
}

/// d_i = a_i - b_i; t = mean(d) sqrt(k) / sd(d) with the k-1 denominator.
inline TTestResult paired_ttest(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw PipelineError("paired t-test needs equal-length score lists");
    const std::size_t k = a.size();
    if (k < 2) throw PipelineError("paired t-test needs at least 2 pairs");
    double mean = 0.0;
    for (std::size_t i = 0; i < k; ++i) mean += a[i] - b[i];
    mean /= static_cast<double>(k);
    double ss = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double d = a[i] - b[i] - mean;
        ss += d * d;
    }
    const double sd = std::sqrt(ss / static_cast<double>(k - 1));
    TTestResult r;
    r.dof = static_cast<int>(k) - 1;
    // Differences identical up to rounding count as zero variance.
    const double scale = std::max(1.0, std::fabs(mean));
    if (sd <= 1e-12 * scale) {
        r.degenerate = true;
        if (std::fabs(mean) <= 1e-15) {
            r.t_statistic = 0.0;
            r.p_value = 1.0;
        } else {
            r.t_statistic = mean > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
            r.p_value = 0.0;
        }
        return r;
    }
    r.t_statistic = mean * std::sqrt(static_cast<double>(k)) / sd;
    r.p_value = t_two_tailed_p(r.t_statistic, r.dof);
    return r;
}

inline nlohmann::json ttest_json(const TTestResult& r) {
    nlohmann::json j{{"p_value", r.p_value}, {"dof", r.dof}, {"degenerate", r.degenerate},
                     {"significant_at_0.05", r.significant()}};
    if (std::isfinite(r.t_statistic)) {
        j["t_statistic"] = r.t_statistic;
    } else {
        j["t_statistic"] = r.t_statistic > 0 ? "inf" : "-inf";
    }
    return j;
}

}  // namespace expred::eval
