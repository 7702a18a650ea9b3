#pragma once

#include <cmath>
#include <vector>

#include "expred/matrix.hpp"

namespace expred::features {

/// Per-column z-scoring fitted on training rows. Population standard
/// deviation; a zero deviation divides by 1.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> stddev;

    friend bool operator==(const Standardizer&, const Standardizer&) = default;
};

inline Standardizer fit_standardizer(const Matrix& X_train) {
    if (X_train.empty()) throw std::invalid_argument("cannot fit a standardizer on zero rows");
    const std::size_t n = X_train.rows(), d = X_train.cols();
    Standardizer s{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) s.mean[j] += X_train(i, j);
    }
    for (auto& m : s.mean) m /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            const double dv = X_train(i, j) - s.mean[j];
            s.stddev[j] += dv * dv;
        }
    }
    for (auto& v : s.stddev) v = std::sqrt(v / static_cast<double>(n));
    return s;
}

inline Matrix apply_standardizer(const Standardizer& s, const Matrix& X) {
    if (X.cols() != s.mean.size()) throw std::invalid_argument("standardizer width mismatch");
    Matrix out = X;
    for (std::size_t i = 0; i < out.rows(); ++i) {
        for (std::size_t j = 0; j < out.cols(); ++j) {
            const double sd = s.stddev[j] > 0.0 ? s.stddev[j] : 1.0;
            out(i, j) = (out(i, j) - s.mean[j]) / sd;
        }
    }
    return out;
}

}  // namespace expred::features
