#pragma once

// L2-regularised logistic regression (full-batch gradient descent) and a
// linear SVM (hinge loss, seeded stochastic subgradient descent).

#include <cmath>
#include <numeric>
#include <vector>

#include "expred/common.hpp"
#include "expred/matrix.hpp"

namespace expred::learn {

struct LinearModel {
    std::vector<double> weights;
    double bias = 0.0;

    double margin(std::span<const double> x) const {
        double z = bias;
        for (std::size_t j = 0; j < weights.size(); ++j) z += weights[j] * x[j];
        return z;
    }

    friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

inline double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
inline double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

struct LogisticParams {
    double lambda = 1e-3;
    double learning_rate = 0.1;
    double tol = 1e-6;
    int max_iters = 5000;
};

/// mean_i [log(1 + e^{z_i}) - y_i z_i] + lambda * ||w||^2  (bias unpenalised)
inline double logistic_objective(const Matrix& X, const Labels& y, const LinearModel& m, double lambda) {
    double loss = 0.0;
    for (std::size_t i = 0; i < X.rows(); ++i) {
        const double z = m.margin(X.row(i));
        loss += softplus(z) - (y[i] ? z : 0.0);
    }
    loss /= static_cast<double>(X.rows());
    double reg = 0.0;
    for (double w : m.weights) reg += w * w;
    return loss + lambda * reg;
}

/// Gradient of logistic_objective; the last component is d/d bias.
inline std::vector<double> logistic_gradient(const Matrix& X, const Labels& y, const LinearModel& m, double lambda) {
    const std::size_t d = X.cols();
    std::vector<double> g(d + 1, 0.0);
    for (std::size_t i = 0; i < X.rows(); ++i) {
        const auto x = X.row(i);
        const double r = sigmoid(m.margin(x)) - (y[i] ? 1.0 : 0.0);
        for (std::size_t j = 0; j < d; ++j) g[j] += r * x[j];
        g[d] += r;
    }
    const double inv_n = 1.0 / static_cast<double>(X.rows());
    for (auto& v : g) v *= inv_n;
    for (std::size_t j = 0; j < d; ++j) g[j] += 2.0 * lambda * m.weights[j];
    return g;
}

/// Gradient descent from zero. The step starts at learning_rate and is halved
/// (for the rest of the run) whenever it would increase the objective.
inline LinearModel fit_logistic(const Matrix& X, const Labels& y, const LogisticParams& p) {
    LinearModel m{std::vector<double>(X.cols(), 0.0), 0.0};
    double step = p.learning_rate;
    double obj = logistic_objective(X, y, m, p.lambda);
    for (int it = 0; it < p.max_iters; ++it) {
        const auto g = logistic_gradient(X, y, m, p.lambda);
        const double norm = std::sqrt(std::inner_product(g.begin(), g.end(), g.begin(), 0.0));
        if (norm < p.tol) break;
        while (true) {
            LinearModel next = m;
            for (std::size_t j = 0; j < next.weights.size(); ++j) next.weights[j] -= step * g[j];
            next.bias -= step * g.back();
            const double next_obj = logistic_objective(X, y, next, p.lambda);
            if (next_obj <= obj || step < 1e-12) {
                m = std::move(next);
                obj = next_obj;
                break;
            }
            step /= 2.0;
        }
    }
    return m;
}

struct SvmParams {
    double lambda = 1e-3;
    int epochs = 200;
    double learning_rate = 0.1;
};

/// mean_i max(0, 1 - s_i z_i) + lambda * ||w||^2,  s_i = +-1
inline double hinge_objective(const Matrix& X, const Labels& y, const LinearModel& m, double lambda) {
    double loss = 0.0;
    for (std::size_t i = 0; i < X.rows(); ++i) {
        const double s = y[i] ? 1.0 : -1.0;
        loss += std::max(0.0, 1.0 - s * m.margin(X.row(i)));
    }
    double reg = 0.0;
    for (double w : m.weights) reg += w * w;
    return loss / static_cast<double>(X.rows()) + lambda * reg;
}

/// One shuffled pass over the rows per epoch; step lr / (1 + lr * lambda * t).
inline LinearModel fit_linear_svm(const Matrix& X, const Labels& y, const SvmParams& p, std::uint64_t seed) {
    LinearModel m{std::vector<double>(X.cols(), 0.0), 0.0};
    std::vector<std::size_t> order(X.rows());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    std::size_t t = 0;
    for (int epoch = 0; epoch < p.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t i : order) {
            const double eta = p.learning_rate / (1.0 + p.learning_rate * p.lambda * static_cast<double>(t++));
            const auto x = X.row(i);
            const double s = y[i] ? 1.0 : -1.0;
            const bool violated = s * m.margin(x) < 1.0;
            for (std::size_t j = 0; j < m.weights.size(); ++j) {
                double g = 2.0 * p.lambda * m.weights[j];
                if (violated) g -= s * x[j];
                m.weights[j] -= eta * g;
            }
            if (violated) m.bias += eta * s;
        }
    }
    return m;
}

}  // namespace expred::learn
