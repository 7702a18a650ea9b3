#pragma once

// Brute-force reference implementations used by the unit and acceptance
// tests. They trade speed for directness and share no code with the library
// beyond the Matrix container.

#include <algorithm>
#include <cmath>
#include <set>
#include <span>
#include <vector>

#include "expred/eval/metrics.hpp"
#include "expred/matrix.hpp"

namespace oracle {

using expred::Labels;
using expred::Matrix;

struct Counts {
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

inline Counts count(const Labels& y, const Labels& pred) {
    Counts c;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] == 1 && pred[i] == 1) ++c.tp;
        if (y[i] == 0 && pred[i] == 1) ++c.fp;
        if (y[i] == 1 && pred[i] == 0) ++c.fn;
        if (y[i] == 0 && pred[i] == 0) ++c.tn;
    }
    return c;
}

inline double safe_div(double a, double b) { return b == 0.0 ? 0.0 : a / b; }

inline expred::eval::MetricsResult metrics(const Labels& y, const Labels& pred) {
    const Counts c = count(y, pred);
    const double p = safe_div(c.tp, c.tp + c.fp);
    const double r = safe_div(c.tp, c.tp + c.fn);
    return {p, r, p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r)};
}

/// Enumerates every distinct score as a cut, high to low, and counts from scratch.
inline expred::eval::PrCurve pr_curve(const Labels& y, const std::vector<double>& scores) {
    std::set<double, std::greater<>> thresholds(scores.begin(), scores.end());
    const double positives = static_cast<double>(std::count(y.begin(), y.end(), 1));
    expred::eval::PrCurve c;
    double prev_r = 0.0;
    for (double t : thresholds) {
        double tp = 0, flagged = 0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (scores[i] >= t) {
                flagged += 1;
                tp += y[i];
            }
        }
        const double p = tp / flagged;
        const double r = tp / positives;
        c.points.push_back({t, p, r});
        c.average_precision += (r - prev_r) * p;
        prev_r = r;
    }
    return c;
}

inline double sq_dist(const Matrix& X, std::size_t a, std::size_t b) {
    double s = 0.0;
    for (std::size_t j = 0; j < X.cols(); ++j) s += (X(a, j) - X(b, j)) * (X(a, j) - X(b, j));
    return s;
}

/// k nearest of `pool` to row q (q excluded), ordered by (distance, index).
inline std::vector<std::size_t> knn(const Matrix& X, std::size_t q, const std::vector<std::size_t>& pool,
                                    std::size_t k) {
    std::vector<std::size_t> c;
    for (std::size_t i : pool) {
        if (i != q) c.push_back(i);
    }
    std::sort(c.begin(), c.end(), [&](std::size_t a, std::size_t b) {
        const double da = sq_dist(X, q, a), db = sq_dist(X, q, b);
        return da != db ? da < db : a < b;
    });
    if (c.size() > k) c.resize(k);
    return c;
}

/// True if `s` equals a + u (b - a) for some u in [0, 1].
inline bool on_segment(std::span<const double> s, std::span<const double> a, std::span<const double> b,
                       double tol = 1e-9) {
    double u = -1.0;
    for (std::size_t j = 0; j < s.size(); ++j) {
        const double d = b[j] - a[j];
        if (std::fabs(d) > 1e-12) {
            u = (s[j] - a[j]) / d;
            break;
        }
    }
    if (u < 0.0) {
        // a == b: s must coincide with them.
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (std::fabs(s[j] - a[j]) > tol) return false;
        }
        return true;
    }
    if (u < -tol || u > 1.0 + tol) return false;
    for (std::size_t j = 0; j < s.size(); ++j) {
        if (std::fabs(a[j] + u * (b[j] - a[j]) - s[j]) > tol * (1.0 + std::fabs(s[j]))) return false;
    }
    return true;
}

/// AllKNN by direct simulation: each pass recomputes neighbours among the
/// rows alive at the start of the pass and drops disagreeing majority rows.
inline std::vector<std::size_t> all_knn_kept(const Matrix& X, const Labels& y, std::size_t k_max) {
    const auto pos = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
    const unsigned char majority = pos <= y.size() - pos ? 0 : 1;
    std::vector<std::size_t> alive(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) alive[i] = i;
    for (std::size_t k = 1; k <= k_max; ++k) {
        std::vector<std::size_t> next;
        for (std::size_t i : alive) {
            bool keep = true;
            if (y[i] == majority) {
                for (std::size_t j : knn(X, i, alive, k)) keep = keep && y[j] == y[i];
            }
            if (keep) next.push_back(i);
        }
        alive = next;
    }
    return alive;
}

/// ADASYN weights: share of the other class among each minority row's k
/// nearest rows of the whole set.
inline std::vector<double> adasyn_density(const Matrix& X, const Labels& y, std::size_t k) {
    const auto pos = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
    const unsigned char minority = pos <= y.size() - pos ? 1 : 0;
    std::vector<std::size_t> all(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) all[i] = i;
    const std::size_t kk = std::min(k, y.size() - 1);
    std::vector<double> w;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] != minority) continue;
        double hits = 0;
        for (std::size_t j : knn(X, i, all, kk)) hits += y[j] != minority;
        w.push_back(hits / static_cast<double>(kk));
    }
    return w;
}

/// Two-tailed Student-t p-value by Simpson integration of the density.
inline double t_pvalue_simpson(double t, double dof, int intervals = 200000) {
    const double c = std::exp(std::lgamma((dof + 1) / 2) - std::lgamma(dof / 2)) / std::sqrt(dof * M_PI);
    const auto pdf = [&](double x) { return c * std::pow(1.0 + x * x / dof, -(dof + 1) / 2); };
    const double a = 0.0, b = std::fabs(t);
    const double h = (b - a) / intervals;
    double s = pdf(a) + pdf(b);
    for (int i = 1; i < intervals; ++i) s += (i % 2 ? 4.0 : 2.0) * pdf(a + i * h);
    const double central = s * h / 3.0;  // integral over [0, |t|]
    return 1.0 - 2.0 * central;
}

/// Solves A x = b by Gaussian elimination with partial pivoting.
inline std::vector<double> solve(std::vector<std::vector<double>> A, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::fabs(A[r][c]) > std::fabs(A[p][c])) p = r;
        }
        std::swap(A[c], A[p]);
        std::swap(b[c], b[p]);
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = A[r][c] / A[c][c];
            for (std::size_t k = c; k < n; ++k) A[r][k] -= f * A[c][k];
            b[r] -= f * b[c];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= A[i][k] * x[k];
        x[i] = s / A[i][i];
    }
    return x;
}

/// Newton's method on mean logistic loss + lambda ||w||^2 (bias last, unpenalised).
inline std::vector<double> logistic_newton(const Matrix& X, const Labels& y, double lambda, int iters = 50) {
    const std::size_t d = X.cols();
    std::vector<double> theta(d + 1, 0.0);
    const double n = static_cast<double>(X.rows());
    for (int it = 0; it < iters; ++it) {
        std::vector<double> g(d + 1, 0.0);
        std::vector<std::vector<double>> H(d + 1, std::vector<double>(d + 1, 0.0));
        for (std::size_t i = 0; i < X.rows(); ++i) {
            std::vector<double> x(X.row(i).begin(), X.row(i).end());
            x.push_back(1.0);
            double z = 0;
            for (std::size_t j = 0; j <= d; ++j) z += theta[j] * x[j];
            const double p = 1.0 / (1.0 + std::exp(-z));
            for (std::size_t j = 0; j <= d; ++j) {
                g[j] += (p - y[i]) * x[j] / n;
                for (std::size_t k = 0; k <= d; ++k) H[j][k] += p * (1 - p) * x[j] * x[k] / n;
            }
        }
        for (std::size_t j = 0; j < d; ++j) {
            g[j] += 2 * lambda * theta[j];
            H[j][j] += 2 * lambda;
        }
        const auto step = solve(H, g);
        for (std::size_t j = 0; j <= d; ++j) theta[j] -= step[j];
    }
    return theta;
}

}  // namespace oracle
