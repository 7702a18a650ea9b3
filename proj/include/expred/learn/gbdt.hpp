#pragma once

// Gradient-boosted regression trees on the logistic loss.
//
// Trees are grown level by level with exact greedy split search over
// pre-sorted feature values. Leaf values are Newton steps -G / (H + l2),
// scaled by the shrinkage. The ensemble starts from the class-prior log-odds.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "expred/common.hpp"
#include "expred/learn/linear.hpp"
#include "expred/matrix.hpp"

namespace expred::learn {

struct GbdtParams {
    int n_trees = 200;
    int max_depth = 4;
    double shrinkage = 0.1;
    int min_leaf = 5;
    double l2 = 1.0;
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;  // x <= threshold goes left
    int left = -1;
    int right = -1;
    double value = 0.0;  // leaf output, shrinkage already applied

    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct RegressionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    double predict(std::span<const double> x) const {
        int n = 0;
        while (nodes[n].feature >= 0) {
            n = x[nodes[n].feature] <= nodes[n].threshold ? nodes[n].left : nodes[n].right;
        }
        return nodes[n].value;
    }

    friend bool operator==(const RegressionTree&, const RegressionTree&) = default;
};

struct GbdtModel {
    double base_score = 0.0;  // prior log-odds
    std::vector<RegressionTree> trees;
    std::vector<double> train_loss;  // mean log-loss after 0..n_trees trees; not serialised

    double raw_score(std::span<const double> x) const {
        double f = base_score;
        for (const auto& t : trees) f += t.predict(x);
        return f;
    }

    friend bool operator==(const GbdtModel& a, const GbdtModel& b) {
        return a.base_score == b.base_score && a.trees == b.trees;
    }
};

inline double mean_log_loss(const std::vector<double>& raw, const Labels& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < raw.size(); ++i) s += softplus(raw[i]) - (y[i] ? raw[i] : 0.0);
    return s / static_cast<double>(raw.size());
}

namespace gbdt_detail {

struct SplitCandidate {
    double gain = 0.0;
    int feature = -1;
    double threshold = 0.0;
};

struct NodeStats {
    double g = 0.0;
    double h = 0.0;
    std::size_t count = 0;
};

inline double leaf_objective(double g, double h, double l2) { return g * g / (h + l2); }

class TreeBuilder {
public:
    TreeBuilder(const Matrix& X, const std::vector<std::vector<std::size_t>>& sorted, const GbdtParams& p)
        : X_(X), sorted_(sorted), p_(p) {}

    RegressionTree build(const std::vector<double>& grad, const std::vector<double>& hess) {
        const std::size_t n = X_.rows();
        RegressionTree tree;
        tree.nodes.push_back({});
        std::vector<int> node_of(n, 0);
        std::vector<int> frontier{0};
        std::vector<NodeStats> stats(1);
        for (std::size_t i = 0; i < n; ++i) {
            stats[0].g += grad[i];
            stats[0].h += hess[i];
            ++stats[0].count;
        }

        for (int depth = 0; depth < p_.max_depth && !frontier.empty(); ++depth) {
            // Dense ids for the frontier so per-level scratch stays small.
            std::vector<int> slot(tree.nodes.size(), -1);
            for (std::size_t s = 0; s < frontier.size(); ++s) slot[frontier[s]] = static_cast<int>(s);

            std::vector<SplitCandidate> best(frontier.size());
            for (std::size_t f = 0; f < X_.cols(); ++f) {
                std::vector<NodeStats> left(frontier.size());
                std::vector<double> last(frontier.size(), 0.0);
                for (std::size_t i : sorted_[f]) {
                    const int node = node_of[i];
                    if (node < 0 || slot[node] < 0) continue;
                    const auto s = static_cast<std::size_t>(slot[node]);
                    const double v = X_(i, f);
                    auto& L = left[s];
                    if (L.count > 0 && v > last[s]) consider(stats[node], L, f, last[s], v, best[s]);
                    L.g += grad[i];
                    L.h += hess[i];
                    ++L.count;
                    last[s] = v;
                }
            }

            std::vector<int> next;
            for (std::size_t s = 0; s < frontier.size(); ++s) {
                if (best[s].feature < 0) continue;
                const int id = frontier[s];
                const int l = static_cast<int>(tree.nodes.size());
                tree.nodes.push_back({});
                tree.nodes.push_back({});
                tree.nodes[id].feature = best[s].feature;
                tree.nodes[id].threshold = best[s].threshold;
                tree.nodes[id].left = l;
                tree.nodes[id].right = l + 1;
                next.push_back(l);
                next.push_back(l + 1);
            }
            stats.resize(tree.nodes.size());
            for (int id : next) stats[id] = {};
            for (std::size_t i = 0; i < n; ++i) {
                const int node = node_of[i];
                if (node < 0 || tree.nodes[node].feature < 0) continue;
                const auto& tn = tree.nodes[node];
                const int child = X_(i, tn.feature) <= tn.threshold ? tn.left : tn.right;
                node_of[i] = child;
                stats[child].g += grad[i];
                stats[child].h += hess[i];
                ++stats[child].count;
            }
            frontier = std::move(next);
        }

        for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
            auto& node = tree.nodes[id];
            if (node.feature < 0) node.value = -p_.shrinkage * stats[id].g / (stats[id].h + p_.l2);
        }
        return tree;
    }

private:
    void consider(const NodeStats& parent, const NodeStats& L, std::size_t f, double lo, double hi,
                  SplitCandidate& best) const {
        const std::size_t right_count = parent.count - L.count;
        if (L.count < static_cast<std::size_t>(p_.min_leaf) || right_count < static_cast<std::size_t>(p_.min_leaf)) {
            return;
        }
        const double gr = parent.g - L.g, hr = parent.h - L.h;
        const double gain = leaf_objective(L.g, L.h, p_.l2) + leaf_objective(gr, hr, p_.l2) -
                            leaf_objective(parent.g, parent.h, p_.l2);
        if (gain > best.gain + 1e-12) {
            double thr = lo + (hi - lo) / 2.0;
            if (!(thr < hi)) thr = lo;
            best = {gain, static_cast<int>(f), thr};
        }
    }

    const Matrix& X_;
    const std::vector<std::vector<std::size_t>>& sorted_;
    const GbdtParams& p_;
};

}  // namespace gbdt_detail

inline GbdtModel fit_gbdt(const Matrix& X, const Labels& y, const GbdtParams& p) {
    const std::size_t n = X.rows();
    const double positives = static_cast<double>(std::count(y.begin(), y.end(), 1));
    const double prior = positives / static_cast<double>(n);
    GbdtModel model;
    model.base_score = std::log(prior / (1.0 - prior));

    std::vector<std::vector<std::size_t>> sorted(X.cols(), std::vector<std::size_t>(n));
    for (std::size_t f = 0; f < X.cols(); ++f) {
        std::iota(sorted[f].begin(), sorted[f].end(), 0);
        std::stable_sort(sorted[f].begin(), sorted[f].end(), [&](std::size_t a, std::size_t b) { return X(a, f) < X(b, f); });
    }

    std::vector<double> raw(n, model.base_score), grad(n), hess(n);
    model.train_loss.push_back(mean_log_loss(raw, y));
    gbdt_detail::TreeBuilder builder(X, sorted, p);
    for (int t = 0; t < p.n_trees; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            const double prob = sigmoid(raw[i]);
            grad[i] = prob - (y[i] ? 1.0 : 0.0);
            hess[i] = std::max(prob * (1.0 - prob), 1e-16);
        }
        RegressionTree tree = builder.build(grad, hess);
        for (std::size_t i = 0; i < n; ++i) raw[i] += tree.predict(X.row(i));
        model.trees.push_back(std::move(tree));
        model.train_loss.push_back(mean_log_loss(raw, y));
    }
    return model;
}

}  // namespace expred::learn
