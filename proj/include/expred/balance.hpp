#pragma once

// Training-set resampling: random under-sampling, SMOTE, ADASYN and AllKNN.
//
// Class roles are decided by counts: the smaller class is the minority (the
// positive class on a tie). Distances are squared Euclidean with ties broken by
// row index, so every sampler is a pure function of (X, y, parameters, seed).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "expred/common.hpp"
#include "expred/matrix.hpp"

namespace expred::balance {

struct ResampleResult {
    Matrix X;
    Labels y;
    Labels synthetic;                   // 1 for generated rows
    std::vector<std::ptrdiff_t> origin;  // input row index, or -1 for generated rows
    std::vector<std::size_t> budgets;    // ADASYN: synthetic count per minority row (input order)
    std::vector<std::string> notes;
};

struct ClassSplit {
    unsigned char minority_label;
    std::vector<std::size_t> minority;
    std::vector<std::size_t> majority;
};

inline ClassSplit split_classes(const Labels& y) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < y.size(); ++i) (y[i] ? pos : neg).push_back(i);
    if (pos.empty() || neg.empty()) throw PipelineError("resampling needs both classes present");
    if (pos.size() <= neg.size()) return {1, std::move(pos), std::move(neg)};
    return {0, std::move(neg), std::move(pos)};
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

/// The k nearest rows to `query` among `candidates` (query itself excluded),
/// nearest first.
inline std::vector<std::size_t> nearest_neighbors(const Matrix& X, std::size_t query,
                                                  const std::vector<std::size_t>& candidates, std::size_t k) {
    std::vector<std::pair<double, std::size_t>> d;
    d.reserve(candidates.size());
    for (std::size_t c : candidates) {
        if (c != query) d.emplace_back(squared_distance(X.row(query), X.row(c)), c);
    }
    k = std::min(k, d.size());
    std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < k; ++i) out.push_back(d[i].second);
    return out;
}

namespace detail {

inline ResampleResult copy_rows(const Matrix& X, const Labels& y, const std::vector<std::size_t>& rows) {
    ResampleResult r;
    r.X = X.select_rows(rows);
    r.y = select(y, rows);
    r.synthetic.assign(rows.size(), 0);
    for (std::size_t i : rows) r.origin.push_back(static_cast<std::ptrdiff_t>(i));
    return r;
}

inline std::vector<std::size_t> all_rows(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), 0);
    return v;
}

inline void check_shapes(const Matrix& X, const Labels& y) {
    if (X.rows() != y.size()) throw PipelineError("X and y row counts differ");
}

inline void add_synthetic(ResampleResult& r, std::span<const double> base, std::span<const double> neighbor,
                          double u, unsigned char label) {
    std::vector<double> s(base.size());
    for (std::size_t j = 0; j < s.size(); ++j) s[j] = base[j] + u * (neighbor[j] - base[j]);
    r.X.append_row(s);
    r.y.push_back(label);
    r.synthetic.push_back(1);
    r.origin.push_back(-1);
}

// Minority-only k-NN lists, one per minority row (same order as split.minority).
inline std::vector<std::vector<std::size_t>> minority_neighbors(const Matrix& X, const ClassSplit& split,
                                                                std::size_t k) {
    std::vector<std::vector<std::size_t>> out;
    out.reserve(split.minority.size());
    for (std::size_t i : split.minority) out.push_back(nearest_neighbors(X, i, split.minority, k));
    return out;
}

}  // namespace detail

/// Removes majority rows uniformly at random until minority/majority reaches
/// target_ratio. Kept rows retain their input order.
inline ResampleResult random_undersample(const Matrix& X, const Labels& y, double target_ratio, std::uint64_t seed) {
    detail::check_shapes(X, y);
    if (!(target_ratio > 0.0 && target_ratio <= 1.0)) throw PipelineError("RUS target_ratio must be in (0, 1]");
    const ClassSplit split = split_classes(y);
    const double n_min = static_cast<double>(split.minority.size());
    const double n_maj = static_cast<double>(split.majority.size());
    if (n_min / n_maj >= target_ratio) return detail::copy_rows(X, y, detail::all_rows(y.size()));

    const auto keep = std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(n_min / target_ratio)), 1,
                                              split.majority.size());
    std::vector<std::size_t> majority = split.majority;
    Rng rng(seed);
    rng.shuffle(majority);
    majority.resize(keep);

    std::vector<std::size_t> rows = split.minority;
    rows.insert(rows.end(), majority.begin(), majority.end());
    std::sort(rows.begin(), rows.end());
    return detail::copy_rows(X, y, rows);
}

/// SMOTE: appends minority rows x + u * (nn - x) until
/// minority = round(target_ratio * majority).
inline ResampleResult smote(const Matrix& X, const Labels& y, std::size_t k, double target_ratio, std::uint64_t seed) {
    detail::check_shapes(X, y);
    if (k < 1) throw PipelineError("SMOTE needs k >= 1");
    if (target_ratio < 0.0) throw PipelineError("SMOTE target_ratio must be non-negative");
    const ClassSplit split = split_classes(y);
    if (split.minority.size() < 2) throw PipelineError("SMOTE needs at least 2 minority rows");

    ResampleResult r = detail::copy_rows(X, y, detail::all_rows(y.size()));
    const auto wanted = static_cast<long long>(std::llround(target_ratio * static_cast<double>(split.majority.size())));
    const long long need = wanted - static_cast<long long>(split.minority.size());
    if (need <= 0) return r;

    const std::size_t k_eff = std::min(k, split.minority.size() - 1);
    const auto nn = detail::minority_neighbors(X, split, k_eff);
    Rng rng(seed);
    for (long long s = 0; s < need; ++s) {
        const std::size_t m = rng.below(split.minority.size());
        const std::size_t neighbor = nn[m][rng.below(k_eff)];
        const double u = rng.uniform();
        detail::add_synthetic(r, X.row(split.minority[m]), X.row(neighbor), u, split.minority_label);
    }
    return r;
}

/// Splits `total` proportionally to `weights` (largest remainder; ties to the
/// lower index). Budgets always sum to `total`.
inline std::vector<std::size_t> apportion(const std::vector<double>& weights, std::size_t total) {
    const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    std::vector<std::size_t> out(weights.size(), 0);
    if (total == 0 || sum <= 0.0) return out;
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double exact = weights[i] / sum * static_cast<double>(total);
        out[i] = static_cast<std::size_t>(std::floor(exact));
        assigned += out[i];
        remainders.emplace_back(exact - std::floor(exact), i);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; assigned < total; ++i, ++assigned) ++out[remainders[i % remainders.size()].second];
    return out;
}

/// ADASYN: G = round((majority - minority) * target_ratio) synthetic rows,
/// allotted to minority rows in proportion to the share of majority rows
/// among their k nearest neighbours.
inline ResampleResult adasyn(const Matrix& X, const Labels& y, std::size_t k, double target_ratio, std::uint64_t seed) {
    detail::check_shapes(X, y);
    if (k < 1) throw PipelineError("ADASYN needs k >= 1");
    if (target_ratio < 0.0) throw PipelineError("ADASYN target_ratio must be non-negative");
    const ClassSplit split = split_classes(y);
    if (split.minority.size() < 2) throw PipelineError("ADASYN needs at least 2 minority rows");

    ResampleResult r = detail::copy_rows(X, y, detail::all_rows(y.size()));
    const double gap = static_cast<double>(split.majority.size() - split.minority.size());
    const auto total = static_cast<std::size_t>(std::llround(gap * target_ratio));
    r.budgets.assign(split.minority.size(), 0);
    if (total == 0) return r;

    const std::vector<std::size_t> everyone = detail::all_rows(y.size());
    const std::size_t k_all = std::min(k, y.size() - 1);
    std::vector<double> density;
    for (std::size_t i : split.minority) {
        const auto nn = nearest_neighbors(X, i, everyone, k_all);
        const auto majority_hits = std::count_if(nn.begin(), nn.end(), [&](std::size_t j) {
            return y[j] != split.minority_label;
        });
        density.push_back(static_cast<double>(majority_hits) / static_cast<double>(k_all));
    }
    if (std::accumulate(density.begin(), density.end(), 0.0) <= 0.0) {
        r.notes.push_back("ADASYN: no minority row has majority neighbours; using a uniform budget");
        std::fill(density.begin(), density.end(), 1.0);
    }
    r.budgets = apportion(density, total);

    const std::size_t k_eff = std::min(k, split.minority.size() - 1);
    const auto nn = detail::minority_neighbors(X, split, k_eff);
    Rng rng(seed);
    for (std::size_t m = 0; m < split.minority.size(); ++m) {
        for (std::size_t g = 0; g < r.budgets[m]; ++g) {
            const std::size_t neighbor = nn[m][rng.below(k_eff)];
            const double u = rng.uniform();
            detail::add_synthetic(r, X.row(split.minority[m]), X.row(neighbor), u, split.minority_label);
        }
    }
    return r;
}

/// AllKNN: for k = 1..k_max, drop every majority row whose k nearest
/// neighbours (within the rows still present at the start of that pass) are
/// not all of its class. Removals of one pass are applied together.
inline ResampleResult all_knn(const Matrix& X, const Labels& y, std::size_t k_max = 3) {
    detail::check_shapes(X, y);
    const ClassSplit split = split_classes(y);
    const std::size_t n = y.size();

    // Full neighbour order per majority row, computed once.
    std::vector<std::vector<std::size_t>> order(n);
    for (std::size_t i : split.majority) {
        std::vector<std::pair<double, std::size_t>> d;
        d.reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) d.emplace_back(squared_distance(X.row(i), X.row(j)), j);
        }
        std::sort(d.begin(), d.end());
        for (const auto& [dist, j] : d) order[i].push_back(j);
    }

    std::vector<unsigned char> present(n, 1);
    for (std::size_t k = 1; k <= k_max; ++k) {
        std::vector<std::size_t> drop;
        for (std::size_t i : split.majority) {
            if (!present[i]) continue;
            std::size_t seen = 0;
            bool agree = true;
            for (std::size_t j : order[i]) {
                if (seen == k) break;
                if (!present[j]) continue;
                ++seen;
                if (y[j] != y[i]) {
                    agree = false;
                    break;
                }
            }
            if (!agree) drop.push_back(i);
        }
        for (std::size_t i : drop) present[i] = 0;
    }

    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < n; ++i) {
        if (present[i]) rows.push_back(i);
    }
    return detail::copy_rows(X, y, rows);
}

// ------------------------------------------------------------
// configuration
// ------------------------------------------------------------

enum class SamplerKind { None, Rus, Smote, Adasyn, AllKnn };

inline std::string_view sampler_name(SamplerKind k) {
    switch (k) {
        case SamplerKind::None: return "NONE";
        case SamplerKind::Rus: return "RUS";
        case SamplerKind::Smote: return "SMOTE";
        case SamplerKind::Adasyn: return "ADASYN";
        case SamplerKind::AllKnn: return "ALLKNN";
    }
    return "?";
}

inline std::optional<SamplerKind> parse_sampler(std::string_view name) {
    const std::string up = to_upper(trim(name));
    for (auto k : {SamplerKind::None, SamplerKind::Rus, SamplerKind::Smote, SamplerKind::Adasyn, SamplerKind::AllKnn}) {
        if (sampler_name(k) == up) return k;
    }
    return std::nullopt;
}

struct SamplerConfig {
    SamplerKind kind = SamplerKind::None;
    std::size_t k = 5;        // SMOTE / ADASYN neighbours
    std::size_t k_max = 3;    // AllKNN passes
    double target_ratio = 1.0;
};

inline ResampleResult resample(const SamplerConfig& cfg, const Matrix& X, const Labels& y, std::uint64_t seed) {
    switch (cfg.kind) {
        case SamplerKind::None: return detail::copy_rows(X, y, detail::all_rows(y.size()));
        case SamplerKind::Rus: return random_undersample(X, y, cfg.target_ratio, seed);
        case SamplerKind::Smote: return smote(X, y, cfg.k, cfg.target_ratio, seed);
        case SamplerKind::Adasyn: return adasyn(X, y, cfg.k, cfg.target_ratio, seed);
        case SamplerKind::AllKnn: return all_knn(X, y, cfg.k_max);
    }
    throw PipelineError("unknown sampler");
}

}  // namespace expred::balance
