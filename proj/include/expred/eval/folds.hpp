#pragma once

#include <string>
#include <vector>

#include "expred/common.hpp"
#include "expred/matrix.hpp"

namespace expred::eval {

struct FoldAssignment {
    std::size_t k = 0;
    std::vector<std::size_t> fold_of;  // per instance, in [0, k)

    std::vector<std::size_t> test_indices(std::size_t fold) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < fold_of.size(); ++i) {
            if (fold_of[i] == fold) out.push_back(i);
        }
        return out;
    }
    std::vector<std::size_t> train_indices(std::size_t fold) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < fold_of.size(); ++i) {
            if (fold_of[i] != fold) out.push_back(i);
        }
        return out;
    }

    friend bool operator==(const FoldAssignment&, const FoldAssignment&) = default;
};

/// Seeded shuffle inside each class, then one round-robin deal over the
/// positives followed by the negatives. The deal continues across classes so
/// fold sizes stay within one of each other.
inline FoldAssignment stratified_kfold(const Labels& y, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw PipelineError("stratified k-fold needs k >= 2");
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < y.size(); ++i) (y[i] ? pos : neg).push_back(i);
    if (pos.size() < k) {
        throw PipelineError("positive class has " + std::to_string(pos.size()) + " instances, fewer than k = " +
                            std::to_string(k));
    }
    if (neg.size() < k) {
        throw PipelineError("negative class has " + std::to_string(neg.size()) + " instances, fewer than k = " +
                            std::to_string(k));
    }
    Rng rng(seed);
    rng.shuffle(pos);
    rng.shuffle(neg);
    FoldAssignment a{k, std::vector<std::size_t>(y.size(), 0)};
    std::size_t next = 0;
    for (const auto* cls : {&pos, &neg}) {
        for (std::size_t i : *cls) a.fold_of[i] = next++ % k;
    }
    return a;
}

}  // namespace expred::eval
