#pragma once

// Synthetic imbalanced data shaped like the 79-column feature layout:
// overlapping Gaussians pushed through per-kind transforms (counts, scores,
// ordinal levels, flags).

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "expred/common.hpp"
#include "expred/features/keywords.hpp"
#include "expred/features/schema.hpp"
#include "expred/matrix.hpp"

namespace synth {

struct Data {
    expred::Matrix X;
    expred::Labels y;
};

/// Exactly round(n * positive_rate) positives, placed at random rows.
///
/// Each row draws a latent point from one of two overlapping Gaussians
/// (positives shifted by `separation` along every latent axis). Each feature is
/// a random projection of the latent point plus independent noise, then mapped
/// to its kind: counts, 0-10 scores, three-level ordinals, flags.
inline Data imbalanced(std::size_t n, double positive_rate, std::uint64_t seed, double separation = 1.0) {
    using namespace expred::features;
    constexpr std::size_t kLatent = 3;
    constexpr double kNoise = 0.5;
    const FeatureSchema schema(KeywordList::defaults().terms());
    expred::Rng rng(seed);
    const auto n_pos = static_cast<std::size_t>(std::llround(static_cast<double>(n) * positive_rate));
    Data d{expred::Matrix(n, kFeatureCount), expred::Labels(n, 0)};
    std::fill(d.y.begin(), d.y.begin() + static_cast<std::ptrdiff_t>(n_pos), 1);
    rng.shuffle(d.y);

    std::vector<std::array<double, kLatent>> loading(kFeatureCount);
    for (auto& a : loading) {
        for (auto& v : a) v = rng.normal() / std::sqrt(static_cast<double>(kLatent));
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::array<double, kLatent> u{};
        for (auto& v : u) v = rng.normal() + (d.y[i] ? separation : 0.0);
        for (const auto& f : schema.entries()) {
            double z = kNoise * rng.normal();
            for (std::size_t l = 0; l < kLatent; ++l) z += loading[f.index][l] * u[l];
            double v = 0.0;
            switch (f.kind) {
                case Kind::Numeric:
                    v = f.category == Category::Cvss2 || f.category == Category::Cvss3
                            ? std::clamp(5.0 + 2.0 * z, 0.0, 10.0)
                            : std::max(0.0, std::floor(2.0 * z + 2.0));
                    break;
                case Kind::Ordinal: v = std::clamp(std::round(1.0 + z), 0.0, 2.0); break;
                case Kind::Binary: v = z > 0.5 ? 1.0 : 0.0; break;
            }
            d.X(i, f.index) = v;
        }
    }
    return d;
}

/// Small dense 2-D problem for sampler checks; duplicates are likely by design.
inline Data small_2d(expred::Rng& rng, std::size_t n, std::size_t n_pos, bool integer_grid) {
    Data d{expred::Matrix(n, 2), expred::Labels(n, 0)};
    std::fill(d.y.begin(), d.y.begin() + static_cast<std::ptrdiff_t>(n_pos), 1);
    rng.shuffle(d.y);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            d.X(i, j) = integer_grid ? static_cast<double>(rng.below(6)) : rng.normal() + (d.y[i] ? 1.0 : 0.0);
        }
    }
    return d;
}

}  // namespace synth
