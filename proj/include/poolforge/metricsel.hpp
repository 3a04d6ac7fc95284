#pragma once

/// @file metricsel.hpp
/// @brief Vote-based choice of one overlapping and one neighborhood measure
/// by dispersion across random resamples of the training data.

#include <poolforge/complexity.hpp>
#include <poolforge/core.hpp>
#include <poolforge/dataset.hpp>

#include <array>
#include <cmath>
#include <vector>

namespace poolforge {

struct MetricSelectionConfig {
    std::size_t n_subsets = 100;
    double subset_frac = 0.5;
    std::size_t iterations = 20;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    /// Redraws allowed for a single-class resample before giving up.
    std::size_t max_redraws = 100;
};

/// Votes per measure (indexed like complexity::all_measures) and the
/// per-family winners.
struct VoteTally {
    std::array<std::size_t, 11> votes{};
    std::size_t iterations = 0;
    complexity::Measure cm1 = complexity::Measure::F1;
    complexity::Measure cm2 = complexity::Measure::N1;
    /// Standard deviation of each measure across the resamples, per iteration.
    std::vector<std::array<double, 11>> dispersion;

    std::size_t votes_for(complexity::Measure m) const { return votes[static_cast<std::size_t>(m)]; }
};

/// Draw `size` indices with replacement from [0, n) such that at least two
/// classes are represented; redraws up to `max_redraws` times.
inline std::vector<std::size_t> draw_bag_with_replacement(const Dataset& d, std::size_t size, Rng& rng,
                                                          std::size_t max_redraws) {
    std::vector<std::size_t> bag(size);
    std::vector<bool> seen(d.num_classes());
    for (std::size_t attempt = 0; attempt <= max_redraws; ++attempt) {
        std::fill(seen.begin(), seen.end(), false);
        std::size_t distinct = 0;
        for (auto& g : bag) {
            g = rng.index(d.size());
            const auto c = static_cast<std::size_t>(d.labels[g]);
            if (!seen[c]) {
                seen[c] = true;
                ++distinct;
            }
        }
        if (distinct >= 2) return bag;
    }
    throw RuntimeFailure("resampling guard exhausted: every redraw produced a single-class bag");
}

/// Winner of a family: most votes, ties to the earlier measure in canonical order.
inline complexity::Measure family_winner(const std::array<std::size_t, 11>& votes, complexity::Family fam) {
    std::optional<complexity::Measure> best;
    for (auto m : complexity::all_measures) {
        if (complexity::family(m) != fam) continue;
        if (!best || votes[static_cast<std::size_t>(m)] > votes[static_cast<std::size_t>(*best)]) best = m;
    }
    return *best;
}

/// Each iteration resamples `n_subsets` bags (with replacement, each of
/// floor(subset_frac * |train|) instances), evaluates all eleven measures on
/// every bag and gives one vote to the measure whose values are most spread
/// out (population standard deviation). Iterations and bags draw from
/// indexed seed substreams, so the tally does not depend on `workers`.
inline VoteTally select_metrics(const Dataset& train, const MetricSelectionConfig& cfg) {
    if (cfg.n_subsets < 2) throw ArgumentError("metric selection needs at least 2 subsets");
    if (cfg.iterations < 1) throw ArgumentError("metric selection needs at least 1 iteration");
    if (!(cfg.subset_frac > 0.0 && cfg.subset_frac <= 1.0)) throw ArgumentError("subset_frac must be in (0, 1]");
    const auto bag_size = std::max<std::size_t>(
        2, static_cast<std::size_t>(std::floor(cfg.subset_frac * static_cast<double>(train.size()))));
    constexpr std::size_t k = complexity::all_measures.size();

    VoteTally tally;
    tally.iterations = cfg.iterations;
    std::vector<std::array<double, k>> values(cfg.n_subsets);
    for (std::size_t it = 0; it < cfg.iterations; ++it) {
        parallel_for(cfg.n_subsets, cfg.workers, [&](std::size_t b) {
            Rng rng(derive_seed(cfg.seed, it, b));
            const auto bag = draw_bag_with_replacement(train, bag_size, rng, cfg.max_redraws);
            const auto v = complexity::compute(complexity::all_measures, train.subset(bag), rng.next());
            std::copy(v.begin(), v.end(), values[b].begin());
        });
        std::array<double, k> spread{};
        for (std::size_t m = 0; m < k; ++m) {
            double mean = 0.0;
            for (const auto& row : values) mean += row[m];
            mean /= static_cast<double>(values.size());
            double var = 0.0;
            for (const auto& row : values) var += (row[m] - mean) * (row[m] - mean);
            spread[m] = std::sqrt(var / static_cast<double>(values.size()));
        }
        std::size_t winner = 0;
        for (std::size_t m = 1; m < k; ++m)
            if (spread[m] > spread[winner]) winner = m;
        ++tally.votes[winner];
        tally.dispersion.push_back(spread);
    }
    tally.cm1 = family_winner(tally.votes, complexity::Family::overlapping);
    tally.cm2 = family_winner(tally.votes, complexity::Family::neighborhood);
    return tally;
}

}  // namespace poolforge
