#pragma once

/// @file dynsel.hpp
/// @brief Dynamic classifier and ensemble selection over a trained pool:
/// OLA, LCA, Rank, KNORA-E and KNORA-U, with plain majority voting (MVR)
/// as the static reference.
///
/// Every method looks at the k validation (DSEL) instances nearest the query
/// and at which pool members classify them correctly.

#include <poolforge/core.hpp>
#include <poolforge/dataset.hpp>
#include <poolforge/diversity.hpp>
#include <poolforge/learner.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace poolforge {

enum class Combiner : std::uint8_t { mvr, ola, lca, rank, knora_e, knora_u };

inline constexpr std::array<Combiner, 6> all_combiners = {Combiner::mvr,  Combiner::ola,     Combiner::lca,
                                                          Combiner::rank, Combiner::knora_e, Combiner::knora_u};

inline std::string to_string(Combiner c) {
    switch (c) {
        case Combiner::mvr: return "mvr";
        case Combiner::ola: return "ola";
        case Combiner::lca: return "lca";
        case Combiner::rank: return "rank";
        case Combiner::knora_e: return "knora-e";
        case Combiner::knora_u: return "knora-u";
    }
    return "?";
}

inline Combiner parse_combiner(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
    std::replace(s.begin(), s.end(), '_', '-');
    for (auto c : all_combiners)
        if (to_string(c) == s) return c;
    throw ArgumentError("unknown combiner '" + s + "' (expected mvr, ola, lca, rank, knora-e or knora-u)");
}

/// The k DSEL instances nearest a query, nearest first (equal distances:
/// lower index first).
struct RegionOfCompetence {
    std::vector<std::size_t> neighbors;
    std::vector<double> distances;

    std::size_t size() const noexcept { return neighbors.size(); }
};

inline RegionOfCompetence region_of_competence(const Dataset& dsel, std::span<const double> query, std::size_t k) {
    if (k < 1 || k > dsel.size())
        throw ArgumentError("k must be in [1, " + std::to_string(dsel.size()) + "], got " + std::to_string(k));
    if (query.size() != dsel.n_features) throw ArgumentError("query has the wrong number of features");
    std::vector<std::pair<double, std::size_t>> d(dsel.size());
    for (std::size_t i = 0; i < dsel.size(); ++i) {
        const auto r = dsel.row(i);
        double s = 0.0;
        for (std::size_t j = 0; j < query.size(); ++j) s += (r[j] - query[j]) * (r[j] - query[j]);
        d[i] = {s, i};
    }
    std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
    RegionOfCompetence roc;
    for (std::size_t r = 0; r < k; ++r) {
        roc.neighbors.push_back(d[r].second);
        roc.distances.push_back(std::sqrt(d[r].first));
    }
    return roc;
}

/// Inputs shared by the selection rules: each member's prediction for the
/// query, member correctness on DSEL, DSEL labels and the region.
struct SelectionContext {
    std::span<const int> predictions;
    const PredictionTable& table;
    std::span<const int> dsel_labels;
    const RegionOfCompetence& region;
    std::size_t num_classes;

    void check() const {
        if (predictions.empty()) throw ArgumentError("dynamic selection over an empty pool");
        if (predictions.size() != table.members()) throw ArgumentError("prediction table does not match the pool");
        if (region.size() == 0) throw ArgumentError("empty region of competence");
    }
};

namespace detail {

inline std::size_t correct_in_region(const SelectionContext& ctx, std::size_t member, std::size_t k) {
    std::size_t c = 0;
    for (std::size_t r = 0; r < k; ++r) c += ctx.table.correct(member, ctx.region.neighbors[r]) ? 1 : 0;
    return c;
}

template <class Competence>
int select_best(const SelectionContext& ctx, Competence&& competence) {
    ctx.check();
    std::size_t best = 0;
    double best_c = competence(0);
    for (std::size_t i = 1; i < ctx.predictions.size(); ++i) {
        const double c = competence(i);
        if (c > best_c) {
            best = i;
            best_c = c;
        }
    }
    return ctx.predictions[best];
}

}  // namespace detail

inline int mvr(const SelectionContext& ctx) {
    ctx.check();
    return plurality(ctx.predictions, ctx.num_classes);
}

/// Overall local accuracy: the member most accurate over the region.
inline int ola(const SelectionContext& ctx) {
    return detail::select_best(ctx, [&](std::size_t i) {
        return static_cast<double>(detail::correct_in_region(ctx, i, ctx.region.size()));
    });
}

/// Local class accuracy: accuracy restricted to neighbors whose true label is
/// the class the member predicts for the query (0 if there are none).
inline int lca(const SelectionContext& ctx) {
    return detail::select_best(ctx, [&](std::size_t i) {
        std::size_t hit = 0, total = 0;
        for (auto nb : ctx.region.neighbors) {
            if (ctx.dsel_labels[nb] != ctx.predictions[i]) continue;
            ++total;
            hit += ctx.table.correct(i, nb) ? 1 : 0;
        }
        return total == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(total);
    });
}

/// Number of consecutive correct neighbors counted from the nearest.
inline std::size_t rank_competence(const SelectionContext& ctx, std::size_t member) {
    std::size_t c = 0;
    while (c < ctx.region.size() && ctx.table.correct(member, ctx.region.neighbors[c])) ++c;
    return c;
}

inline int rank(const SelectionContext& ctx) {
    return detail::select_best(ctx, [&](std::size_t i) { return static_cast<double>(rank_competence(ctx, i)); });
}

/// KNORA-Eliminate: vote among members correct on every neighbor, shrinking
/// the region until someone qualifies; MVR over the pool if nobody ever does.
inline int knora_e(const SelectionContext& ctx) {
    ctx.check();
    for (std::size_t k = ctx.region.size(); k >= 1; --k) {
        std::vector<int> votes;
        for (std::size_t i = 0; i < ctx.predictions.size(); ++i)
            if (detail::correct_in_region(ctx, i, k) == k) votes.push_back(ctx.predictions[i]);
        if (!votes.empty()) return plurality(votes, ctx.num_classes);
    }
    return mvr(ctx);
}

/// KNORA-Union: each member votes for its prediction once per neighbor it
/// classifies correctly.
inline int knora_u(const SelectionContext& ctx) {
    ctx.check();
    std::vector<std::size_t> weight(ctx.num_classes, 0);
    std::size_t total = 0;
    for (std::size_t i = 0; i < ctx.predictions.size(); ++i) {
        const auto w = detail::correct_in_region(ctx, i, ctx.region.size());
        weight[static_cast<std::size_t>(ctx.predictions[i])] += w;
        total += w;
    }
    if (total == 0) return mvr(ctx);
    return static_cast<int>(std::max_element(weight.begin(), weight.end()) - weight.begin());
}

inline int combine(Combiner c, const SelectionContext& ctx) {
    switch (c) {
        case Combiner::mvr: return mvr(ctx);
        case Combiner::ola: return ola(ctx);
        case Combiner::lca: return lca(ctx);
        case Combiner::rank: return rank(ctx);
        case Combiner::knora_e: return knora_e(ctx);
        case Combiner::knora_u: return knora_u(ctx);
    }
    throw ArgumentError("unknown combiner");
}

/// A pool bound to its DSEL set, with member correctness precomputed.
class DynamicSelector {
  public:
    DynamicSelector(const Pool& pool, const Dataset& dsel) : pool_(pool), dsel_(dsel) {
        if (pool.empty()) throw ArgumentError("dynamic selection over an empty pool");
        if (dsel.size() == 0) throw ArgumentError("DSEL set is empty");
        num_classes_ = std::max(pool.members.front().model.num_classes(), dsel.num_classes());
        table_ = PredictionTable(pool.size(), dsel.size());
        for (std::size_t i = 0; i < pool.size(); ++i)
            for (std::size_t j = 0; j < dsel.size(); ++j)
                table_.set(i, j, pool.members[i].model.predict(dsel.row(j)) == dsel.labels[j]);
    }

    const PredictionTable& table() const noexcept { return table_; }

    std::vector<int> member_predictions(std::span<const double> x) const {
        std::vector<int> p(pool_.size());
        for (std::size_t i = 0; i < pool_.size(); ++i) p[i] = pool_.members[i].model.predict(x);
        return p;
    }

    int predict(Combiner c, std::span<const double> x, std::size_t k) const {
        const auto preds = member_predictions(x);
        if (c == Combiner::mvr) return plurality(preds, num_classes_);
        const auto roc = region_of_competence(dsel_, x, k);
        const SelectionContext ctx{preds, table_, dsel_.labels, roc, num_classes_};
        return combine(c, ctx);
    }

    /// Test accuracy of each requested combiner, computed in one pass so the
    /// member predictions and region are shared.
    std::vector<double> accuracy(std::span<const Combiner> combiners, const Dataset& test, std::size_t k) const {
        if (test.size() == 0) throw ArgumentError("test set is empty");
        const std::size_t kk = std::min(k, dsel_.size());
        std::vector<std::size_t> hits(combiners.size(), 0);
        for (std::size_t t = 0; t < test.size(); ++t) {
            const auto x = test.row(t);
            const auto preds = member_predictions(x);
            const auto roc = region_of_competence(dsel_, x, kk);
            const SelectionContext ctx{preds, table_, dsel_.labels, roc, num_classes_};
            for (std::size_t c = 0; c < combiners.size(); ++c)
                hits[c] += combine(combiners[c], ctx) == test.labels[t] ? 1 : 0;
        }
        std::vector<double> acc(combiners.size());
        for (std::size_t c = 0; c < combiners.size(); ++c)
            acc[c] = static_cast<double>(hits[c]) / static_cast<double>(test.size());
        return acc;
    }

  private:
    const Pool& pool_;
    const Dataset& dsel_;
    PredictionTable table_;
    std::size_t num_classes_ = 0;
};

}  // namespace poolforge
