#pragma once

/// @file nsga2.hpp
/// @brief Fast non-dominated sorting, crowding distance and elitist
/// truncation. All objectives are minimised; negate the ones to maximise.

#include <poolforge/core.hpp>

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

namespace poolforge::nsga2 {

/// Objective vectors, one row per individual, every row the same length.
using ObjectiveMatrix = std::vector<std::vector<double>>;

/// a dominates b: no worse in every objective and strictly better in one.
inline bool dominates(const std::vector<double>& a, const std::vector<double>& b) {
    bool strictly = false;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k] > b[k]) return false;
        if (a[k] < b[k]) strictly = true;
    }
    return strictly;
}

/// Pareto fronts in order; members of each front in ascending index order.
inline std::vector<std::vector<std::size_t>> non_dominated_sort(const ObjectiveMatrix& obj) {
    const std::size_t n = obj.size();
    std::vector<std::vector<std::size_t>> dominated_by(n);
    std::vector<std::size_t> dom_count(n, 0);
    std::vector<std::vector<std::size_t>> fronts(1);
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
            if (dominates(obj[p], obj[q])) {
                dominated_by[p].push_back(q);
                ++dom_count[q];
            } else if (dominates(obj[q], obj[p])) {
                dominated_by[q].push_back(p);
                ++dom_count[p];
            }
        }
    }
    for (std::size_t p = 0; p < n; ++p)
        if (dom_count[p] == 0) fronts[0].push_back(p);
    while (!fronts.back().empty()) {
        std::vector<std::size_t> next;
        for (std::size_t p : fronts.back())
            for (std::size_t q : dominated_by[p])
                if (--dom_count[q] == 0) next.push_back(q);
        std::sort(next.begin(), next.end());
        fronts.push_back(std::move(next));
    }
    fronts.pop_back();
    return fronts;
}

/// Crowding distance of each member of `front` (same order as `front`).
/// Boundary solutions of every objective get +infinity.
inline std::vector<double> crowding_distance(const ObjectiveMatrix& obj, const std::vector<std::size_t>& front) {
    const std::size_t n = front.size();
    std::vector<double> dist(n, 0.0);
    if (n == 0) return dist;
    const std::size_t k = obj[front[0]].size();
    std::vector<std::size_t> order(n);
    for (std::size_t m = 0; m < k; ++m) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return obj[front[a]][m] < obj[front[b]][m]; });
        const double lo = obj[front[order.front()]][m];
        const double hi = obj[front[order.back()]][m];
        dist[order.front()] = std::numeric_limits<double>::infinity();
        dist[order.back()] = std::numeric_limits<double>::infinity();
        if (hi - lo <= 0.0) continue;
        for (std::size_t r = 1; r + 1 < n; ++r)
            dist[order[r]] += (obj[front[order[r + 1]]][m] - obj[front[order[r - 1]]][m]) / (hi - lo);
    }
    return dist;
}

/// Elitist survivor selection: take whole fronts while they fit, then fill
/// from the next front by descending crowding distance (lower index first on
/// ties). Returns `mu` indices into `obj`.
inline std::vector<std::size_t> select(const ObjectiveMatrix& obj, std::size_t mu) {
    if (mu > obj.size()) throw ArgumentError("nsga2 select: mu exceeds the number of candidates");
    std::vector<std::size_t> chosen;
    chosen.reserve(mu);
    for (const auto& front : non_dominated_sort(obj)) {
        if (chosen.size() == mu) break;
        if (chosen.size() + front.size() <= mu) {
            chosen.insert(chosen.end(), front.begin(), front.end());
            continue;
        }
        const auto crowd = crowding_distance(obj, front);
        std::vector<std::size_t> order(front.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return crowd[a] > crowd[b]; });
        for (std::size_t r = 0; chosen.size() < mu; ++r) chosen.push_back(front[order[r]]);
    }
    return chosen;
}

}  // namespace poolforge::nsga2
