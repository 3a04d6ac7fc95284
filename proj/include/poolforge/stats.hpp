#pragma once

/// @file stats.hpp
/// @brief Wilcoxon signed-rank test and win/tie/loss counting with the
/// sign-test critical level Nc = N/2 + Z * sqrt(N) / 2.

#include <poolforge/core.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

namespace poolforge::stats {

/// |d| values closer than this count as equal when ranking, and |d| at or
/// below it counts as a zero difference.
inline constexpr double tie_tolerance = 1e-12;

/// Largest n for which the exact null distribution is used.
inline constexpr std::size_t exact_max_n = 25;

struct WilcoxonResult {
    double w_plus = 0.0;   // sum of ranks of positive differences (the reported W)
    double w_minus = 0.0;  // sum of ranks of negative differences
    std::size_t n = 0;     // nonzero pairs
    double p_value = 1.0;
    bool exact = true;
    bool significant = false;

    double statistic() const noexcept { return w_plus; }
};

/// Midranks of `values` (1-based), with values within tie_tolerance of their
/// run's first member sharing a rank.
inline std::vector<double> midranks(const std::vector<double>& values, std::vector<std::size_t>* tie_sizes = nullptr) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i + 1;
        while (j < n && values[order[j]] - values[order[i]] <= tie_tolerance) ++j;
        const double r = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t t = i; t < j; ++t) ranks[order[t]] = r;
        if (tie_sizes) tie_sizes->push_back(j - i);
        i = j;
    }
    return ranks;
}

/// Exact null distribution of W+ for the given ranks: entry s is the number
/// of the 2^n sign assignments whose doubled W+ equals s.
inline std::vector<double> signed_rank_counts(const std::vector<double>& ranks) {
    std::vector<std::size_t> doubled(ranks.size());
    std::size_t total = 0;
    for (std::size_t i = 0; i < ranks.size(); ++i) {
        doubled[i] = static_cast<std::size_t>(std::llround(2.0 * ranks[i]));
        total += doubled[i];
    }
    std::vector<double> counts(total + 1, 0.0);
    counts[0] = 1.0;
    std::size_t reach = 0;
    for (auto r : doubled) {
        reach += r;
        for (std::size_t s = reach; s >= r; --s) {
            counts[s] += counts[s - r];
            if (s == r) break;
        }
    }
    return counts;
}

/// Two-sided exact p-value: twice the smaller tail probability at W+, capped at 1.
inline double exact_p_value(const std::vector<double>& ranks, double w_plus) {
    const auto counts = signed_rank_counts(ranks);
    const auto w2 = static_cast<std::size_t>(std::llround(2.0 * w_plus));
    const double all = std::ldexp(1.0, static_cast<int>(ranks.size()));
    double lower = 0.0, upper = 0.0;
    for (std::size_t s = 0; s < counts.size(); ++s) {
        if (s <= w2) lower += counts[s];
        if (s >= w2) upper += counts[s];
    }
    return std::min(1.0, 2.0 * std::min(lower, upper) / all);
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// Two-sided standard normal quantile: Z with P(|N(0,1)| > Z) = alpha.
inline double two_sided_z(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("alpha must be in (0, 1)");
    double lo = 0.0, hi = 40.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (std::erfc(mid / std::sqrt(2.0)) > alpha ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Paired two-sided Wilcoxon signed-rank test of a against b.
inline WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b,
                                           double alpha = 0.05) {
    if (a.size() != b.size()) throw ArgumentError("paired samples differ in length");
    std::vector<double> mag;
    std::vector<bool> positive;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (std::abs(d) <= tie_tolerance) continue;
        mag.push_back(std::abs(d));
        positive.push_back(d > 0.0);
    }
    if (mag.size() < 5) throw ArgumentError("too few nonzero pairs (" + std::to_string(mag.size()) + " < 5)");

    std::vector<std::size_t> ties;
    const auto ranks = midranks(mag, &ties);
    WilcoxonResult r;
    r.n = mag.size();
    for (std::size_t i = 0; i < r.n; ++i) (positive[i] ? r.w_plus : r.w_minus) += ranks[i];

    if (r.n <= exact_max_n) {
        r.exact = true;
        r.p_value = exact_p_value(ranks, r.w_plus);
    } else {
        r.exact = false;
        const double n = static_cast<double>(r.n);
        const double mean = n * (n + 1.0) / 4.0;
        double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0;
        for (auto t : ties) var -= (std::pow(static_cast<double>(t), 3) - static_cast<double>(t)) / 48.0;
        const double z = (r.w_plus - mean) / std::sqrt(var);
        r.p_value = std::min(1.0, 2.0 * normal_cdf(-std::abs(z)));
    }
    r.significant = r.p_value < alpha;
    return r;
}

/// Two-sided critical value of min(W+, W-) for n untied nonzero pairs: the
/// largest T with exact p <= alpha, or -1 when no T qualifies.
inline int wilcoxon_critical_value(std::size_t n, double alpha) {
    std::vector<double> ranks(n);
    std::iota(ranks.begin(), ranks.end(), 1.0);
    int crit = -1;
    const int max_w = static_cast<int>(n * (n + 1) / 2);
    for (int t = 0; t <= max_w / 2; ++t) {
        if (exact_p_value(ranks, t) <= alpha)
            crit = t;
        else
            break;
    }
    return crit;
}

// --- win / tie / loss ----------------------------------------------------------

/// Nc values printed in the original study for 28 experiments at
/// alpha = 0.1, 0.05, 0.01. Not reproducible from standard Z quantiles;
/// kept as reference constants.
inline const std::map<double, double>& published_nc() {
    static const std::map<double, double> m = {{0.1, 18.9}, {0.05, 20.3}, {0.01, 23.2}};
    return m;
}

inline const std::vector<double>& default_alphas() {
    static const std::vector<double> a = {0.1, 0.05, 0.01};
    return a;
}

/// Z used for the three standard levels (two-sided quantiles rounded as
/// usually tabulated); other levels are computed.
inline double z_for_alpha(double alpha) {
    if (alpha == 0.1) return 1.645;
    if (alpha == 0.05) return 1.960;
    if (alpha == 0.01) return 2.576;
    return two_sided_z(alpha);
}

inline double critical_count(std::size_t n_exp, double alpha) {
    const double n = static_cast<double>(n_exp);
    return n / 2.0 + z_for_alpha(alpha) * std::sqrt(n) / 2.0;
}

struct WtlTally {
    std::size_t wins = 0;
    std::size_t ties = 0;
    std::size_t losses = 0;
    std::size_t n_exp = 0;
    std::map<double, double> nc;           // computed from Z
    std::map<double, double> nc_published; // reference constants

    double score() const noexcept { return static_cast<double>(wins) + static_cast<double>(ties) / 2.0; }
    bool significant(double alpha) const { return score() > nc.at(alpha); }
    bool significant_published(double alpha) const { return score() > nc_published.at(alpha); }
};

/// Compare per-experiment mean accuracies: a win when a - b > eps, a loss
/// when a - b < -eps, a tie otherwise.
inline WtlTally win_tie_loss(const std::vector<double>& a, const std::vector<double>& b, double tie_epsilon = 0.0,
                             const std::vector<double>& alphas = default_alphas()) {
    if (a.size() != b.size()) throw ArgumentError("result lists differ in length");
    if (tie_epsilon < 0.0) throw ArgumentError("tie epsilon must be non-negative");
    WtlTally t;
    t.n_exp = a.size();
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (d > tie_epsilon)
            ++t.wins;
        else if (d < -tie_epsilon)
            ++t.losses;
        else
            ++t.ties;
    }
    for (double al : alphas) t.nc[al] = critical_count(t.n_exp, al);
    t.nc_published = published_nc();
    return t;
}

inline double mean(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

/// Sample standard deviation (n - 1 denominator); 0 for fewer than 2 values.
inline double stddev(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace poolforge::stats
