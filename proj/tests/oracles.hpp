#pragma once

/// @file oracles.hpp
/// @brief Slow, direct reference implementations used to cross-check the
/// library. Written against plain vectors and sharing no code with the
/// measures they check.

#include <poolforge/core.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <vector>

namespace oracle {

struct Data {
    std::vector<std::vector<double>> x;
    std::vector<int> y;

    std::size_t n() const { return x.size(); }
    std::size_t f() const { return x.empty() ? 0 : x[0].size(); }
};

inline double dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return std::sqrt(s);
}

inline std::vector<std::pair<int, int>> pairs_of(const Data& d) {
    std::set<int> cls(d.y.begin(), d.y.end());
    std::vector<int> c(cls.begin(), cls.end());
    std::vector<std::pair<int, int>> out;
    for (std::size_t i = 0; i < c.size(); ++i)
        for (std::size_t j = i + 1; j < c.size(); ++j) out.emplace_back(c[i], c[j]);
    return out;
}

inline std::vector<std::size_t> of_class(const Data& d, int c) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < d.n(); ++i)
        if (d.y[i] == c) out.push_back(i);
    return out;
}

inline double guarded(double num, double den) { return num == 0.0 ? 0.0 : num / std::max(den, 1e-12); }

inline double f1(const Data& d) {
    double total = 0.0;
    const auto ps = pairs_of(d);
    for (auto [p, q] : ps) {
        double best = 0.0;
        for (std::size_t k = 0; k < d.f(); ++k) {
            double sa = 0, sb = 0, na = 0, nb = 0;
            for (std::size_t i = 0; i < d.n(); ++i) {
                if (d.y[i] == p) sa += d.x[i][k], na += 1;
                if (d.y[i] == q) sb += d.x[i][k], nb += 1;
            }
            const double ma = sa / na, mb = sb / nb;
            double va = 0, vb = 0;
            for (std::size_t i = 0; i < d.n(); ++i) {
                if (d.y[i] == p) va += (d.x[i][k] - ma) * (d.x[i][k] - ma);
                if (d.y[i] == q) vb += (d.x[i][k] - mb) * (d.x[i][k] - mb);
            }
            best = std::max(best, guarded((ma - mb) * (ma - mb), va / na + vb / nb));
        }
        total += 1.0 / (1.0 + best);
    }
    return total / static_cast<double>(ps.size());
}

/// Solve A x = b by Gaussian elimination with partial pivoting.
inline std::vector<double> solve(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        std::swap(a[c], a[piv]);
        std::swap(b[c], b[piv]);
        for (std::size_t r = c + 1; r < n; ++r) {
            const double m = a[r][c] / a[c][c];
            for (std::size_t k = c; k < n; ++k) a[r][k] -= m * a[c][k];
            b[r] -= m * b[c];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
        x[i] = s / a[i][i];
    }
    return x;
}

/// For nonsingular within-class scatter W the directional Fisher ratio along
/// W^-1 delta equals delta' W^-1 delta.
inline double f1v(const Data& d) {
    double total = 0.0;
    const auto ps = pairs_of(d);
    const std::size_t f = d.f();
    for (auto [p, q] : ps) {
        std::vector<std::vector<double>> w(f, std::vector<double>(f, 0.0));
        std::vector<double> delta(f, 0.0);
        for (int c : {p, q}) {
            const auto idx = of_class(d, c);
            std::vector<double> mean(f, 0.0);
            for (auto i : idx)
                for (std::size_t k = 0; k < f; ++k) mean[k] += d.x[i][k] / static_cast<double>(idx.size());
            for (auto i : idx)
                for (std::size_t r = 0; r < f; ++r)
                    for (std::size_t s = 0; s < f; ++s)
                        w[r][s] += (d.x[i][r] - mean[r]) * (d.x[i][s] - mean[s]) / static_cast<double>(idx.size());
            for (std::size_t k = 0; k < f; ++k) delta[k] += c == p ? mean[k] : -mean[k];
        }
        const auto z = solve(w, delta);
        double r = 0.0;
        for (std::size_t k = 0; k < f; ++k) r += delta[k] * z[k];
        total += 1.0 / (1.0 + r);
    }
    return total / static_cast<double>(ps.size());
}

inline double f2(const Data& d) {
    double total = 0.0;
    const auto ps = pairs_of(d);
    for (auto [p, q] : ps) {
        double prod = 1.0;
        for (std::size_t k = 0; k < d.f(); ++k) {
            double mina = 1e300, maxa = -1e300, minb = 1e300, maxb = -1e300;
            for (std::size_t i = 0; i < d.n(); ++i) {
                if (d.y[i] == p) mina = std::min(mina, d.x[i][k]), maxa = std::max(maxa, d.x[i][k]);
                if (d.y[i] == q) minb = std::min(minb, d.x[i][k]), maxb = std::max(maxb, d.x[i][k]);
            }
            const double overlap = std::min(maxa, maxb) - std::max(mina, minb);
            const double range = std::max(maxa, maxb) - std::min(mina, minb);
            if (range == 0.0) continue;
            prod *= overlap > 0.0 ? overlap / range : 0.0;
        }
        total += prod;
    }
    return total / static_cast<double>(ps.size());
}

// overlap interval of feature k restricted to the instances in `alive`
inline bool in_overlap(const Data& d, const std::vector<std::size_t>& alive, int p, int q, std::size_t k,
                       std::size_t i) {
    double mina = 1e300, maxa = -1e300, minb = 1e300, maxb = -1e300;
    for (auto t : alive) {
        if (d.y[t] == p) mina = std::min(mina, d.x[t][k]), maxa = std::max(maxa, d.x[t][k]);
        if (d.y[t] == q) minb = std::min(minb, d.x[t][k]), maxb = std::max(maxb, d.x[t][k]);
    }
    const double lo = std::max(mina, minb), hi = std::min(maxa, maxb);
    return d.x[i][k] >= lo && d.x[i][k] <= hi;
}

inline double f3(const Data& d) {
    double total = 0.0;
    const auto ps = pairs_of(d);
    for (auto [p, q] : ps) {
        std::vector<std::size_t> alive;
        for (std::size_t i = 0; i < d.n(); ++i)
            if (d.y[i] == p || d.y[i] == q) alive.push_back(i);
        double best = 1.0;
        for (std::size_t k = 0; k < d.f(); ++k) {
            double c = 0;
            for (auto i : alive) c += in_overlap(d, alive, p, q, k, i) ? 1 : 0;
            best = std::min(best, c / static_cast<double>(alive.size()));
        }
        total += best;
    }
    return total / static_cast<double>(ps.size());
}

inline double f4(const Data& d) {
    double total = 0.0;
    const auto ps = pairs_of(d);
    for (auto [p, q] : ps) {
        std::vector<std::size_t> alive;
        for (std::size_t i = 0; i < d.n(); ++i)
            if (d.y[i] == p || d.y[i] == q) alive.push_back(i);
        const double n0 = static_cast<double>(alive.size());
        std::vector<std::size_t> features;
        for (std::size_t k = 0; k < d.f(); ++k) features.push_back(k);
        double value = -1.0;
        while (!features.empty()) {
            bool has_p = false, has_q = false;
            for (auto i : alive) (d.y[i] == p ? has_p : has_q) = true;
            if (!has_p || !has_q) {
                value = 0.0;
                break;
            }
            std::size_t pick = 0, pick_count = SIZE_MAX;
            for (std::size_t t = 0; t < features.size(); ++t) {
                std::size_t c = 0;
                for (auto i : alive) c += in_overlap(d, alive, p, q, features[t], i) ? 1 : 0;
                if (c < pick_count) pick = t, pick_count = c;
            }
            if (pick_count == alive.size()) break;
            std::vector<std::size_t> next;
            for (auto i : alive)
                if (in_overlap(d, alive, p, q, features[pick], i)) next.push_back(i);
            alive = next;
            features.erase(features.begin() + static_cast<std::ptrdiff_t>(pick));
        }
        if (value < 0.0) {
            bool has_p = false, has_q = false;
            for (auto i : alive) (d.y[i] == p ? has_p : has_q) = true;
            value = (has_p && has_q) ? static_cast<double>(alive.size()) / n0 : 0.0;
        }
        total += value;
    }
    return total / static_cast<double>(ps.size());
}

/// N1 via Prim's algorithm (distinct distances assumed).
inline double n1(const Data& d) {
    const std::size_t n = d.n();
    std::vector<bool> in(n, false);
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    std::vector<std::size_t> from(n, 0);
    std::set<std::size_t> border;
    best[0] = 0.0;
    for (std::size_t step = 0; step < n; ++step) {
        std::size_t u = n;
        for (std::size_t v = 0; v < n; ++v)
            if (!in[v] && (u == n || best[v] < best[u])) u = v;
        in[u] = true;
        if (step > 0 && d.y[u] != d.y[from[u]]) {
            border.insert(u);
            border.insert(from[u]);
        }
        for (std::size_t v = 0; v < n; ++v) {
            if (in[v]) continue;
            const double w = dist(d.x[u], d.x[v]);
            if (w < best[v]) best[v] = w, from[v] = u;
        }
    }
    return static_cast<double>(border.size()) / static_cast<double>(n);
}

inline double n2(const Data& d) {
    double intra = 0.0, extra = 0.0;
    for (std::size_t i = 0; i < d.n(); ++i) {
        std::vector<double> same, other;
        for (std::size_t j = 0; j < d.n(); ++j) {
            if (j == i) continue;
            (d.y[j] == d.y[i] ? same : other).push_back(dist(d.x[i], d.x[j]));
        }
        if (same.empty()) continue;
        intra += *std::min_element(same.begin(), same.end());
        extra += *std::min_element(other.begin(), other.end());
    }
    const double r = guarded(intra, extra);
    return r / (1.0 + r);
}

inline double n3(const Data& d) {
    double err = 0.0;
    for (std::size_t i = 0; i < d.n(); ++i) {
        double bd = std::numeric_limits<double>::infinity();
        int lab = -1;
        for (std::size_t j = 0; j < d.n(); ++j) {
            if (j == i) continue;
            const double t = dist(d.x[i], d.x[j]);
            if (t < bd) bd = t, lab = d.y[j];
        }
        err += lab != d.y[i] ? 1.0 : 0.0;
    }
    return err / static_cast<double>(d.n());
}

/// Same sampling protocol as the library (anchor, same-class partner, t),
/// drawn from the same seeded stream.
inline double n4(const Data& d, std::uint64_t seed) {
    poolforge::Rng rng(seed);
    std::map<int, std::vector<std::size_t>> by;
    for (std::size_t i = 0; i < d.n(); ++i) by[d.y[i]].push_back(i);
    double err = 0.0;
    for (std::size_t s = 0; s < d.n(); ++s) {
        const std::size_t a = rng.index(d.n());
        const auto& same = by[d.y[a]];
        const std::size_t b = same[rng.index(same.size())];
        const double t = rng.uniform01();
        std::vector<double> z(d.f());
        for (std::size_t k = 0; k < d.f(); ++k) z[k] = d.x[a][k] + t * (d.x[b][k] - d.x[a][k]);
        double bd = std::numeric_limits<double>::infinity();
        int lab = -1;
        for (std::size_t j = 0; j < d.n(); ++j) {
            const double u = dist(z, d.x[j]);
            if (u < bd) bd = u, lab = d.y[j];
        }
        err += lab != d.y[a] ? 1.0 : 0.0;
    }
    return err / static_cast<double>(d.n());
}

inline std::vector<double> enemy_radii(const Data& d) {
    std::vector<double> r(d.n(), std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < d.n(); ++i)
        for (std::size_t j = 0; j < d.n(); ++j)
            if (d.y[i] != d.y[j]) r[i] = std::min(r[i], dist(d.x[i], d.x[j]));
    return r;
}

/// A sphere survives unless a same-class sphere that is larger (or equally
/// large with a lower index) contains it.
inline double t1(const Data& d) {
    const auto r = enemy_radii(d);
    double survivors = 0.0;
    for (std::size_t i = 0; i < d.n(); ++i) {
        bool absorbed = false;
        for (std::size_t j = 0; j < d.n(); ++j) {
            if (j == i || d.y[j] != d.y[i]) continue;
            const bool larger = r[j] > r[i] || (r[j] == r[i] && j < i);
            if (larger && dist(d.x[i], d.x[j]) + r[i] <= r[j] + 1e-12 * std::max(1.0, r[j])) absorbed = true;
        }
        survivors += absorbed ? 0.0 : 1.0;
    }
    return survivors / static_cast<double>(d.n());
}

inline double lsc(const Data& d) {
    const auto r = enemy_radii(d);
    double sum = 0.0;
    for (std::size_t i = 0; i < d.n(); ++i)
        for (std::size_t j = 0; j < d.n(); ++j)
            if (j != i && dist(d.x[i], d.x[j]) < r[i]) sum += 1.0;
    const double n = static_cast<double>(d.n());
    return 1.0 - sum / (n * n);
}

// --- other oracles ----------------------------------------------------------------

/// Indices not dominated by any other row (all objectives minimised).
inline std::vector<std::size_t> pareto_front(const std::vector<std::vector<double>>& obj) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < obj.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < obj.size() && !dominated; ++j) {
            if (j == i) continue;
            bool no_worse = true, better = false;
            for (std::size_t k = 0; k < obj[i].size(); ++k) {
                if (obj[j][k] > obj[i][k]) no_worse = false;
                if (obj[j][k] < obj[i][k]) better = true;
            }
            dominated = no_worse && better;
        }
        if (!dominated) out.push_back(i);
    }
    return out;
}

/// Exact two-sided Wilcoxon p-value for untied ranks 1..n by enumerating all
/// 2^n sign assignments.
inline double wilcoxon_p_enumerated(std::size_t n, long w_plus) {
    std::vector<long> sums(std::size_t{1} << n);
    // sums[mask] = sum of ranks with a positive sign; built incrementally
    sums[0] = 0;
    for (std::size_t mask = 1; mask < sums.size(); ++mask) {
        const std::size_t low = mask & (~mask + 1);
        const auto bit = static_cast<std::size_t>(__builtin_ctzll(low));
        sums[mask] = sums[mask ^ low] + static_cast<long>(bit + 1);
    }
    double lower = 0, upper = 0;
    for (long s : sums) {
        if (s <= w_plus) lower += 1;
        if (s >= w_plus) upper += 1;
    }
    return std::min(1.0, 2.0 * std::min(lower, upper) / static_cast<double>(sums.size()));
}

}  // namespace oracle
