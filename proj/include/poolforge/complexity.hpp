#pragma once

/// @file complexity.hpp
/// @brief Overlapping (F1, F1v, F2, F3, F4) and neighborhood (N1, N2, N3, N4,
/// T1, LSC) data-complexity measures.
///
/// Every measure returns a value in [0, 1] where higher means harder. Ratio
/// style measures are bounded: F1 and F1v report 1/(1+r), N2 reports
/// r/(1+r). Multiclass inputs are decomposed one-vs-one for the overlapping
/// family and the per-pair values averaged. Distances are Euclidean and all
/// ties are broken towards the lowest index, so results are reproducible.

#include <poolforge/core.hpp>
#include <poolforge/dataset.hpp>

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace poolforge::complexity {

enum class Measure : std::uint8_t { F1, F1v, F2, F3, F4, N1, N2, N3, N4, T1, LSC };
enum class Family : std::uint8_t { overlapping, neighborhood };

/// Canonical order; also the tie-break order used by metric voting.
inline constexpr std::array<Measure, 11> all_measures = {Measure::F1, Measure::F1v, Measure::F2, Measure::F3,
                                                         Measure::F4, Measure::N1,  Measure::N2, Measure::N3,
                                                         Measure::N4, Measure::T1,  Measure::LSC};

constexpr Family family(Measure m) noexcept {
    return m <= Measure::F4 ? Family::overlapping : Family::neighborhood;
}

constexpr const char* code(Measure m) noexcept {
    constexpr std::array<const char*, 11> names = {"F1", "F1v", "F2", "F3", "F4", "N1",
                                                   "N2", "N3",  "N4", "T1", "LSC"};
    return names[static_cast<std::size_t>(m)];
}

inline Measure parse_measure(const std::string& s) {
    for (Measure m : all_measures) {
        std::string c = code(m);
        if (c.size() != s.size()) continue;
        bool eq = true;
        for (std::size_t i = 0; i < c.size(); ++i)
            eq = eq && std::tolower(static_cast<unsigned char>(c[i])) == std::tolower(static_cast<unsigned char>(s[i]));
        if (eq) return m;
    }
    throw ArgumentError("unknown complexity measure '" + s + "'");
}

inline constexpr double epsilon = 1e-12;

/// Symmetric matrix of pairwise Euclidean distances.
class DistanceMatrix {
  public:
    explicit DistanceMatrix(const Dataset& d) : n_(d.size()), dist_(n_ * n_, 0.0) {
        for (std::size_t i = 0; i < n_; ++i) {
            auto a = d.row(i);
            for (std::size_t j = i + 1; j < n_; ++j) {
                auto b = d.row(j);
                double s = 0.0;
                for (std::size_t k = 0; k < a.size(); ++k) {
                    const double t = a[k] - b[k];
                    s += t * t;
                }
                const double v = std::sqrt(s);
                dist_[i * n_ + j] = v;
                dist_[j * n_ + i] = v;
            }
        }
    }
    std::size_t size() const noexcept { return n_; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return dist_[i * n_ + j]; }

  private:
    std::size_t n_;
    std::vector<double> dist_;
};

namespace detail {

inline void require_measurable(const Dataset& d) {
    if (d.size() < 2) throw DataError("complexity measures need at least 2 instances");
    if (d.classes_present() < 2) throw DataError("complexity measures need at least 2 classes (single-class input)");
}

struct ClassPair {
    std::vector<std::size_t> a;
    std::vector<std::size_t> b;
};

// One-vs-one decomposition over the classes present.
inline std::vector<ClassPair> class_pairs(const Dataset& d) {
    std::vector<std::vector<std::size_t>> members(d.num_classes());
    for (std::size_t i = 0; i < d.size(); ++i) members[static_cast<std::size_t>(d.labels[i])].push_back(i);
    std::vector<ClassPair> out;
    for (std::size_t p = 0; p < members.size(); ++p) {
        if (members[p].empty()) continue;
        for (std::size_t q = p + 1; q < members.size(); ++q) {
            if (members[q].empty()) continue;
            out.push_back({members[p], members[q]});
        }
    }
    return out;
}

template <typename PairFn>
double ovo_mean(const Dataset& d, PairFn&& fn) {
    const auto pairs = class_pairs(d);
    double sum = 0.0;
    for (const auto& p : pairs) sum += fn(p);
    return sum / static_cast<double>(pairs.size());
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
};

inline double bounded_ratio(double num, double den) { return num == 0.0 ? 0.0 : num / std::max(den, epsilon); }

// Overlap interval [max of minima, min of maxima] of one feature over the
// listed instances of two classes; empty when lo > hi.
inline std::pair<double, double> overlap_region(const Dataset& d, std::size_t j, const std::vector<std::size_t>& a,
                                                const std::vector<std::size_t>& b) {
    Range ra, rb;
    for (auto i : a) ra.add(d.at(i, j));
    for (auto i : b) rb.add(d.at(i, j));
    return {std::max(ra.lo, rb.lo), std::min(ra.hi, rb.hi)};
}

}  // namespace detail

/// Maximum Fisher's discriminant ratio, reported as 1/(1+max_j r_j) with
/// r_j = (mu_a - mu_b)^2 / (var_a + var_b) (population variances).
inline double f1(const Dataset& d) {
    detail::require_measurable(d);
    return detail::ovo_mean(d, [&](const detail::ClassPair& p) {
        double best = 0.0;
        for (std::size_t j = 0; j < d.n_features; ++j) {
            auto moments = [&](const std::vector<std::size_t>& idx) {
                double mean = 0.0;
                for (auto i : idx) mean += d.at(i, j);
                mean /= static_cast<double>(idx.size());
                double var = 0.0;
                for (auto i : idx) var += (d.at(i, j) - mean) * (d.at(i, j) - mean);
                return std::pair{mean, var / static_cast<double>(idx.size())};
            };
            auto [ma, va] = moments(p.a);
            auto [mb, vb] = moments(p.b);
            best = std::max(best, detail::bounded_ratio((ma - mb) * (ma - mb), va + vb));
        }
        return 1.0 / (1.0 + best);
    });
}

/// Directional-vector Fisher ratio. The projection direction is
/// pinv(S_a + S_b) (mu_a - mu_b) where S_c are population covariance
/// matrices; the ratio along it is mapped to 1/(1+r).
inline double f1v(const Dataset& d) {
    detail::require_measurable(d);
    const auto f = static_cast<Eigen::Index>(d.n_features);
    return detail::ovo_mean(d, [&](const detail::ClassPair& p) {
        auto stats = [&](const std::vector<std::size_t>& idx) {
            Eigen::VectorXd mean = Eigen::VectorXd::Zero(f);
            for (auto i : idx) mean += Eigen::Map<const Eigen::VectorXd>(d.row(i).data(), f);
            mean /= static_cast<double>(idx.size());
            Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(f, f);
            for (auto i : idx) {
                Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(d.row(i).data(), f) - mean;
                cov.noalias() += c * c.transpose();
            }
            cov /= static_cast<double>(idx.size());
            return std::pair{mean, cov};
        };
        auto [ma, sa] = stats(p.a);
        auto [mb, sb] = stats(p.b);
        const Eigen::VectorXd delta = ma - mb;
        const Eigen::MatrixXd within = sa + sb;
        Eigen::VectorXd dir = within.completeOrthogonalDecomposition().pseudoInverse() * delta;
        // the part of delta in the null space of the scatter separates perfectly
        const Eigen::VectorXd unseen = delta - within * dir;
        if (unseen.allFinite() && unseen.norm() > 1e-9 * std::max(1.0, delta.norm()))
            dir = unseen;
        else if (!dir.allFinite() || dir.squaredNorm() == 0.0)
            dir = delta;
        const double proj = dir.dot(delta);
        const double r = detail::bounded_ratio(proj * proj, dir.dot(within * dir));
        return 1.0 / (1.0 + r);
    });
}

/// Volume of the overlap region: product over features of the overlap
/// interval width divided by the joint range. A constant feature counts
/// as full overlap.
inline double f2(const Dataset& d) {
    detail::require_measurable(d);
    return detail::ovo_mean(d, [&](const detail::ClassPair& p) {
        double prod = 1.0;
        for (std::size_t j = 0; j < d.n_features; ++j) {
            detail::Range ra, rb;
            for (auto i : p.a) ra.add(d.at(i, j));
            for (auto i : p.b) rb.add(d.at(i, j));
            const double span = std::max(ra.hi, rb.hi) - std::min(ra.lo, rb.lo);
            if (span <= 0.0) continue;
            const double width = std::min(ra.hi, rb.hi) - std::max(ra.lo, rb.lo);
            prod *= std::max(0.0, width) / span;
        }
        return prod;
    });
}

/// Feature efficiency: over features, the smallest fraction of instances
/// lying inside that feature's overlap region (boundaries inclusive).
inline double f3(const Dataset& d) {
    detail::require_measurable(d);
    return detail::ovo_mean(d, [&](const detail::ClassPair& p) {
        const double n = static_cast<double>(p.a.size() + p.b.size());
        std::size_t best = p.a.size() + p.b.size();
        for (std::size_t j = 0; j < d.n_features; ++j) {
            auto [lo, hi] = detail::overlap_region(d, j, p.a, p.b);
            std::size_t count = 0;
            if (lo <= hi) {
                for (auto i : p.a) count += (d.at(i, j) >= lo && d.at(i, j) <= hi) ? 1 : 0;
                for (auto i : p.b) count += (d.at(i, j) >= lo && d.at(i, j) <= hi) ? 1 : 0;
            }
            best = std::min(best, count);
        }
        return static_cast<double>(best) / n;
    });
}

/// Collective feature efficiency, reported as the fraction of instances
/// that no feature manages to separate. Each round picks the feature with
/// the fewest instances in its overlap region (lowest index on ties),
/// discards the instances outside that region, and retires the feature.
inline double f4(const Dataset& d) {
    detail::require_measurable(d);
    return detail::ovo_mean(d, [&](const detail::ClassPair& p) {
        const double n = static_cast<double>(p.a.size() + p.b.size());
        std::vector<std::size_t> a = p.a, b = p.b;
        std::vector<bool> used(d.n_features, false);
        for (std::size_t round = 0; round < d.n_features; ++round) {
            if (a.empty() || b.empty()) return 0.0;
            std::optional<std::size_t> best;
            std::size_t best_count = 0;
            for (std::size_t j = 0; j < d.n_features; ++j) {
                if (used[j]) continue;
                auto [lo, hi] = detail::overlap_region(d, j, a, b);
                std::size_t count = 0;
                if (lo <= hi) {
                    for (auto i : a) count += (d.at(i, j) >= lo && d.at(i, j) <= hi) ? 1 : 0;
                    for (auto i : b) count += (d.at(i, j) >= lo && d.at(i, j) <= hi) ? 1 : 0;
                }
                if (!best || count < best_count) {
                    best = j;
                    best_count = count;
                }
            }
            const std::size_t j = *best;
            used[j] = true;
            if (best_count == a.size() + b.size()) break;  // no feature separates anything more
            auto [lo, hi] = detail::overlap_region(d, j, a, b);
            auto keep = [&](std::vector<std::size_t>& v) {
                std::erase_if(v, [&](std::size_t i) { return !(lo <= hi && d.at(i, j) >= lo && d.at(i, j) <= hi); });
            };
            keep(a);
            keep(b);
        }
        if (a.empty() || b.empty()) return 0.0;
        return static_cast<double>(a.size() + b.size()) / n;
    });
}

/// Fraction of borderline points: vertices incident to a minimum-spanning-tree
/// edge joining different classes. Kruskal with edges ordered by
/// (weight, i, j).
inline double n1(const Dataset& d, const DistanceMatrix& dm) {
    detail::require_measurable(d);
    const std::size_t n = d.size();
    struct Edge {
        double w;
        std::uint32_t i, j;
    };
    std::vector<Edge> edges;
    edges.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            edges.push_back({dm(i, j), static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
    std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
        if (x.w != y.w) return x.w < y.w;
        if (x.i != y.i) return x.i < y.i;
        return x.j < y.j;
    });
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    std::vector<bool> border(n, false);
    std::size_t joined = 0;
    for (const auto& e : edges) {
        const auto ri = find(e.i), rj = find(e.j);
        if (ri == rj) continue;
        parent[ri] = rj;
        if (d.labels[e.i] != d.labels[e.j]) border[e.i] = border[e.j] = true;
        if (++joined == n - 1) break;
    }
    return static_cast<double>(std::count(border.begin(), border.end(), true)) / static_cast<double>(n);
}

/// Ratio of summed intra-class to summed extra-class nearest-neighbour
/// distances, reported as r/(1+r). Instances that are alone in their class
/// have no intra-class neighbour and are left out of both sums.
inline double n2(const Dataset& d, const DistanceMatrix& dm) {
    detail::require_measurable(d);
    const std::size_t n = d.size();
    double intra = 0.0, extra = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double near_same = std::numeric_limits<double>::infinity();
        double near_other = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            if (d.labels[j] == d.labels[i]) {
                near_same = std::min(near_same, dm(i, j));
            } else {
                near_other = std::min(near_other, dm(i, j));
            }
        }
        if (!std::isfinite(near_same)) continue;
        intra += near_same;
        extra += near_other;
    }
    const double r = detail::bounded_ratio(intra, extra);
    return r / (1.0 + r);
}

/// Leave-one-out 1-NN error rate.
inline double n3(const Dataset& d, const DistanceMatrix& dm) {
    detail::require_measurable(d);
    const std::size_t n = d.size();
    std::size_t errors = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t best = i == 0 ? 1 : 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            if (dm(i, j) < dm(i, best)) best = j;
        }
        errors += d.labels[best] != d.labels[i] ? 1 : 0;
    }
    return static_cast<double>(errors) / static_cast<double>(n);
}

/// Non-linearity of the 1-NN classifier. Builds n synthetic points, each by
/// picking an anchor instance uniformly, a same-class partner uniformly
/// (possibly the anchor itself) and interpolating at t ~ U[0,1]; returns the
/// 1-NN error of those points against the original instances.
inline double n4(const Dataset& d, std::uint64_t seed) {
    detail::require_measurable(d);
    const std::size_t n = d.size();
    const std::size_t f = d.n_features;
    std::vector<std::vector<std::size_t>> members(d.num_classes());
    for (std::size_t i = 0; i < n; ++i) members[static_cast<std::size_t>(d.labels[i])].push_back(i);
    Rng rng(seed);
    std::vector<double> point(f);
    std::size_t errors = 0;
    for (std::size_t s = 0; s < n; ++s) {
        const std::size_t anchor = rng.index(n);
        const auto& same = members[static_cast<std::size_t>(d.labels[anchor])];
        const std::size_t partner = same[rng.index(same.size())];
        const double t = rng.uniform01();
        auto xa = d.row(anchor);
        auto xb = d.row(partner);
        for (std::size_t k = 0; k < f; ++k) point[k] = xa[k] + t * (xb[k] - xa[k]);
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            auto xj = d.row(j);
            double sq = 0.0;
            for (std::size_t k = 0; k < f; ++k) sq += (point[k] - xj[k]) * (point[k] - xj[k]);
            const double dist = std::sqrt(sq);
            if (dist < best_d) {
                best_d = dist;
                best = j;
            }
        }
        errors += d.labels[best] != d.labels[anchor] ? 1 : 0;
    }
    return static_cast<double>(errors) / static_cast<double>(n);
}

namespace detail {

inline std::vector<double> enemy_radius(const Dataset& d, const DistanceMatrix& dm) {
    const std::size_t n = d.size();
    std::vector<double> r(n, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (d.labels[j] != d.labels[i]) r[i] = std::min(r[i], dm(i, j));
    return r;
}

}  // namespace detail

/// Fraction of hyperspheres covering the data. Each instance gets a sphere
/// reaching its nearest enemy; a sphere fully inside a larger (or equal and
/// lower-indexed) same-class sphere is absorbed. Returns survivors / n.
inline double t1(const Dataset& d, const DistanceMatrix& dm) {
    detail::require_measurable(d);
    const std::size_t n = d.size();
    const auto radius = detail::enemy_radius(d, dm);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        if (radius[x] != radius[y]) return radius[x] > radius[y];
        return x < y;
    });
    std::size_t survivors = 0;
    for (std::size_t pos = 0; pos < n; ++pos) {
        const std::size_t i = order[pos];
        bool absorbed = false;
        for (std::size_t q = 0; q < pos && !absorbed; ++q) {
            const std::size_t j = order[q];
            if (d.labels[j] != d.labels[i]) continue;
            absorbed = dm(i, j) + radius[i] <= radius[j] + epsilon * std::max(1.0, radius[j]);
        }
        survivors += absorbed ? 0 : 1;
    }
    return static_cast<double>(survivors) / static_cast<double>(n);
}

/// Local-set average cardinality: 1 - sum_i |LS(x_i)| / n^2, where LS(x_i)
/// holds the other instances strictly closer to x_i than its nearest enemy.
inline double lsc(const Dataset& d, const DistanceMatrix& dm) {
    detail::require_measurable(d);
    const std::size_t n = d.size();
    const auto radius = detail::enemy_radius(d, dm);
    std::size_t total = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (j != i && dm(i, j) < radius[i]) ++total;
    const double nn = static_cast<double>(n);
    return 1.0 - static_cast<double>(total) / (nn * nn);
}

inline double n1(const Dataset& d) { return n1(d, DistanceMatrix(d)); }
inline double n2(const Dataset& d) { return n2(d, DistanceMatrix(d)); }
inline double n3(const Dataset& d) { return n3(d, DistanceMatrix(d)); }
inline double t1(const Dataset& d) { return t1(d, DistanceMatrix(d)); }
inline double lsc(const Dataset& d) { return lsc(d, DistanceMatrix(d)); }

/// Values of several measures on one dataset (or bag), sharing one distance
/// matrix between the neighborhood measures. `seed` only affects N4.
inline std::vector<double> compute(std::span<const Measure> measures, const Dataset& d, std::uint64_t seed = 0) {
    detail::require_measurable(d);
    std::optional<DistanceMatrix> dm;
    auto distances = [&]() -> const DistanceMatrix& {
        if (!dm) dm.emplace(d);
        return *dm;
    };
    std::vector<double> out;
    out.reserve(measures.size());
    for (Measure m : measures) {
        double v = 0.0;
        switch (m) {
            case Measure::F1: v = f1(d); break;
            case Measure::F1v: v = f1v(d); break;
            case Measure::F2: v = f2(d); break;
            case Measure::F3: v = f3(d); break;
            case Measure::F4: v = f4(d); break;
            case Measure::N1: v = n1(d, distances()); break;
            case Measure::N2: v = n2(d, distances()); break;
            case Measure::N3: v = n3(d, distances()); break;
            case Measure::N4: v = n4(d, seed); break;
            case Measure::T1: v = t1(d, distances()); break;
            case Measure::LSC: v = lsc(d, distances()); break;
        }
        out.push_back(std::clamp(v, 0.0, 1.0));
    }
    return out;
}

inline double compute(Measure m, const Dataset& d, std::uint64_t seed = 0) {
    const std::array<Measure, 1> one = {m};
    return compute(one, d, seed).front();
}

/// Measure values keyed by measure, in canonical order.
using Profile = std::map<Measure, double>;

inline Profile profile(const Dataset& d, std::span<const Measure> measures = all_measures, std::uint64_t seed = 0) {
    const auto values = compute(measures, d, seed);
    Profile p;
    for (std::size_t i = 0; i < measures.size(); ++i) p[measures[i]] = values[i];
    return p;
}

}  // namespace poolforge::complexity
