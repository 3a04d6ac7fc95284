#pragma once

/// @file synthetic.hpp
/// @brief Two-feature, two-class synthetic problems: P2, banana and Gaussian blobs.

#include <poolforge/core.hpp>
#include <poolforge/dataset.hpp>

#include <cmath>
#include <string>

namespace poolforge {

enum class SyntheticKind { p2, banana, blobs };

inline SyntheticKind parse_synthetic_kind(const std::string& s) {
    if (s == "p2") return SyntheticKind::p2;
    if (s == "banana") return SyntheticKind::banana;
    if (s == "blobs") return SyntheticKind::blobs;
    throw ArgumentError("unknown synthetic kind '" + s + "' (expected p2, banana or blobs)");
}

inline const char* to_string(SyntheticKind k) {
    switch (k) {
        case SyntheticKind::p2: return "p2";
        case SyntheticKind::banana: return "banana";
        case SyntheticKind::blobs: return "blobs";
    }
    return "?";
}

namespace detail {

// P2 decision regions on the unit square, delimited by four curves defined
// on [0, 10] and rescaled by 1/10.
inline bool p2_is_class0(double u, double v) {
    const double x = 10.0 * u;
    const double y = 10.0 * v;
    const double e1 = 2.0 * std::sin(x) + 5.0;
    const double e2 = (x - 2.0) * (x - 2.0) + 1.0;
    const double e3 = -0.1 * x * x + 0.6 * std::sin(4.0 * x) + 8.0;
    const double e4 = (x - 10.0) * (x - 10.0) / 2.0 + 7.902;
    return (y > e3 && y > e2) || (y < e1 && y > e2) || (y < e3 && y < e2 && y > e1) || (y > e3 && y < e1) ||
           y > e4;
}

inline Dataset make_two_class(std::string name) {
    Dataset d;
    d.name = std::move(name);
    d.n_features = 2;
    d.class_names = {"0", "1"};
    d.feature_names = {"x1", "x2"};
    return d;
}

}  // namespace detail

/// Generate a synthetic two-class problem with n instances split evenly
/// between the classes (class 0 gets the extra one when n is odd).
///
/// - p2: uniform points on [0,1]^2 labelled by the P2 region map; `noise`
///   is a label-flip probability.
/// - banana: two interleaved crescents of radius 5; `noise` is the standard
///   deviation of the Gaussian jitter (1.0 gives the usual shape).
/// - blobs: isotropic Gaussians centred at (-3,-3) and (3,3) with standard
///   deviation `noise`.
inline Dataset generate_synthetic(SyntheticKind kind, std::size_t n, double noise, std::uint64_t seed) {
    if (n < 10) throw ArgumentError("synthetic datasets need n >= 10");
    if (!(noise >= 0.0)) throw ArgumentError("noise must be non-negative");
    Rng rng(seed);
    const std::size_t n0 = (n + 1) / 2;
    const std::size_t n1 = n - n0;
    Dataset d = detail::make_two_class(to_string(kind));
    auto push = [&](double a, double b, int label) {
        d.features.push_back(a);
        d.features.push_back(b);
        d.labels.push_back(label);
    };

    switch (kind) {
        case SyntheticKind::p2: {
            std::size_t have0 = 0, have1 = 0;
            while (have0 < n0 || have1 < n1) {
                const double u = rng.uniform01();
                const double v = rng.uniform01();
                const int label = detail::p2_is_class0(u, v) ? 0 : 1;
                if (label == 0 && have0 >= n0) continue;
                if (label == 1 && have1 >= n1) continue;
                (label == 0 ? have0 : have1)++;
                const int observed = rng.bernoulli(noise) ? 1 - label : label;
                push(u, v, observed);
            }
            break;
        }
        case SyntheticKind::banana: {
            constexpr double r = 5.0;
            constexpr double pi = std::numbers::pi;
            for (std::size_t i = 0; i < n0; ++i) {
                const double a = 0.125 * pi + rng.uniform01() * 1.25 * pi;
                push(std::sin(a) * r + rng.normal() * noise, std::cos(a) * r + rng.normal() * noise, 0);
            }
            for (std::size_t i = 0; i < n1; ++i) {
                const double a = 0.375 * pi - rng.uniform01() * 1.25 * pi;
                push(std::sin(a) * r + rng.normal() * noise - 0.75 * r,
                     std::cos(a) * r + rng.normal() * noise - 0.75 * r, 1);
            }
            break;
        }
        case SyntheticKind::blobs: {
            for (std::size_t i = 0; i < n; ++i) {
                const int label = i < n0 ? 0 : 1;
                const double c = label == 0 ? -3.0 : 3.0;
                push(c + rng.normal() * noise, c + rng.normal() * noise, label);
            }
            break;
        }
    }
    d.validate();
    return d;
}

}  // namespace poolforge
