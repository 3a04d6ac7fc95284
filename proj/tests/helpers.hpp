#pragma once

/// @file helpers.hpp
/// @brief Small builders shared by the test suites.

#include "oracles.hpp"

#include <poolforge/dataset.hpp>

#include <string>
#include <vector>

namespace testing_util {

/// Dataset from rows and labels; classes named "0".."y-1".
inline poolforge::Dataset make(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                               std::string name = "t") {
    poolforge::Dataset d;
    d.name = std::move(name);
    d.n_features = x.empty() ? 0 : x[0].size();
    int classes = 0;
    for (int l : y) classes = std::max(classes, l + 1);
    for (int c = 0; c < classes; ++c) d.class_names.push_back(std::to_string(c));
    for (std::size_t j = 0; j < d.n_features; ++j) d.feature_names.push_back("f" + std::to_string(j));
    for (const auto& r : x) d.features.insert(d.features.end(), r.begin(), r.end());
    d.labels = y;
    return d;
}

inline oracle::Data to_oracle(const poolforge::Dataset& d) {
    oracle::Data o;
    for (std::size_t i = 0; i < d.size(); ++i) {
        auto r = d.row(i);
        o.x.emplace_back(r.begin(), r.end());
    }
    o.y = d.labels;
    return o;
}

/// Random dataset with n rows, f features and y classes (each class at
/// least `min_per_class` rows), values uniform in [0, 1) plus a class shift.
inline poolforge::Dataset random_dataset(poolforge::Rng& rng, std::size_t n, std::size_t f, std::size_t y,
                                         std::size_t min_per_class = 1, double shift = 0.5) {
    std::vector<std::vector<double>> x(n, std::vector<double>(f));
    std::vector<int> lab(n);
    for (std::size_t i = 0; i < n; ++i) {
        lab[i] = static_cast<int>(i < y * min_per_class ? i % y : rng.index(y));
        for (std::size_t j = 0; j < f; ++j) x[i][j] = rng.uniform01() + shift * lab[i] * (j % 2 == 0 ? 1.0 : -0.5);
    }
    return make(x, lab, "random");
}

}  // namespace testing_util
