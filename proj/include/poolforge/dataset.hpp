#pragma once

/// @file dataset.hpp
/// @brief In-memory labelled datasets, CSV ingestion and stratified splitting.

#include <poolforge/core.hpp>

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace poolforge {

/// Numeric feature matrix (row-major) with dense integer class labels.
///
/// Labels are re-encoded as 0..y-1; `class_names[c]` keeps the original
/// label text. A Dataset is immutable once built and may be shared freely
/// across threads for reading.
struct Dataset {
    std::string name;
    std::size_t n_features = 0;
    std::vector<double> features;
    std::vector<int> labels;
    std::vector<std::string> class_names;
    std::vector<std::string> feature_names;
    /// Rows skipped at ingestion because of missing values.
    std::size_t dropped_rows = 0;

    std::size_t size() const noexcept { return labels.size(); }
    std::size_t num_classes() const noexcept { return class_names.size(); }

    std::span<const double> row(std::size_t i) const noexcept {
        return {features.data() + i * n_features, n_features};
    }
    double at(std::size_t i, std::size_t j) const noexcept { return features[i * n_features + j]; }

    /// Per-class instance counts, indexed by class id.
    std::vector<std::size_t> class_counts() const {
        std::vector<std::size_t> counts(num_classes(), 0);
        for (int l : labels) ++counts[static_cast<std::size_t>(l)];
        return counts;
    }

    /// Number of distinct classes actually present.
    std::size_t classes_present() const {
        std::size_t k = 0;
        for (auto c : class_counts()) k += c > 0 ? 1 : 0;
        return k;
    }

    /// Copy of the rows named by `indices` (repeats allowed). Class ids and
    /// names are kept from the parent so labels stay comparable.
    Dataset subset(std::span<const std::size_t> indices) const {
        Dataset out;
        out.name = name;
        out.n_features = n_features;
        out.class_names = class_names;
        out.feature_names = feature_names;
        out.features.reserve(indices.size() * n_features);
        out.labels.reserve(indices.size());
        for (std::size_t i : indices) {
            auto r = row(i);
            out.features.insert(out.features.end(), r.begin(), r.end());
            out.labels.push_back(labels[i]);
        }
        return out;
    }

    /// Checks the structural invariants; throws DataError on violation.
    void validate(bool require_all_classes = true) const {
        if (n_features == 0) throw DataError("dataset '" + name + "' has no features");
        if (features.size() != labels.size() * n_features)
            throw DataError("dataset '" + name + "' feature matrix has wrong size");
        for (double v : features)
            if (!std::isfinite(v)) throw DataError("dataset '" + name + "' contains a NaN or infinite value");
        for (int l : labels)
            if (l < 0 || static_cast<std::size_t>(l) >= num_classes())
                throw DataError("dataset '" + name + "' has a label outside [0, y)");
        if (require_all_classes) {
            for (auto c : class_counts())
                if (c == 0) throw DataError("dataset '" + name + "' has an empty class");
        }
    }
};

/// Train/validation/test index sets over a parent dataset, each sorted ascending.
struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
    std::vector<std::size_t> test;
};

/// Per-feature min-max scaling to [0, 1]. Constant features map to 0.
struct Scaler {
    std::vector<double> min;
    std::vector<double> max;

    static Scaler fit(const Dataset& d) {
        Scaler s;
        s.min.assign(d.n_features, std::numeric_limits<double>::infinity());
        s.max.assign(d.n_features, -std::numeric_limits<double>::infinity());
        for (std::size_t i = 0; i < d.size(); ++i) {
            for (std::size_t j = 0; j < d.n_features; ++j) {
                s.min[j] = std::min(s.min[j], d.at(i, j));
                s.max[j] = std::max(s.max[j], d.at(i, j));
            }
        }
        return s;
    }

    Dataset apply(Dataset d) const {
        if (d.n_features != min.size()) throw DataError("scaler fitted on a different number of features");
        for (std::size_t i = 0; i < d.size(); ++i) {
            for (std::size_t j = 0; j < d.n_features; ++j) {
                const double range = max[j] - min[j];
                double& v = d.features[i * d.n_features + j];
                v = range > 0.0 ? (v - min[j]) / range : 0.0;
            }
        }
        return d;
    }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line, char sep = ',') {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            return out;
        }
        out.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
}

inline bool is_missing(std::string_view field) { return field.empty() || field == "?" || field == "NA"; }

inline std::optional<double> parse_double(std::string_view s) {
    double v = 0.0;
    // from_chars rejects a leading '+'; accept it for CSVs written by other tools
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

inline std::string format_double(double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

}  // namespace detail

/// Where the label lives in a CSV file.
struct LabelColumn {
    /// Empty means the last column.
    std::string name;
};

/// Parse CSV text (header row required). Rows with a missing value ("", "?",
/// "NA") are skipped and counted in `dropped_rows`; a non-numeric feature,
/// NaN or infinity is an error reported with its row and column.
inline Dataset parse_csv(std::string_view text, const LabelColumn& label = {}, std::string name = "dataset") {
    Dataset d;
    d.name = std::move(name);
    std::size_t line_no = 0;
    std::size_t label_idx = 0;
    std::size_t n_cols = 0;
    std::map<std::string, int, std::less<>> codes;
    std::size_t pos = 0;
    bool have_header = false;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = detail::trim(text.substr(pos, eol - pos));
        pos = eol + 1;
        ++line_no;
        if (line.empty()) {
            if (eol == text.size()) break;
            continue;
        }
        auto fields = detail::split_fields(line);
        if (!have_header) {
            n_cols = fields.size();
            if (n_cols < 2) throw DataError("CSV header needs at least one feature and a label column");
            if (label.name.empty()) {
                label_idx = n_cols - 1;
            } else {
                auto it = std::find(fields.begin(), fields.end(), std::string_view(label.name));
                if (it == fields.end()) throw DataError("label column '" + label.name + "' not in CSV header");
                label_idx = static_cast<std::size_t>(it - fields.begin());
            }
            for (std::size_t c = 0; c < n_cols; ++c)
                if (c != label_idx) d.feature_names.emplace_back(fields[c]);
            d.n_features = n_cols - 1;
            have_header = true;
            continue;
        }
        if (fields.size() != n_cols)
            throw DataError("CSV line " + std::to_string(line_no) + ": expected " + std::to_string(n_cols) +
                            " columns, found " + std::to_string(fields.size()));
        if (std::any_of(fields.begin(), fields.end(), detail::is_missing)) {
            ++d.dropped_rows;
            continue;
        }
        for (std::size_t c = 0; c < n_cols; ++c) {
            if (c == label_idx) continue;
            auto v = detail::parse_double(fields[c]);
            if (!v)
                throw DataError("CSV line " + std::to_string(line_no) + ", column " + std::to_string(c + 1) +
                                ": cannot parse '" + std::string(fields[c]) + "' as a number");
            if (!std::isfinite(*v))
                throw DataError("CSV line " + std::to_string(line_no) + ", column " + std::to_string(c + 1) +
                                ": NaN or infinite value");
            d.features.push_back(*v);
        }
        const std::string_view lab = fields[label_idx];
        auto it = codes.find(lab);
        if (it == codes.end()) {
            it = codes.emplace(std::string(lab), static_cast<int>(d.class_names.size())).first;
            d.class_names.emplace_back(lab);
        }
        d.labels.push_back(it->second);
    }
    if (!have_header) throw DataError("CSV is empty");
    if (d.size() == 0) throw DataError("CSV has no data rows");
    if (d.num_classes() < 2) throw DataError("fewer than 2 classes in label column");
    d.validate();
    return d;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Load a CSV file; the dataset is named after the file stem.
inline Dataset load_csv(const std::string& path, const LabelColumn& label = {}) {
    std::string stem = path;
    if (auto slash = stem.find_last_of('/'); slash != std::string::npos) stem = stem.substr(slash + 1);
    if (auto dot = stem.rfind('.'); dot != std::string::npos && dot > 0) stem = stem.substr(0, dot);
    return parse_csv(read_file(path), label, stem);
}

/// Canonical CSV layout: header of feature names plus "class", label last,
/// doubles printed in shortest round-trip form.
inline std::string to_csv(const Dataset& d) {
    std::string out;
    for (std::size_t j = 0; j < d.n_features; ++j) {
        out += j < d.feature_names.size() ? d.feature_names[j] : "f" + std::to_string(j);
        out += ',';
    }
    out += "class\n";
    for (std::size_t i = 0; i < d.size(); ++i) {
        for (std::size_t j = 0; j < d.n_features; ++j) {
            out += detail::format_double(d.at(i, j));
            out += ',';
        }
        out += d.class_names[static_cast<std::size_t>(d.labels[i])];
        out += '\n';
    }
    return out;
}

inline void write_csv(const Dataset& d, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw RuntimeFailure("cannot write '" + path + "'");
    out << to_csv(d);
    if (!out) throw RuntimeFailure("write to '" + path + "' failed");
}

/// Re-encode labels so class ids follow `class_names` (the encoding of the
/// training file). Classes missing from `class_names` get new ids after it.
inline Dataset align_labels(Dataset d, const std::vector<std::string>& class_names) {
    std::vector<std::string> names = class_names;
    std::vector<int> remap(d.class_names.size());
    for (std::size_t c = 0; c < d.class_names.size(); ++c) {
        auto it = std::find(names.begin(), names.end(), d.class_names[c]);
        if (it == names.end()) it = names.insert(names.end(), d.class_names[c]);
        remap[c] = static_cast<int>(it - names.begin());
    }
    for (int& l : d.labels) l = remap[static_cast<std::size_t>(l)];
    d.class_names = std::move(names);
    return d;
}

namespace detail {

// Integer allocation summing to `target` with per-item bounds; quotas are
// honoured to within one unit. Ties go to the lowest item index.
inline std::vector<std::size_t> apportion(std::span<const double> quota, std::span<const std::size_t> lo,
                                          std::span<const std::size_t> hi, std::size_t target) {
    const std::size_t k = quota.size();
    std::vector<std::size_t> out(k);
    std::size_t total = 0;
    for (std::size_t c = 0; c < k; ++c) {
        out[c] = std::clamp(static_cast<std::size_t>(std::floor(quota[c])), lo[c], hi[c]);
        total += out[c];
    }
    while (total < target) {
        std::optional<std::size_t> best;
        for (std::size_t c = 0; c < k; ++c) {
            if (out[c] >= hi[c]) continue;
            if (!best || quota[c] - out[c] > quota[*best] - out[*best]) best = c;
        }
        if (!best) throw DataError("cannot stratify: class sizes too small for the requested split");
        ++out[*best];
        ++total;
    }
    while (total > target) {
        std::optional<std::size_t> best;
        for (std::size_t c = 0; c < k; ++c) {
            if (out[c] <= lo[c]) continue;
            if (!best || quota[c] - out[c] < quota[*best] - out[*best]) best = c;
        }
        if (!best) throw DataError("cannot stratify: too many classes for the requested split");
        --out[*best];
        --total;
    }
    return out;
}

}  // namespace detail

/// Deterministic stratified train/validation/test split.
///
/// Global sizes: train = floor(f_train*n), test = floor(f_test*n),
/// validation = the remainder. Per-class counts follow the global fractions
/// to within one instance and every class appears in every part.
inline Split stratified_split(const Dataset& d, std::array<double, 3> fractions, std::uint64_t seed) {
    const double sum = fractions[0] + fractions[1] + fractions[2];
    if (std::abs(sum - 1.0) > 1e-9 || fractions[0] <= 0 || fractions[1] <= 0 || fractions[2] <= 0)
        throw ArgumentError("split fractions must be positive and sum to 1");
    const std::size_t n = d.size();
    const auto counts = d.class_counts();
    const std::size_t k = counts.size();
    for (std::size_t c = 0; c < k; ++c)
        if (counts[c] < 3)
            throw DataError("class '" + d.class_names[c] + "' has " + std::to_string(counts[c]) +
                            " instances; at least 3 are needed to stratify");

    const auto n_train = static_cast<std::size_t>(std::floor(fractions[0] * static_cast<double>(n)));
    const auto n_test = static_cast<std::size_t>(std::floor(fractions[2] * static_cast<double>(n)));

    std::vector<double> quota(k);
    std::vector<std::size_t> lo(k, 1), hi(k);
    for (std::size_t c = 0; c < k; ++c) {
        quota[c] = fractions[0] * static_cast<double>(counts[c]);
        hi[c] = counts[c] - 2;
    }
    const auto train_c = detail::apportion(quota, lo, hi, n_train);
    for (std::size_t c = 0; c < k; ++c) {
        quota[c] = fractions[2] * static_cast<double>(counts[c]);
        hi[c] = counts[c] - train_c[c] - 1;
    }
    const auto test_c = detail::apportion(quota, lo, hi, n_test);

    std::vector<std::vector<std::size_t>> by_class(k);
    for (std::size_t i = 0; i < n; ++i) by_class[static_cast<std::size_t>(d.labels[i])].push_back(i);

    Split s;
    for (std::size_t c = 0; c < k; ++c) {
        Rng rng(derive_seed(seed, c));
        auto& idx = by_class[c];
        rng.shuffle(idx);
        std::size_t pos = 0;
        for (; pos < train_c[c]; ++pos) s.train.push_back(idx[pos]);
        for (std::size_t t = 0; t < test_c[c]; ++t, ++pos) s.test.push_back(idx[pos]);
        for (; pos < idx.size(); ++pos) s.validation.push_back(idx[pos]);
    }
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.validation.begin(), s.validation.end());
    std::sort(s.test.begin(), s.test.end());
    return s;
}

}  // namespace poolforge
