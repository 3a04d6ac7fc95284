#pragma once

/// @file diversity.hpp
/// @brief Double-fault diversity and the per-classifier decision-based
/// diversity value (DDV).

#include <poolforge/core.hpp>

#include <bit>
#include <cstdint>
#include <vector>

namespace poolforge {

/// Fraction of instances on which both classifiers are wrong.
inline double double_fault(const std::vector<bool>& a_correct, const std::vector<bool>& b_correct) {
    if (a_correct.size() != b_correct.size()) throw ArgumentError("double fault: row lengths differ");
    if (a_correct.empty()) throw ArgumentError("double fault: empty rows");
    std::size_t both = 0;
    for (std::size_t j = 0; j < a_correct.size(); ++j) both += (!a_correct[j] && !b_correct[j]) ? 1 : 0;
    return static_cast<double>(both) / static_cast<double>(a_correct.size());
}

/// Correctness of N classifiers on m validation instances, stored as packed
/// error bitsets so pairwise double faults are a popcount.
class PredictionTable {
  public:
    PredictionTable() = default;
    PredictionTable(std::size_t members, std::size_t instances)
        : members_(members), instances_(instances), words_((instances + 63) / 64),
          wrong_(members * words_, ~std::uint64_t{0}) {
        // padding bits beyond m must not count as errors
        if (instances_ % 64 != 0) {
            const std::uint64_t mask = (std::uint64_t{1} << (instances_ % 64)) - 1;
            for (std::size_t i = 0; i < members_; ++i) wrong_[i * words_ + words_ - 1] &= mask;
        }
    }

    static PredictionTable from_rows(const std::vector<std::vector<bool>>& correct) {
        const std::size_t m = correct.empty() ? 0 : correct.front().size();
        PredictionTable t(correct.size(), m);
        for (std::size_t i = 0; i < correct.size(); ++i) {
            if (correct[i].size() != m) throw ArgumentError("prediction table rows differ in length");
            t.set_row(i, correct[i]);
        }
        return t;
    }

    std::size_t members() const noexcept { return members_; }
    std::size_t instances() const noexcept { return instances_; }

    void set(std::size_t i, std::size_t j, bool correct) {
        std::uint64_t& w = wrong_[i * words_ + j / 64];
        const std::uint64_t bit = std::uint64_t{1} << (j % 64);
        w = correct ? (w & ~bit) : (w | bit);
    }

    void set_row(std::size_t i, const std::vector<bool>& correct) {
        for (std::size_t j = 0; j < correct.size(); ++j) set(i, j, correct[j]);
    }

    bool correct(std::size_t i, std::size_t j) const {
        return ((wrong_[i * words_ + j / 64] >> (j % 64)) & 1U) == 0;
    }

    std::vector<bool> row(std::size_t i) const {
        std::vector<bool> r(instances_);
        for (std::size_t j = 0; j < instances_; ++j) r[j] = correct(i, j);
        return r;
    }

    double error_rate(std::size_t i) const {
        std::size_t e = 0;
        for (std::size_t w = 0; w < words_; ++w) e += static_cast<std::size_t>(std::popcount(wrong_[i * words_ + w]));
        return static_cast<double>(e) / static_cast<double>(instances_);
    }

    double double_fault(std::size_t i, std::size_t j) const {
        if (instances_ == 0) throw ArgumentError("double fault: empty rows");
        std::size_t both = 0;
        for (std::size_t w = 0; w < words_; ++w)
            both += static_cast<std::size_t>(std::popcount(wrong_[i * words_ + w] & wrong_[j * words_ + w]));
        return static_cast<double>(both) / static_cast<double>(instances_);
    }

    /// Copy rows `indices` (in that order) into a new table.
    PredictionTable select(const std::vector<std::size_t>& indices) const {
        PredictionTable t(indices.size(), instances_);
        for (std::size_t r = 0; r < indices.size(); ++r)
            std::copy_n(wrong_.begin() + static_cast<std::ptrdiff_t>(indices[r] * words_), words_,
                        t.wrong_.begin() + static_cast<std::ptrdiff_t>(r * words_));
        return t;
    }

  private:
    std::size_t members_ = 0;
    std::size_t instances_ = 0;
    std::size_t words_ = 0;
    std::vector<std::uint64_t> wrong_;
};

/// Decision-based diversity value of member i: its double fault with every
/// other member, summed and divided by N-1. Lower means more diverse.
inline double ddv(const PredictionTable& table, std::size_t i) {
    const std::size_t n = table.members();
    if (n < 2) throw ArgumentError("DDV needs at least 2 classifiers");
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j)
        if (j != i) sum += table.double_fault(i, j);
    return sum / static_cast<double>(n - 1);
}

inline std::vector<double> ddv_all(const PredictionTable& table) {
    const std::size_t n = table.members();
    if (n < 2) throw ArgumentError("DDV needs at least 2 classifiers");
    std::vector<double> df(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) df[i * n + j] = df[j * n + i] = table.double_fault(i, j);
    // same summation order as ddv(), so both agree bit for bit
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) sum += df[i * n + j];
        out[i] = sum / static_cast<double>(n - 1);
    }
    return out;
}

}  // namespace poolforge
