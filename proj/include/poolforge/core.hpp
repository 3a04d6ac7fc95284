#pragma once

/// @file core.hpp
/// @brief Error types, seeded random streams and a deterministic parallel loop
/// shared by every poolforge module.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace poolforge {

/// Base of all poolforge errors. The CLI maps subclasses onto exit codes.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Bad input data: malformed CSV, degenerate labels, shape mismatch.
class DataError : public Error {
  public:
    using Error::Error;
};

/// Violated precondition on an argument (bad count, bad fraction, bad id).
class ArgumentError : public Error {
  public:
    using Error::Error;
};

/// Failure while running an algorithm (resampling guard exhausted, network, I/O).
class RuntimeFailure : public Error {
  public:
    using Error::Error;
};

/// SplitMix64 finalizer; used to derive independent seeds from a master seed.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derive a substream seed from a base seed and any number of integer tags.
/// Substreams are indexed rather than shared, so results do not depend on
/// the order in which parallel work items run.
template <typename... Tags>
constexpr std::uint64_t derive_seed(std::uint64_t base, Tags... tags) noexcept {
    std::uint64_t s = mix64(base);
    ((s = mix64(s ^ mix64(static_cast<std::uint64_t>(tags) + 0x632be59bd9b4e019ULL))), ...);
    return s;
}

/// Seeded random stream. The engine is std::mt19937_64; the draws are done
/// here rather than through <random> distributions, whose output differs
/// between standard library implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [lo, hi], unbiased (rejection sampling).
    std::size_t uniform_int(std::size_t lo, std::size_t hi) {
        if (hi <= lo) return lo;
        const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
        if (range == 0) return static_cast<std::size_t>(engine_());  // full 64-bit span
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % range;
        std::uint64_t r;
        do {
            r = engine_();
        } while (r >= limit);
        return lo + static_cast<std::size_t>(r % range);
    }

    /// Uniform index in [0, n).
    std::size_t index(std::size_t n) { return uniform_int(0, n - 1); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    bool bernoulli(double p) { return uniform01() < p; }

    /// Standard normal via Box-Muller.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
        has_spare_ = true;
        return r * std::cos(2.0 * std::numbers::pi * u2);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[index(i)]);
        }
    }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Run fn(i) for i in [0, n) on up to `workers` threads. Each index is
/// processed exactly once; callers write results into slot i, so output is
/// identical for any worker count. The first exception thrown is rethrown.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto body = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    const std::size_t count = std::min(workers, n);
    std::vector<std::jthread> threads;
    threads.reserve(count - 1);
    for (std::size_t t = 1; t < count; ++t) threads.emplace_back(body);
    body();
    threads.clear();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace poolforge
