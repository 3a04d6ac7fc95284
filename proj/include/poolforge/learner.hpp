#pragma once

/// @file learner.hpp
/// @brief Linear perceptron base classifier, classifier pools, majority
/// voting and the Bagging pool generator.

#include <poolforge/core.hpp>
#include <poolforge/dataset.hpp>
#include <poolforge/metricsel.hpp>

#include <json.hpp>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace poolforge {

struct PerceptronConfig {
    std::size_t epochs = 100;
    double learning_rate = 1.0;
    std::uint64_t seed = 0;
};

/// Linear classifier with one hyperplane per class: prediction is the argmax
/// of the class scores, ties going to the lowest class id.
///
/// Binary problems train a single hyperplane stored as the class-1 row (the
/// class-0 row stays zero), so class 1 wins only on a strictly positive
/// score. Problems with more classes train one-vs-rest hyperplanes.
class Perceptron {
  public:
    Perceptron() = default;
    Perceptron(std::size_t classes, std::size_t features)
        : classes_(classes), features_(features), weights_(classes * features, 0.0), bias_(classes, 0.0) {}

    static Perceptron from_parts(std::size_t classes, std::size_t features, std::vector<double> weights,
                                 std::vector<double> bias) {
        if (weights.size() != classes * features || bias.size() != classes)
            throw DataError("perceptron weights do not match classes x features");
        Perceptron p(classes, features);
        p.weights_ = std::move(weights);
        p.bias_ = std::move(bias);
        return p;
    }

    std::size_t num_classes() const noexcept { return classes_; }
    std::size_t num_features() const noexcept { return features_; }
    std::span<const double> weights(std::size_t c) const { return {weights_.data() + c * features_, features_}; }
    const std::vector<double>& weight_matrix() const noexcept { return weights_; }
    const std::vector<double>& bias() const noexcept { return bias_; }
    std::size_t epochs_run() const noexcept { return epochs_run_; }
    std::uint64_t training_seed() const noexcept { return training_seed_; }

    double score(std::size_t c, std::span<const double> x) const {
        double s = bias_[c];
        const double* w = weights_.data() + c * features_;
        for (std::size_t j = 0; j < features_; ++j) s += w[j] * x[j];
        return s;
    }

    int predict(std::span<const double> x) const {
        if (x.size() != features_)
            throw ArgumentError("feature vector has " + std::to_string(x.size()) + " values, model expects " +
                                std::to_string(features_));
        std::size_t best = 0;
        double best_score = score(0, x);
        for (std::size_t c = 1; c < classes_; ++c) {
            const double s = score(c, x);
            if (s > best_score) {
                best = c;
                best_score = s;
            }
        }
        return static_cast<int>(best);
    }

    friend Perceptron train_perceptron(const Dataset& bag, const PerceptronConfig& cfg);

  private:
    std::size_t classes_ = 0;
    std::size_t features_ = 0;
    std::vector<double> weights_;
    std::vector<double> bias_;
    std::size_t epochs_run_ = 0;
    std::uint64_t training_seed_ = 0;
};

/// Classic perceptron rule: update on every instance with non-positive
/// margin; instance order is reshuffled each epoch. Training stops after
/// `cfg.epochs` epochs or after an epoch without a single update.
inline Perceptron train_perceptron(const Dataset& bag, const PerceptronConfig& cfg) {
    if (bag.size() == 0) throw DataError("cannot train a perceptron on an empty bag");
    if (bag.classes_present() < 2) throw DataError("cannot train a perceptron on a single-class bag");
    const std::size_t y = bag.num_classes();
    const std::size_t f = bag.n_features;
    Perceptron p(y, f);
    p.training_seed_ = cfg.seed;
    // binary problems use one hyperplane (row 1); otherwise one per class
    const std::size_t first_row = y == 2 ? 1 : 0;
    std::vector<std::size_t> order(bag.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(cfg.seed);
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        std::size_t updates = 0;
        for (std::size_t i : order) {
            auto x = bag.row(i);
            const int label = bag.labels[i];
            for (std::size_t c = first_row; c < y; ++c) {
                const double target = label == static_cast<int>(c) ? 1.0 : -1.0;
                if (target * p.score(c, x) > 0.0) continue;
                double* w = p.weights_.data() + c * f;
                const double step = cfg.learning_rate * target;
                for (std::size_t j = 0; j < f; ++j) w[j] += step * x[j];
                p.bias_[c] += step;
                ++updates;
            }
        }
        p.epochs_run_ = epoch + 1;
        if (updates == 0) break;
    }
    return p;
}

/// Plurality class among votes; ties go to the lowest class id.
inline int plurality(std::span<const int> votes, std::size_t num_classes) {
    if (votes.empty()) throw ArgumentError("majority vote over an empty pool");
    std::vector<std::size_t> counts(num_classes, 0);
    for (int v : votes) ++counts[static_cast<std::size_t>(v)];
    return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

struct PoolMember {
    Perceptron model;
    std::vector<std::size_t> bag;
};

struct PoolMetadata {
    std::string method;  // "pgdcs" or "bagging"
    std::uint64_t seed = 0;
    std::optional<std::string> cm1;
    std::optional<std::string> cm2;
    std::optional<std::size_t> chosen_generation;
    std::vector<double> g_disp_history;
    std::size_t num_classes = 0;
    std::size_t num_features = 0;
    std::vector<std::string> class_names;
    /// Feature scaling fitted on the training data, applied again at evaluation.
    std::optional<Scaler> scaler;
};

/// Ordered collection of trained classifiers and the bags they were trained on.
struct Pool {
    PoolMetadata metadata;
    std::vector<PoolMember> members;

    std::size_t size() const noexcept { return members.size(); }
    bool empty() const noexcept { return members.empty(); }
};

inline int majority_vote(const Pool& pool, std::span<const double> x) {
    if (pool.empty()) throw ArgumentError("majority vote over an empty pool");
    std::vector<int> votes;
    votes.reserve(pool.size());
    for (const auto& m : pool.members) votes.push_back(m.model.predict(x));
    return plurality(votes, pool.members.front().model.num_classes());
}

struct BaggingConfig {
    std::size_t pool_size = 100;
    double bag_frac = 0.5;
    std::uint64_t seed = 0;
    std::size_t max_redraws = 100;
    std::size_t workers = 1;
    PerceptronConfig learner;
};

/// Bagging: each member is trained on floor(bag_frac * |train|) instances
/// drawn with replacement. Single-class bags are redrawn.
inline Pool bagging_generate(const Dataset& train, const BaggingConfig& cfg) {
    if (cfg.pool_size < 1) throw ArgumentError("pool size must be at least 1");
    if (!(cfg.bag_frac > 0.0 && cfg.bag_frac <= 1.0)) throw ArgumentError("bag_frac must be in (0, 1]");
    const auto bag_size = std::max<std::size_t>(
        2, static_cast<std::size_t>(std::floor(cfg.bag_frac * static_cast<double>(train.size()))));
    Pool pool;
    pool.metadata.method = "bagging";
    pool.metadata.seed = cfg.seed;
    pool.metadata.num_classes = train.num_classes();
    pool.metadata.num_features = train.n_features;
    pool.metadata.class_names = train.class_names;
    pool.members.resize(cfg.pool_size);
    parallel_for(cfg.pool_size, cfg.workers, [&](std::size_t m) {
        Rng rng(derive_seed(cfg.seed, m));
        auto bag = draw_bag_with_replacement(train, bag_size, rng, cfg.max_redraws);
        PerceptronConfig pc = cfg.learner;
        pc.seed = derive_seed(cfg.seed, m, 1);
        pool.members[m].model = train_perceptron(train.subset(bag), pc);
        pool.members[m].bag = std::move(bag);
    });
    return pool;
}

// --- JSON persistence ------------------------------------------------------

inline nlohmann::json to_json(const Pool& pool) {
    using nlohmann::json;
    const auto& md = pool.metadata;
    json meta = {{"method", md.method},
                 {"seed", md.seed},
                 {"num_classes", md.num_classes},
                 {"num_features", md.num_features},
                 {"class_names", md.class_names},
                 {"g_disp_history", md.g_disp_history}};
    meta["cm1"] = md.cm1 ? json(*md.cm1) : json(nullptr);
    meta["cm2"] = md.cm2 ? json(*md.cm2) : json(nullptr);
    meta["chosen_generation"] = md.chosen_generation ? json(*md.chosen_generation) : json(nullptr);
    meta["scaler"] = md.scaler ? json{{"min", md.scaler->min}, {"max", md.scaler->max}} : json(nullptr);
    json members = json::array();
    for (const auto& m : pool.members) {
        json w = json::array();
        for (std::size_t c = 0; c < m.model.num_classes(); ++c) {
            auto row = m.model.weights(c);
            w.push_back(std::vector<double>(row.begin(), row.end()));
        }
        members.push_back({{"weights", w}, {"bias", m.model.bias()}, {"bag_indices", m.bag}});
    }
    return {{"metadata", meta}, {"members", members}};
}

inline Pool pool_from_json(const nlohmann::json& j) {
    try {
        Pool pool;
        const auto& meta = j.at("metadata");
        auto& md = pool.metadata;
        md.method = meta.at("method").get<std::string>();
        md.seed = meta.at("seed").get<std::uint64_t>();
        md.num_classes = meta.at("num_classes").get<std::size_t>();
        md.num_features = meta.at("num_features").get<std::size_t>();
        md.class_names = meta.value("class_names", std::vector<std::string>{});
        md.g_disp_history = meta.value("g_disp_history", std::vector<double>{});
        if (meta.contains("cm1") && !meta["cm1"].is_null()) md.cm1 = meta["cm1"].get<std::string>();
        if (meta.contains("cm2") && !meta["cm2"].is_null()) md.cm2 = meta["cm2"].get<std::string>();
        if (meta.contains("chosen_generation") && !meta["chosen_generation"].is_null())
            md.chosen_generation = meta["chosen_generation"].get<std::size_t>();
        if (meta.contains("scaler") && !meta["scaler"].is_null())
            md.scaler = Scaler{meta["scaler"].at("min").get<std::vector<double>>(),
                               meta["scaler"].at("max").get<std::vector<double>>()};
        for (const auto& m : j.at("members")) {
            std::vector<double> w;
            for (const auto& row : m.at("weights")) {
                auto r = row.get<std::vector<double>>();
                if (r.size() != md.num_features) throw DataError("pool member weight row has wrong length");
                w.insert(w.end(), r.begin(), r.end());
            }
            PoolMember member;
            member.model = Perceptron::from_parts(md.num_classes, md.num_features, std::move(w),
                                                  m.at("bias").get<std::vector<double>>());
            member.bag = m.at("bag_indices").get<std::vector<std::size_t>>();
            pool.members.push_back(std::move(member));
        }
        return pool;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed pool JSON: ") + e.what());
    }
}

}  // namespace poolforge
