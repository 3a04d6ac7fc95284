#pragma once

/// @file moga.hpp
/// @brief Multi-objective evolution of instance bags (PGDCS pool generation).
///
/// Each chromosome is a fixed-length bag of training-instance indices. The
/// objectives are the dispersion of each bag in the space of two complexity
/// measures (maximised) and the decision-based diversity value of the
/// classifier trained on it (minimised). Survivors are chosen by NSGA-II;
/// the generation whose fitness vectors are globally most spread out
/// provides the final pool.

#include <poolforge/complexity.hpp>
#include <poolforge/core.hpp>
#include <poolforge/dataset.hpp>
#include <poolforge/diversity.hpp>
#include <poolforge/learner.hpp>
#include <poolforge/nsga2.hpp>

#include <cmath>
#include <span>
#include <unordered_map>
#include <vector>

namespace poolforge {

/// A bag of training-instance indices (repeats allowed).
struct Chromosome {
    std::vector<std::size_t> genes;

    std::size_t size() const noexcept { return genes.size(); }
    friend bool operator==(const Chromosome&, const Chromosome&) = default;
};

enum class Objective : std::uint8_t { phi_cm1, phi_cm2, ddv };

inline const char* to_string(Objective o) {
    switch (o) {
        case Objective::phi_cm1: return "phi1";
        case Objective::phi_cm2: return "phi2";
        case Objective::ddv: return "ddv";
    }
    return "?";
}

struct GaConfig {
    std::size_t generations = 20;  // psi
    std::size_t population = 100;  // mu
    std::size_t children = 100;    // theta: bags produced by crossover and mutation
    std::size_t offspring = 100;   // gamma: children kept as offspring
    double crossover_prob = 0.9;
    double mutation_prob = 0.2;
    double bag_frac = 0.5;
    std::uint64_t seed = 0;
    std::size_t max_redraws = 100;
    std::size_t workers = 1;
    /// Objectives handed to NSGA-II and to the global dispersion.
    std::vector<Objective> objectives = {Objective::phi_cm1, Objective::phi_cm2, Objective::ddv};
    PerceptronConfig learner;

    void validate() const {
        if (population < 2 || children < 2 || offspring < 2)
            throw ArgumentError("population, children and offspring sizes must be at least 2");
        if (offspring > children) throw ArgumentError("offspring size cannot exceed the number of children");
        if (!(crossover_prob >= 0.0 && crossover_prob <= 1.0) || !(mutation_prob >= 0.0 && mutation_prob <= 1.0))
            throw ArgumentError("variation probabilities must be in [0, 1]");
        if (!(bag_frac > 0.0 && bag_frac <= 1.0)) throw ArgumentError("bag_frac must be in (0, 1]");
        if (objectives.empty()) throw ArgumentError("at least one objective is required");
    }
};

/// (Phi_cm1, Phi_cm2, DDV) of one individual, relative to its population.
struct FitnessVector {
    double phi1 = 0.0;
    double phi2 = 0.0;
    double ddv = 0.0;

    double get(Objective o) const {
        switch (o) {
            case Objective::phi_cm1: return phi1;
            case Objective::phi_cm2: return phi2;
            case Objective::ddv: return ddv;
        }
        return 0.0;
    }
};

struct GenerationRecord {
    std::size_t index = 0;
    std::vector<Chromosome> population;
    std::vector<FitnessVector> fitness;
    double g_disp = 0.0;
};

struct PgdcsResult {
    Pool pool;
    std::vector<GenerationRecord> history;
    std::size_t chosen_generation = 0;
};

// --- operators ---------------------------------------------------------------

inline bool has_two_classes(const Dataset& train, const std::vector<std::size_t>& genes) {
    if (genes.empty()) return false;
    const int first = train.labels[genes.front()];
    return std::any_of(genes.begin(), genes.end(), [&](std::size_t g) { return train.labels[g] != first; });
}

/// Chromosome length: floor(bag_frac * |train|).
inline std::size_t chromosome_length(const Dataset& train, double bag_frac) {
    return static_cast<std::size_t>(std::floor(bag_frac * static_cast<double>(train.size())));
}

/// mu random bags, each sampled without replacement from the training set.
inline std::vector<Chromosome> init_population(const Dataset& train, const GaConfig& cfg) {
    cfg.validate();
    if (train.size() < 4) throw ArgumentError("PGDCS needs at least 4 training instances");
    const std::size_t len = chromosome_length(train, cfg.bag_frac);
    if (len < 2) throw ArgumentError("chromosome length below 2");
    std::vector<Chromosome> pop(cfg.population);
    std::vector<std::size_t> pool_idx(train.size());
    for (std::size_t i = 0; i < cfg.population; ++i) {
        Rng rng(derive_seed(cfg.seed, 0, i));
        for (std::size_t attempt = 0;; ++attempt) {
            if (attempt > cfg.max_redraws) throw RuntimeFailure("degeneracy guard exhausted while initialising");
            std::iota(pool_idx.begin(), pool_idx.end(), 0);
            // partial Fisher-Yates
            for (std::size_t k = 0; k < len; ++k) std::swap(pool_idx[k], pool_idx[k + rng.index(train.size() - k)]);
            std::vector<std::size_t> genes(pool_idx.begin(), pool_idx.begin() + static_cast<std::ptrdiff_t>(len));
            if (has_two_classes(train, genes)) {
                pop[i].genes = std::move(genes);
                break;
            }
        }
    }
    return pop;
}

/// Child takes gene k from `si` when k <= start or k >= end, otherwise from `sj`.
inline Chromosome crossover_genes(const Chromosome& si, const Chromosome& sj, std::size_t start, std::size_t end) {
    if (si.size() != sj.size()) throw ArgumentError("crossover parents differ in length");
    Chromosome child;
    child.genes.resize(si.size());
    for (std::size_t k = 0; k < si.size(); ++k) child.genes[k] = (k <= start || k >= end) ? si.genes[k] : sj.genes[k];
    return child;
}

/// Two distinct random parents, start ~ U{0..L}, end ~ U{start..L}.
/// Single-class children are redrawn.
inline Chromosome crossover(std::span<const Chromosome> population, const Dataset& train, Rng& rng,
                            std::size_t max_redraws = 100) {
    if (population.size() < 2) throw ArgumentError("crossover needs at least 2 individuals");
    for (std::size_t attempt = 0; attempt <= max_redraws; ++attempt) {
        const std::size_t i = rng.index(population.size());
        std::size_t j = rng.index(population.size() - 1);
        if (j >= i) ++j;
        const std::size_t len = population[i].size();
        const std::size_t start = rng.uniform_int(0, len);
        const std::size_t end = rng.uniform_int(start, len);
        Chromosome child = crossover_genes(population[i], population[j], start, end);
        if (has_two_classes(train, child.genes)) return child;
    }
    throw RuntimeFailure("degeneracy guard exhausted in crossover");
}

/// Overwrite receiver[position] with donor[donor_position].
inline Chromosome mutate_genes(Chromosome receiver, const Chromosome& donor, std::size_t position,
                               std::size_t donor_position) {
    receiver.genes.at(position) = donor.genes.at(donor_position);
    return receiver;
}

/// One uniformly chosen gene of `receiver` replaced by a uniformly chosen
/// gene of `donor`. Single-class results are redrawn.
inline Chromosome mutate(const Chromosome& receiver, const Chromosome& donor, const Dataset& train, Rng& rng,
                         std::size_t max_redraws = 100) {
    for (std::size_t attempt = 0; attempt <= max_redraws; ++attempt) {
        const std::size_t pos = rng.index(receiver.size());
        const std::size_t from = rng.index(donor.size());
        Chromosome out = mutate_genes(receiver, donor, pos, from);
        if (has_two_classes(train, out.genes)) return out;
    }
    throw RuntimeFailure("degeneracy guard exhausted in mutation");
}

/// Mutation with random receiver and donor drawn from the population.
inline Chromosome mutate(std::span<const Chromosome> population, const Dataset& train, Rng& rng,
                         std::size_t max_redraws = 100) {
    if (population.size() < 2) throw ArgumentError("mutation needs at least 2 individuals");
    const auto& receiver = population[rng.index(population.size())];
    const auto& donor = population[rng.index(population.size())];
    return mutate(receiver, donor, train, rng, max_redraws);
}

// --- fitness -----------------------------------------------------------------

/// Per-bag dispersion: mean absolute difference to every other bag's value,
/// sum over all k divided by N-1.
inline std::vector<double> dispersion(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 2) throw ArgumentError("dispersion needs at least 2 values");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += std::abs(values[i] - values[k]);
        out[i] = s / static_cast<double>(n - 1);
    }
    return out;
}

/// Global dispersion of a fitness matrix: the mean over individuals i of
/// sum_j ||F_i - F_j|| / (N-1).
inline double g_disp(const std::vector<std::vector<double>>& fitness) {
    const std::size_t n = fitness.size();
    if (n < 2) throw ArgumentError("global dispersion needs at least 2 individuals");
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double sq = 0.0;
            for (std::size_t h = 0; h < fitness[i].size(); ++h) {
                const double t = fitness[i][h] - fitness[j][h];
                sq += t * t;
            }
            s += std::sqrt(sq);
        }
        total += s / static_cast<double>(n - 1);
    }
    return total / static_cast<double>(n);
}

inline std::vector<std::vector<double>> fitness_matrix(std::span<const FitnessVector> f,
                                                       const std::vector<Objective>& objectives) {
    std::vector<std::vector<double>> out(f.size(), std::vector<double>(objectives.size()));
    for (std::size_t i = 0; i < f.size(); ++i)
        for (std::size_t k = 0; k < objectives.size(); ++k) out[i][k] = f[i].get(objectives[k]);
    return out;
}

inline double g_disp(std::span<const FitnessVector> f, const std::vector<Objective>& objectives) {
    return g_disp(fitness_matrix(f, objectives));
}

/// Population-independent evaluation of one bag: the two complexity values,
/// the trained classifier and its correctness on the validation set.
struct BagTraits {
    double phi_cm1 = 0.0;
    double phi_cm2 = 0.0;
    Perceptron model;
    std::vector<bool> correct;
};

inline std::uint64_t genes_hash(const Chromosome& c) {
    std::uint64_t h = mix64(c.size());
    for (auto g : c.genes) h = mix64(h ^ static_cast<std::uint64_t>(g));
    return h;
}

/// Everything needed to score bags drawn from one training set.
class BagEvaluator {
  public:
    BagEvaluator(const Dataset& train, const Dataset& validation, complexity::Measure cm1, complexity::Measure cm2,
                 const GaConfig& cfg)
        : train_(train), validation_(validation), cm1_(cm1), cm2_(cm2), cfg_(cfg) {
        if (validation.size() == 0) throw ArgumentError("validation set is empty");
        if (validation.n_features != train.n_features)
            throw DataError("validation set has a different number of features");
    }

    /// Seeds come from the bag contents, so equal bags always get equal traits.
    BagTraits traits(const Chromosome& c) const {
        const Dataset bag = train_.subset(c.genes);
        const std::uint64_t h = genes_hash(c);
        BagTraits t;
        const std::array<complexity::Measure, 2> ms = {cm1_, cm2_};
        const auto v = complexity::compute(ms, bag, derive_seed(cfg_.seed, h, 3));
        t.phi_cm1 = v[0];
        t.phi_cm2 = v[1];
        PerceptronConfig pc = cfg_.learner;
        pc.seed = derive_seed(cfg_.seed, h, 2);
        t.model = train_perceptron(bag, pc);
        t.correct.resize(validation_.size());
        for (std::size_t j = 0; j < validation_.size(); ++j)
            t.correct[j] = t.model.predict(validation_.row(j)) == validation_.labels[j];
        return t;
    }

    std::vector<BagTraits> traits(std::span<const Chromosome> pop) const {
        std::vector<BagTraits> out(pop.size());
        parallel_for(pop.size(), cfg_.workers, [&](std::size_t i) { out[i] = traits(pop[i]); });
        return out;
    }

    const Dataset& train() const noexcept { return train_; }
    const Dataset& validation() const noexcept { return validation_; }
    complexity::Measure cm1() const noexcept { return cm1_; }
    complexity::Measure cm2() const noexcept { return cm2_; }

  private:
    const Dataset& train_;
    const Dataset& validation_;
    complexity::Measure cm1_;
    complexity::Measure cm2_;
    GaConfig cfg_;
};

/// Fitness of every individual relative to the given group: dispersion of
/// each complexity value and the DDV of each classifier.
inline std::vector<FitnessVector> fitness_from_traits(std::span<const BagTraits* const> group) {
    const std::size_t n = group.size();
    std::vector<double> c1(n), c2(n);
    PredictionTable table(n, group.empty() ? 0 : group.front()->correct.size());
    for (std::size_t i = 0; i < n; ++i) {
        c1[i] = group[i]->phi_cm1;
        c2[i] = group[i]->phi_cm2;
        table.set_row(i, group[i]->correct);
    }
    const auto d1 = dispersion(c1);
    const auto d2 = dispersion(c2);
    const auto dv = ddv_all(table);
    std::vector<FitnessVector> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = {d1[i], d2[i], dv[i]};
    return out;
}

inline std::vector<FitnessVector> fitness_from_traits(std::span<const BagTraits> traits) {
    std::vector<const BagTraits*> ptrs;
    ptrs.reserve(traits.size());
    for (const auto& t : traits) ptrs.push_back(&t);
    return fitness_from_traits(std::span<const BagTraits* const>(ptrs));
}

/// Evaluate a whole population: per-bag traits, then population-relative fitness.
inline std::vector<FitnessVector> evaluate(std::span<const Chromosome> population, complexity::Measure cm1,
                                           complexity::Measure cm2, const Dataset& train, const Dataset& validation,
                                           const GaConfig& cfg) {
    for (const auto& c : population)
        if (!has_two_classes(train, c.genes)) throw DataError("population contains a single-class bag");
    BagEvaluator ev(train, validation, cm1, cm2, cfg);
    return fitness_from_traits(ev.traits(population));
}

/// NSGA-II objective rows (all minimised): dispersions are negated.
inline nsga2::ObjectiveMatrix to_minimisation(std::span<const FitnessVector> f,
                                              const std::vector<Objective>& objectives) {
    auto m = fitness_matrix(f, objectives);
    for (auto& row : m)
        for (std::size_t k = 0; k < objectives.size(); ++k)
            if (objectives[k] != Objective::ddv) row[k] = -row[k];
    return m;
}

/// Survivors of parents + offspring (parents first in `fitness`).
inline std::vector<std::size_t> nsga2_select(std::span<const FitnessVector> fitness, std::size_t mu,
                                             const std::vector<Objective>& objectives) {
    return nsga2::select(to_minimisation(fitness, objectives), mu);
}

// --- generation loop -----------------------------------------------------------

/// Evolve bags for cfg.generations generations and build the pool from the
/// generation with the largest global dispersion (generation 0 included;
/// the earliest wins ties). Parents and offspring are re-evaluated together
/// before each selection because dispersion is population-relative.
inline PgdcsResult run_pgdcs(const Dataset& train, const Dataset& validation, complexity::Measure cm1,
                             complexity::Measure cm2, const GaConfig& cfg) {
    cfg.validate();
    const BagEvaluator ev(train, validation, cm1, cm2, cfg);

    struct Individual {
        Chromosome bag;
        std::shared_ptr<const BagTraits> traits;
    };
    auto evaluate_new = [&](std::vector<Chromosome> bags) {
        auto t = ev.traits(bags);
        std::vector<Individual> out(bags.size());
        for (std::size_t i = 0; i < bags.size(); ++i)
            out[i] = {std::move(bags[i]), std::make_shared<const BagTraits>(std::move(t[i]))};
        return out;
    };
    auto fitness_of = [](const std::vector<Individual>& group) {
        std::vector<const BagTraits*> ptrs;
        for (const auto& ind : group) ptrs.push_back(ind.traits.get());
        return fitness_from_traits(std::span<const BagTraits* const>(ptrs));
    };
    auto record = [&](std::size_t t, const std::vector<Individual>& pop) {
        GenerationRecord r;
        r.index = t;
        for (const auto& ind : pop) r.population.push_back(ind.bag);
        r.fitness = fitness_of(pop);
        r.g_disp = g_disp(r.fitness, cfg.objectives);
        return r;
    };

    PgdcsResult result;
    std::vector<Individual> pop = evaluate_new(init_population(train, cfg));
    result.history.push_back(record(0, pop));
    std::vector<Individual> best = pop;
    double best_g = result.history.back().g_disp;

    for (std::size_t t = 0; t < cfg.generations; ++t) {
        std::vector<Chromosome> parents;
        parents.reserve(pop.size());
        for (const auto& ind : pop) parents.push_back(ind.bag);
        std::vector<Chromosome> children(cfg.children);
        for (std::size_t c = 0; c < cfg.children; ++c) {
            Rng rng(derive_seed(cfg.seed, 1, t, c));
            Chromosome child = rng.bernoulli(cfg.crossover_prob)
                                   ? crossover(parents, train, rng, cfg.max_redraws)
                                   : parents[rng.index(parents.size())];
            if (rng.bernoulli(cfg.mutation_prob))
                child = mutate(child, parents[rng.index(parents.size())], train, rng, cfg.max_redraws);
            children[c] = std::move(child);
        }
        children.resize(cfg.offspring);

        std::vector<Individual> combined = pop;
        auto offspring = evaluate_new(std::move(children));
        combined.insert(combined.end(), std::make_move_iterator(offspring.begin()),
                        std::make_move_iterator(offspring.end()));
        const auto chosen = nsga2_select(fitness_of(combined), cfg.population, cfg.objectives);
        std::vector<Individual> next;
        next.reserve(chosen.size());
        for (auto i : chosen) next.push_back(combined[i]);
        pop = std::move(next);

        result.history.push_back(record(t + 1, pop));
        if (result.history.back().g_disp > best_g) {
            best_g = result.history.back().g_disp;
            best = pop;
            result.chosen_generation = t + 1;
        }
    }

    Pool& pool = result.pool;
    pool.metadata.method = "pgdcs";
    pool.metadata.seed = cfg.seed;
    pool.metadata.cm1 = complexity::code(cm1);
    pool.metadata.cm2 = complexity::code(cm2);
    pool.metadata.chosen_generation = result.chosen_generation;
    for (const auto& r : result.history) pool.metadata.g_disp_history.push_back(r.g_disp);
    pool.metadata.num_classes = train.num_classes();
    pool.metadata.num_features = train.n_features;
    pool.metadata.class_names = train.class_names;
    for (const auto& ind : best) pool.members.push_back({ind.traits->model, ind.bag.genes});
    return result;
}

// --- bag diversity -------------------------------------------------------------

/// Multiset Jaccard distance: 1 - sum_i min(a_i, b_i) / sum_i max(a_i, b_i)
/// over instance multiplicities.
inline double bag_jaccard_distance(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    std::unordered_map<std::size_t, std::pair<std::size_t, std::size_t>> counts;
    for (auto g : a) ++counts[g].first;
    for (auto g : b) ++counts[g].second;
    std::size_t inter = 0, uni = 0;
    for (const auto& [g, c] : counts) {
        inter += std::min(c.first, c.second);
        uni += std::max(c.first, c.second);
    }
    return uni == 0 ? 0.0 : 1.0 - static_cast<double>(inter) / static_cast<double>(uni);
}

inline double mean_pairwise_jaccard(const std::vector<std::vector<std::size_t>>& bags) {
    const std::size_t n = bags.size();
    if (n < 2) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) s += bag_jaccard_distance(bags[i], bags[j]);
    return s / static_cast<double>(n * (n - 1) / 2);
}

}  // namespace poolforge
