/// @file acceptance.cpp
/// @brief End-to-end acceptance checks. Prints one PASS/FAIL line per
/// criterion and exits non-zero if any fails.

#include "helpers.hpp"
#include "oracles.hpp"

#include <poolforge/poolforge.hpp>

#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

using namespace poolforge;
namespace fs = std::filesystem;
namespace cx = poolforge::complexity;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v, int digits = 2) {
    std::ostringstream o;
    o << std::fixed << std::setprecision(digits) << v;
    return o.str();
}

std::string data_file(const std::string& name) { return std::string(POOLFORGE_DATA_DIR) + "/" + name + ".csv"; }

// --- 1. complexity measures against brute force --------------------------------

Outcome complexity_oracles() {
    using testing_util::make;
    std::size_t checked = 0, mismatches = 0;
    double worst = 0.0;
    std::string first_bad;
    auto check = [&](const char* what, double got, double want) {
        ++checked;
        const double diff = std::abs(got - want);
        worst = std::max(worst, diff);
        if (!(diff <= 1e-9)) {
            ++mismatches;
            if (first_bad.empty()) first_bad = std::string(what) + " got " + fmt(got, 12) + " want " + fmt(want, 12);
        }
    };

    Rng rng(20240601);
    const std::size_t datasets = 60;
    for (std::size_t t = 0; t < datasets; ++t) {
        const std::size_t y = 2 + rng.index(3);
        const std::size_t f = 1 + rng.index(4);
        // f + 1 points per class keep the within-class scatter of every pair nonsingular
        const std::size_t n = std::min<std::size_t>(30, y * (f + 1) + rng.index(20));
        const auto d = testing_util::random_dataset(rng, n, f, y, f + 1, rng.uniform01());
        const auto o = testing_util::to_oracle(d);
        const std::uint64_t seed = rng.next();
        check("F1", cx::f1(d), oracle::f1(o));
        check("F1v", cx::f1v(d), oracle::f1v(o));
        check("F2", cx::f2(d), oracle::f2(o));
        check("F3", cx::f3(d), oracle::f3(o));
        check("F4", cx::f4(d), oracle::f4(o));
        check("N1", cx::n1(d), oracle::n1(o));
        check("N2", cx::n2(d), oracle::n2(o));
        check("N3", cx::n3(d), oracle::n3(o));
        check("N4", cx::n4(d, seed), oracle::n4(o, seed));
        check("T1", cx::t1(d), oracle::t1(o));
        check("LSC", cx::lsc(d), oracle::lsc(o));
    }

    // hand-traced cases
    const auto xor4 = make({{0, 0}, {1, 1}, {0, 1}, {1, 0}}, {0, 0, 1, 1});
    check("XOR N3", cx::n3(xor4), 1.0);
    check("XOR F4", cx::f4(xor4), 1.0);
    check("clusters N1", cx::n1(make({{0, 0}, {0.1, 0}, {5, 0}, {5.1, 0}}, {0, 0, 1, 1})), 0.5);
    check("F1 example", cx::f1(make({{0}, {1}, {2}, {3}}, {0, 0, 1, 1})), 1.0 / 9.0);
    check("alternating N1", cx::n1(make({{0}, {1}, {2}, {3}}, {0, 1, 0, 1})), 1.0);

    return {mismatches == 0, std::to_string(datasets) + " random datasets, " + std::to_string(checked) +
                                 " comparisons, max |diff| " + fmt(worst, 15) +
                                 (first_bad.empty() ? "" : ", first mismatch: " + first_bad)};
}

// --- 2. NSGA-II front 0 ----------------------------------------------------------

Outcome nsga2_front() {
    Rng rng(77);
    std::size_t bad = 0;
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 1 + rng.index(200);
        const bool coarse = t % 2 == 0;  // half the sets with many exact ties
        nsga2::ObjectiveMatrix obj(n, std::vector<double>(3));
        for (auto& row : obj)
            for (auto& v : row) v = coarse ? std::floor(rng.uniform01() * 5.0) : rng.uniform01();
        if (nsga2::non_dominated_sort(obj)[0] != oracle::pareto_front(obj)) ++bad;
    }
    return {bad == 0, "100 sets of up to 200 individuals, " + std::to_string(bad) + " mismatching fronts"};
}

// --- 3. dispersion, DDV and global dispersion -------------------------------------

Outcome fitness_arithmetic() {
    Rng rng(5);
    std::vector<std::string> failed;
    auto expect = [&](bool ok, const std::string& what) {
        if (!ok && std::find(failed.begin(), failed.end(), what) == failed.end()) failed.push_back(what);
    };

    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 2 + rng.index(30);
        // dyadic values keep every sum exact, so permuted results must be bit-identical
        std::vector<double> v(n);
        for (auto& x : v) x = static_cast<double>(rng.index(1024)) / 1024.0;
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        rng.shuffle(perm);
        std::vector<double> pv(n);
        for (std::size_t i = 0; i < n; ++i) pv[i] = v[perm[i]];
        const auto d = dispersion(v);
        const auto pd = dispersion(pv);
        for (std::size_t i = 0; i < n; ++i) expect(pd[i] == d[perm[i]], "dispersion permutation invariance");
        expect(std::all_of(d.begin(), d.end(), [](double x) { return x >= 0.0; }), "dispersion non-negative");

        const std::vector<double> same(n, v[0]);
        for (double x : dispersion(same)) expect(x == 0.0, "identical values give zero dispersion");

        // global dispersion: permutation of individuals, N = 2, identical population
        std::vector<std::vector<double>> f(n, std::vector<double>(3));
        for (auto& row : f)
            for (auto& x : row) x = static_cast<double>(rng.index(1024)) / 1024.0;
        std::vector<std::vector<double>> pf(n);
        for (std::size_t i = 0; i < n; ++i) pf[i] = f[perm[i]];
        const double g = g_disp(f);
        expect(std::abs(g_disp(pf) - g) <= 1e-12 * std::max(1.0, g), "g_disp permutation invariance");
        std::vector<std::vector<double>> copies(n, f[0]);
        expect(g_disp(copies) == 0.0, "identical population gives zero g_disp");
        double sq = 0.0;
        for (std::size_t h = 0; h < 3; ++h) sq += (f[0][h] - f[1][h]) * (f[0][h] - f[1][h]);
        expect(g_disp({f[0], f[1]}) == std::sqrt(sq), "g_disp with N = 2 is the pair distance");

        // double fault and DDV
        const std::size_t m = 1 + rng.index(150);
        std::vector<std::vector<bool>> rows(n, std::vector<bool>(m));
        for (auto& r : rows)
            for (std::size_t j = 0; j < m; ++j) r[j] = rng.bernoulli(0.7);
        const auto table = PredictionTable::from_rows(rows);
        const auto all = ddv_all(table);
        for (std::size_t i = 0; i < n; ++i) {
            double brute = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double df = double_fault(rows[i], rows[j]);
                expect(df >= 0.0 && df <= 1.0, "double fault within [0, 1]");
                expect(df == double_fault(rows[j], rows[i]), "double fault symmetric");
                expect(df == table.double_fault(i, j), "packed double fault equals direct count");
                if (j != i) brute += df;
            }
            brute /= static_cast<double>(n - 1);
            expect(ddv(table, i) == brute, "DDV equals brute-force pairwise mean");
            expect(all[i] == brute, "batched DDV equals brute-force pairwise mean");
        }
    }
    // N = 2 degenerate dispersion: both values get |a - b|
    const std::vector<double> two = {0.25, 0.75};
    const auto d2 = dispersion(two);
    expect(d2[0] == 0.5 && d2[1] == 0.5, "dispersion with N = 2 is |a - b|");

    std::string detail = "200 random populations";
    for (const auto& f : failed) detail += "; failed: " + f;
    return {failed.empty(), detail};
}

// --- 4. chosen generation never worse than the initial one -------------------------

Outcome best_generation() {
    std::size_t runs = 0, ok = 0;
    for (const char* name : {"wine", "heart", "sonar"}) {
        const auto full = load_csv(data_file(name));
        for (std::uint64_t s = 0; s < 20; ++s) {
            const auto split = stratified_split(full, {0.5, 0.25, 0.25}, derive_seed(s, 1));
            auto train = full.subset(split.train);
            auto val = full.subset(split.validation);
            const auto sc = Scaler::fit(train);
            train = sc.apply(std::move(train));
            val = sc.apply(std::move(val));
            MetricSelectionConfig mc;
            mc.seed = derive_seed(s, 2);
            mc.iterations = 5;
            const auto tally = select_metrics(train, mc);
            GaConfig cfg;
            cfg.seed = derive_seed(s, 3);
            const auto r = run_pgdcs(train, val, tally.cm1, tally.cm2, cfg);
            ++runs;
            ok += r.history[r.chosen_generation].g_disp >= r.history[0].g_disp ? 1 : 0;
        }
    }
    return {ok == runs, std::to_string(ok) + "/" + std::to_string(runs) + " runs (wine, heart, sonar x 20 seeds)"};
}

// --- 5 and 6. reproduction runs ------------------------------------------------------

const ExperimentReport& reproduction_report() {
    static const ExperimentReport report = [] {
        ExperimentConfig cfg;
        for (const char* name : {"wine", "heart", "ionosphere", "sonar", "wdbc"}) cfg.datasets.push_back(data_file(name));
        cfg.replications = 20;
        cfg.combiners = {Combiner::mvr, Combiner::ola, Combiner::knora_u};
        cfg.seed = 0;
        return run_experiment(cfg);
    }();
    return report;
}

double mean_accuracy(const ExperimentReport& rep, const std::string& dataset, const std::string& method,
                     const std::string& combiner) {
    std::vector<double> v;
    for (const auto& r : rep.rows)
        if (r.dataset == dataset && r.method == method && r.combiner == combiner) v.push_back(r.accuracy);
    return 100.0 * stats::mean(v);
}

Outcome table3_reproduction() {
    const auto& rep = reproduction_report();
    struct Target {
        const char* dataset;
        const char* method;
        double expected;
        double tolerance;
    };
    const std::array<Target, 4> targets = {{{"wine", "bagging", 97.5, 3.0},
                                            {"wine", "pgdcs", 98.0, 3.0},
                                            {"heart", "bagging", 82.5, 4.0},
                                            {"heart", "pgdcs", 85.4, 4.0}}};
    bool pass = rep.failures.empty();
    std::string detail;
    for (const auto& t : targets) {
        const double m = mean_accuracy(rep, t.dataset, t.method, "mvr");
        const bool ok = std::abs(m - t.expected) <= t.tolerance;
        pass = pass && ok;
        detail += std::string(detail.empty() ? "" : ", ") + t.dataset + " " + t.method + " " + fmt(m) + " (target " +
                  fmt(t.expected, 1) + " +/- " + fmt(t.tolerance, 1) + (ok ? ")" : ", out of range)");
    }
    return {pass, "MVR, 20 replications: " + detail};
}

Outcome directional_claim() {
    const auto& rep = reproduction_report();
    std::size_t cells = 0, wins = 0;
    std::string losses;
    for (const char* d : {"wine", "heart", "ionosphere", "sonar", "wdbc"})
        for (const char* c : {"mvr", "ola", "knora-u"}) {
            const double p = mean_accuracy(rep, d, "pgdcs", c);
            const double b = mean_accuracy(rep, d, "bagging", c);
            ++cells;
            if (p >= b)
                ++wins;
            else
                losses += std::string(losses.empty() ? "" : ", ") + d + "/" + c + " " + fmt(p) + "<" + fmt(b);
        }
    const double share = static_cast<double>(wins) / static_cast<double>(cells);
    return {share >= 0.6 && rep.failures.empty(), std::to_string(wins) + "/" + std::to_string(cells) + " cells (" +
                                                      fmt(100.0 * share, 1) + "%, need >= 60%); PGDCS behind in: " +
                                                      losses};
}

// --- 7. Wilcoxon ----------------------------------------------------------------------

Outcome wilcoxon_tables() {
    const std::array<int, 20> table = {0, 2, 3, 5, 8, 10, 13, 17, 21, 25, 29, 34, 40, 46, 52, 58, 65, 73, 81, 89};
    std::size_t crit_bad = 0;
    for (std::size_t n = 6; n <= 25; ++n) {
        // critical value from enumeration: largest T with P <= 0.05
        int enumerated = -1;
        if (n <= 20)
            for (long t = 0; oracle::wilcoxon_p_enumerated(n, t) <= 0.05; ++t) enumerated = static_cast<int>(t);
        const int got = stats::wilcoxon_critical_value(n, 0.05);
        if (got != table[n - 6] || (n <= 20 && enumerated != got)) ++crit_bad;
    }
    std::size_t p_checked = 0, p_bad = 0;
    double worst = 0.0;
    for (std::size_t n = 1; n <= 20; ++n) {
        std::vector<double> ranks(n);
        std::iota(ranks.begin(), ranks.end(), 1.0);
        const long max_w = static_cast<long>(n * (n + 1) / 2);
        for (long w = 0; w <= max_w; ++w) {
            const double diff =
                std::abs(stats::exact_p_value(ranks, static_cast<double>(w)) - oracle::wilcoxon_p_enumerated(n, w));
            worst = std::max(worst, diff);
            ++p_checked;
            p_bad += diff <= 1e-12 ? 0 : 1;
        }
    }
    return {crit_bad == 0 && p_bad == 0, "critical values n=6..25: " + std::to_string(20 - crit_bad) +
                                             "/20 match; p-values: " + std::to_string(p_checked) +
                                             " checked against enumeration (n <= 20), max |diff| " + fmt(worst, 16)};
}

// --- 8. single-objective ablation -----------------------------------------------------

Outcome single_objective_ablation() {
    std::size_t lower = 0;
    std::string detail;
    const std::array<std::pair<const char*, std::uint64_t>, 3> runs = {{{"wine", 1}, {"heart", 2}, {"sonar", 3}}};
    for (const auto& [name, seed] : runs) {
        const auto full = load_csv(data_file(name));
        const auto split = stratified_split(full, {0.5, 0.25, 0.25}, derive_seed(seed, 1));
        const auto sc = Scaler::fit(full.subset(split.train));
        const auto train = sc.apply(full.subset(split.train));
        const auto val = sc.apply(full.subset(split.validation));
        MetricSelectionConfig mc;
        mc.seed = derive_seed(seed, 2);
        mc.iterations = 5;
        const auto tally = select_metrics(train, mc);
        GaConfig cfg;
        cfg.seed = derive_seed(seed, 3);
        auto bags = [](const PgdcsResult& r) {
            std::vector<std::vector<std::size_t>> out;
            for (const auto& m : r.pool.members) out.push_back(m.bag);
            return out;
        };
        const double full_j = mean_pairwise_jaccard(bags(run_pgdcs(train, val, tally.cm1, tally.cm2, cfg)));
        cfg.objectives = {Objective::phi_cm1};
        const double single_j = mean_pairwise_jaccard(bags(run_pgdcs(train, val, tally.cm1, tally.cm2, cfg)));
        lower += single_j < full_j ? 1 : 0;
        detail += std::string(detail.empty() ? "" : ", ") + name + " " + fmt(single_j, 4) + " vs " + fmt(full_j, 4);
    }
    return {lower == runs.size(), "mean pairwise Jaccard, single objective vs three objectives: " + detail};
}

// --- 9. CLI determinism -------------------------------------------------------------------

struct Captured {
    int status = -1;
    std::string out;
};

Captured run_cli(const std::string& args) {
    const std::string cmd = std::string("\"") + POOLFORGE_CLI + "\" " + args + " 2>/dev/null";
    Captured c;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return c;
    std::array<char, 4096> buf;
    std::size_t got;
    while ((got = std::fread(buf.data(), 1, buf.size(), p)) > 0) c.out.append(buf.data(), got);
    c.status = pclose(p);
    return c;
}

Outcome cli_determinism() {
    const fs::path dir = fs::temp_directory_path() / "poolforge_acceptance_cli";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string d = dir.string();
    const std::string wine = data_file("wine");

    // inputs for the pool commands: one fixed split of wine
    {
        const auto full = load_csv(wine);
        const auto s = stratified_split(full, {0.5, 0.25, 0.25}, 1);
        write_csv(full.subset(s.train), d + "/train.csv");
        write_csv(full.subset(s.validation), d + "/dsel.csv");
        write_csv(full.subset(s.test), d + "/test.csv");
        std::string a = "dataset,combiner,replication,accuracy\n", b = a;
        Rng rng(3);
        for (int r = 0; r < 12; ++r) {
            a += "x,mvr," + std::to_string(r) + "," + fmt(0.8 + 0.1 * rng.uniform01(), 6) + "\n";
            b += "x,mvr," + std::to_string(r) + "," + fmt(0.8 + 0.1 * rng.uniform01(), 6) + "\n";
        }
        detail::write_text(dir / "a.csv", a);
        detail::write_text(dir / "b.csv", b);
    }
    const std::string pool = d + "/pool.json";
    if (run_cli("--seed 5 --json generate --method pgdcs --data " + d + "/train.csv --dsel " + d +
                "/dsel.csv --pool-size 12 --generations 3 --out " + pool)
            .status != 0)
        return {false, "could not create the pool used by evaluate"};

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"fetch", "fetch banana p2 --n 150 --noise 0.5 --dest " + d + "/fetched"},
        {"complexity", "complexity --data " + wine + " --measures all"},
        {"select-metrics", "select-metrics --data " + wine + " --iters 3 --subsets 20"},
        {"generate pgdcs", "generate --method pgdcs --data " + d + "/train.csv --dsel " + d +
                               "/dsel.csv --pool-size 12 --generations 3"},
        {"generate bagging", "generate --method bagging --data " + d + "/train.csv --pool-size 12"},
        {"evaluate", "evaluate --pool " + pool + " --test " + d + "/test.csv --dsel " + d + "/dsel.csv --combiner all"},
        {"experiment", "experiment --data " + wine + " --replications 2 --pool-size 10 --generations 2 --iters 2 "
                                                     "--subsets 10 --combiners mvr,ola,knora-u --out " +
                           d + "/exp"},
        {"compare", "compare --a " + d + "/a.csv --b " + d + "/b.csv"},
    };
    std::size_t ok = 0;
    std::string bad;
    for (const auto& [label, args] : commands) {
        std::array<Captured, 3> runs;
        const std::array<std::string, 3> prefixes = {"--seed 42 --workers 1 --json ", "--seed 42 --workers 1 --json ",
                                                     "--seed 42 --workers 8 --json "};
        for (std::size_t i = 0; i < 3; ++i) {
            fs::remove_all(dir / "exp");
            fs::remove_all(dir / "fetched");
            runs[i] = run_cli(prefixes[i] + args);
        }
        bool good = runs[0].status == 0 && !runs[0].out.empty();
        good = good && nlohmann::json::accept(runs[0].out);
        good = good && runs[0].out == runs[1].out && runs[0].out == runs[2].out;
        if (good)
            ++ok;
        else
            bad += std::string(bad.empty() ? "" : ", ") + label;
    }
    fs::remove_all(dir);
    return {ok == commands.size(), std::to_string(ok) + "/" + std::to_string(commands.size()) +
                                       " subcommand invocations byte-identical across two runs and --workers 1 vs 8" +
                                       (bad.empty() ? "" : "; differing: " + bad)};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"1 complexity measures match brute-force oracles", complexity_oracles},
        {"2 NSGA-II front 0 matches brute-force domination", nsga2_front},
        {"3 dispersion / DDV / global dispersion properties", fitness_arithmetic},
        {"4 chosen generation g_disp >= initial g_disp", best_generation},
        {"5 Wine and Heart MVR accuracy within tolerance", table3_reproduction},
        {"6 PGDCS >= Bagging in at least 60% of cells", directional_claim},
        {"7 Wilcoxon critical values and exact p-values", wilcoxon_tables},
        {"8 single-objective ablation lowers bag diversity", single_objective_ablation},
        {"9 CLI output deterministic", cli_determinism},
    };
    std::set<std::string> only;
    for (int i = 1; i < argc; ++i) only.insert(argv[i]);

    int failures = 0;
    for (const auto& [name, fn] : criteria) {
        const std::string id = name.substr(0, name.find(' '));
        if (!only.empty() && !only.count(id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << name << " [" << fmt(secs, 1) << " s]: " << o.detail
                  << std::endl;
        failures += o.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
