// poolforge command-line interface.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 runtime failure.

#include <poolforge/fetch.hpp>
#include <poolforge/poolforge.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace pf = poolforge;
using nlohmann::json;

namespace {

struct Globals {
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    bool json = false;
    bool scale = true;
};

void emit(const Globals& g, const json& j, const std::string& text) {
    if (g.json)
        std::cout << j.dump(2) << "\n";
    else
        std::cout << text;
}

pf::Dataset load_scaled(const std::string& path, bool scale) {
    pf::Dataset d = pf::load_csv(path);
    return scale ? pf::Scaler::fit(d).apply(std::move(d)) : d;
}

std::vector<pf::complexity::Measure> parse_measure_list(const std::vector<std::string>& items) {
    std::vector<pf::complexity::Measure> out;
    for (const auto& item : items) {
        if (item == "all") {
            out.assign(pf::complexity::all_measures.begin(), pf::complexity::all_measures.end());
            continue;
        }
        out.push_back(pf::complexity::parse_measure(item));
    }
    if (out.empty()) throw pf::ArgumentError("no measures given");
    return out;
}

std::vector<pf::Combiner> parse_combiner_list(const std::vector<std::string>& items) {
    std::vector<pf::Combiner> out;
    for (const auto& item : items) {
        if (item == "all") {
            out.assign(pf::all_combiners.begin(), pf::all_combiners.end());
            continue;
        }
        out.push_back(pf::parse_combiner(item));
    }
    if (out.empty()) throw pf::ArgumentError("no combiners given");
    return out;
}

std::optional<pf::complexity::Measure> parse_auto_measure(const std::string& s, pf::complexity::Family fam) {
    if (s == "auto") return std::nullopt;
    const auto m = pf::complexity::parse_measure(s);
    if (pf::complexity::family(m) != fam)
        throw pf::ArgumentError(std::string("measure ") + pf::complexity::code(m) + " is in the wrong family");
    return m;
}

json tally_json(const pf::VoteTally& t) {
    json votes = json::object();
    for (auto m : pf::complexity::all_measures) votes[pf::complexity::code(m)] = t.votes_for(m);
    return {{"votes", votes},
            {"iterations", t.iterations},
            {"cm1", pf::complexity::code(t.cm1)},
            {"cm2", pf::complexity::code(t.cm2)}};
}

// --- subcommands --------------------------------------------------------------------

struct FetchArgs {
    std::vector<std::string> ids;
    std::string dest = "data";
    std::string mirror;
    std::size_t n = 200;
    double noise = 0.0;
};

int run_fetch(const Globals& g, const FetchArgs& a) {
    json out = json::array();
    std::string text;
    for (const auto& id : a.ids) {
        if (id == "p2" || id == "banana" || id == "blobs") {
            auto d = pf::generate_synthetic(pf::parse_synthetic_kind(id), a.n, a.noise, g.seed);
            std::filesystem::create_directories(a.dest);
            const auto path = (std::filesystem::path(a.dest) / (id + ".csv")).string();
            pf::write_csv(d, path);
            out.push_back({{"id", id}, {"path", path}, {"source", "synthetic"}, {"rows", d.size()},
                           {"features", d.n_features}, {"classes", d.num_classes()}});
            text += id + ": generated " + std::to_string(d.size()) + " rows -> " + path + "\n";
            continue;
        }
        const auto r = pf::fetch_dataset(id, a.dest, a.mirror);
        out.push_back({{"id", id}, {"path", r.path}, {"source", r.source}, {"sha256", r.sha256},
                       {"rows", r.rows}, {"features", r.features}, {"classes", r.classes}});
        text += id + ": " + std::to_string(r.rows) + "x" + std::to_string(r.features) + ", " +
                std::to_string(r.classes) + " classes -> " + r.path + "\n";
    }
    emit(g, out, text);
    return 0;
}

struct ComplexityArgs {
    std::string data;
    std::vector<std::string> measures = {"all"};
};

int run_complexity(const Globals& g, const ComplexityArgs& a) {
    const auto d = load_scaled(a.data, g.scale);
    const auto ms = parse_measure_list(a.measures);
    const auto values = pf::complexity::compute(ms, d, g.seed);
    json mj = json::object();
    std::string text;
    for (std::size_t i = 0; i < ms.size(); ++i) {
        mj[pf::complexity::code(ms[i])] = values[i];
        text += std::string(pf::complexity::code(ms[i])) + " " + pf::detail::format_double(values[i]) + "\n";
    }
    const json out = {{"measures", mj},
                      {"bag", {{"name", d.name},
                               {"rows", d.size()},
                               {"features", d.n_features},
                               {"classes", d.num_classes()},
                               {"dropped_rows", d.dropped_rows},
                               {"scaled", g.scale}}}};
    emit(g, out, text);
    return 0;
}

struct SelectArgs {
    std::string data;
    std::size_t iters = 20;
    std::size_t subsets = 100;
    double frac = 0.5;
};

int run_select(const Globals& g, const SelectArgs& a) {
    const auto d = load_scaled(a.data, g.scale);
    pf::MetricSelectionConfig cfg;
    cfg.iterations = a.iters;
    cfg.n_subsets = a.subsets;
    cfg.subset_frac = a.frac;
    cfg.seed = g.seed;
    cfg.workers = g.workers;
    const auto t = pf::select_metrics(d, cfg);
    std::string text;
    for (auto m : pf::complexity::all_measures)
        text += std::string(pf::complexity::code(m)) + " " + std::to_string(t.votes_for(m)) + "\n";
    text += std::string("cm1 ") + pf::complexity::code(t.cm1) + "\ncm2 " + pf::complexity::code(t.cm2) + "\n";
    emit(g, tally_json(t), text);
    return 0;
}

struct GenerateArgs {
    std::string method = "pgdcs";
    std::string data;
    std::string dsel;
    std::size_t pool_size = 100;
    std::size_t generations = 20;
    std::size_t children = 100;
    std::size_t offspring = 100;
    double crossover = 0.9;
    double mutation = 0.2;
    double bag_frac = 0.5;
    std::string cm1 = "auto";
    std::string cm2 = "auto";
    std::size_t epochs = 100;
    std::string out;
    std::string history;
};

int run_generate(const Globals& g, const GenerateArgs& a) {
    pf::Dataset train = pf::load_csv(a.data);
    std::optional<pf::Scaler> scaler;
    if (g.scale) {
        scaler = pf::Scaler::fit(train);
        train = scaler->apply(std::move(train));
    }
    pf::PerceptronConfig learner;
    learner.epochs = a.epochs;

    pf::Pool pool;
    json info = json::object();
    if (a.method == "bagging") {
        pf::BaggingConfig cfg;
        cfg.pool_size = a.pool_size;
        cfg.bag_frac = a.bag_frac;
        cfg.seed = g.seed;
        cfg.workers = g.workers;
        cfg.learner = learner;
        pool = pf::bagging_generate(train, cfg);
    } else if (a.method == "pgdcs") {
        if (a.dsel.empty()) throw pf::ArgumentError("--dsel is required for --method pgdcs");
        pf::Dataset val = pf::align_labels(pf::load_csv(a.dsel), train.class_names);
        if (scaler) val = scaler->apply(std::move(val));
        auto cm1 = parse_auto_measure(a.cm1, pf::complexity::Family::overlapping);
        auto cm2 = parse_auto_measure(a.cm2, pf::complexity::Family::neighborhood);
        if (!cm1 || !cm2) {
            pf::MetricSelectionConfig mc;
            mc.seed = pf::derive_seed(g.seed, 2);
            mc.workers = g.workers;
            const auto t = pf::select_metrics(train, mc);
            info["metric_selection"] = tally_json(t);
            if (!cm1) cm1 = t.cm1;
            if (!cm2) cm2 = t.cm2;
        }
        pf::GaConfig ga;
        ga.population = a.pool_size;
        ga.generations = a.generations;
        ga.children = a.children;
        ga.offspring = a.offspring;
        ga.crossover_prob = a.crossover;
        ga.mutation_prob = a.mutation;
        ga.bag_frac = a.bag_frac;
        ga.seed = pf::derive_seed(g.seed, 3);
        ga.workers = g.workers;
        ga.learner = learner;
        auto result = pf::run_pgdcs(train, val, *cm1, *cm2, ga);
        if (!a.history.empty()) {
            std::ofstream f(a.history, std::ios::binary);
            if (!f) throw pf::RuntimeFailure("cannot write " + a.history);
            f << pf::generation_history_jsonl(result.history);
        }
        pool = std::move(result.pool);
    } else {
        throw pf::ArgumentError("unknown method '" + a.method + "' (expected pgdcs or bagging)");
    }
    pool.metadata.seed = g.seed;
    pool.metadata.scaler = scaler;
    const json pj = pf::to_json(pool);

    if (a.out.empty()) {
        std::cout << pj.dump(2) << "\n";
        return 0;
    }
    {
        std::ofstream f(a.out, std::ios::binary);
        if (!f) throw pf::RuntimeFailure("cannot write " + a.out);
        f << pj.dump(2) << "\n";
    }
    info["out"] = a.out;
    info["method"] = pool.metadata.method;
    info["members"] = pool.size();
    info["metadata"] = pj.at("metadata");
    std::string text = "wrote " + std::to_string(pool.size()) + " " + pool.metadata.method + " members to " + a.out;
    if (pool.metadata.chosen_generation) text += " (generation " + std::to_string(*pool.metadata.chosen_generation) + ")";
    emit(g, info, text + "\n");
    return 0;
}

struct EvaluateArgs {
    std::string pool;
    std::string test;
    std::string dsel;
    std::vector<std::string> combiners = {"all"};
    std::size_t k = 7;
};

int run_evaluate(const Globals& g, const EvaluateArgs& a) {
    const pf::Pool pool = pf::pool_from_json(json::parse(pf::read_file(a.pool), nullptr, true));
    pf::Dataset test = pf::align_labels(pf::load_csv(a.test), pool.metadata.class_names);
    auto combiners = parse_combiner_list(a.combiners);
    const bool needs_dsel =
        std::any_of(combiners.begin(), combiners.end(), [](pf::Combiner c) { return c != pf::Combiner::mvr; });
    pf::Dataset dsel;
    if (needs_dsel) {
        if (a.dsel.empty()) throw pf::ArgumentError("--dsel is required for dynamic selection combiners");
        dsel = pf::align_labels(pf::load_csv(a.dsel), pool.metadata.class_names);
    } else {
        dsel = test;  // MVR ignores DSEL
    }
    if (g.scale && pool.metadata.scaler) {
        test = pool.metadata.scaler->apply(std::move(test));
        dsel = pool.metadata.scaler->apply(std::move(dsel));
    }
    if (test.n_features != pool.metadata.num_features)
        throw pf::DataError("test data has " + std::to_string(test.n_features) + " features, pool expects " +
                            std::to_string(pool.metadata.num_features));
    const pf::DynamicSelector sel(pool, dsel);
    const auto acc = sel.accuracy(combiners, test, a.k);
    json out = json::object();
    std::string text;
    for (std::size_t i = 0; i < combiners.size(); ++i) {
        out[pf::to_string(combiners[i])] = acc[i];
        text += pf::to_string(combiners[i]) + " " + pf::detail::format_double(acc[i]) + "\n";
    }
    emit(g, {{"accuracy", out}, {"test_rows", test.size()}, {"k", a.k}}, text);
    return 0;
}

struct ExperimentArgs {
    std::vector<std::string> data;
    std::size_t replications = 20;
    std::size_t pool_size = 100;
    std::size_t generations = 20;
    std::size_t iters = 20;
    std::size_t subsets = 100;
    std::size_t epochs = 100;
    std::size_t k = 7;
    double bag_frac = 0.5;
    std::vector<std::string> combiners = {"all"};
    std::string cm1 = "auto";
    std::string cm2 = "auto";
    std::string out;
    std::string format = "markdown";
};

int run_experiment_cmd(const Globals& g, const ExperimentArgs& a) {
    pf::ExperimentConfig cfg;
    cfg.datasets = a.data;
    cfg.replications = a.replications;
    cfg.pool_size = a.pool_size;
    cfg.ga.generations = a.generations;
    cfg.ga.learner.epochs = a.epochs;
    cfg.metricsel.iterations = a.iters;
    cfg.metricsel.n_subsets = a.subsets;
    cfg.bagging_bag_frac = a.bag_frac;
    cfg.k = a.k;
    cfg.combiners = parse_combiner_list(a.combiners);
    cfg.cm1 = parse_auto_measure(a.cm1, pf::complexity::Family::overlapping);
    cfg.cm2 = parse_auto_measure(a.cm2, pf::complexity::Family::neighborhood);
    cfg.seed = g.seed;
    cfg.workers = g.workers;
    cfg.scale = g.scale;
    cfg.output_dir = a.out;
    const auto format = pf::parse_report_format(a.format);

    const auto report = pf::run_experiment(cfg, &std::cerr);
    if (report.empty()) throw pf::RuntimeFailure("every replication failed; nothing to report");
    if (!a.out.empty()) {
        namespace fs = std::filesystem;
        for (auto [fmt, name] : {std::pair{pf::ReportFormat::json, "report.json"},
                                 {pf::ReportFormat::csv, "report.csv"},
                                 {pf::ReportFormat::markdown, "report.md"}}) {
            std::ofstream f(fs::path(a.out) / name, std::ios::binary);
            if (!f) throw pf::RuntimeFailure("cannot write report files in " + a.out);
            f << pf::render_report(report, fmt);
        }
    }
    if (g.json)
        std::cout << pf::to_json(report).dump(2) << "\n";
    else
        std::cout << pf::render_report(report, format);
    return report.failures.empty() ? 0 : 3;
}

struct CompareArgs {
    std::string a;
    std::string b;
    std::string method_a;
    std::string method_b;
    double alpha = 0.05;
    double tie_eps = 0.0;
};

int run_compare(const Globals& g, const CompareArgs& args) {
    using Key = std::pair<std::string, std::string>;  // dataset, combiner
    auto load = [](const std::string& path, const std::string& method) {
        std::map<Key, std::map<std::size_t, double>> out;
        for (const auto& r : pf::parse_results_csv(pf::read_file(path))) {
            if (!method.empty() && r.method != method) continue;
            auto& slot = out[{r.dataset, r.combiner}];
            if (slot.count(r.replication))
                throw pf::DataError(path + ": duplicate replication " + std::to_string(r.replication) + " for " +
                                    r.dataset + (r.combiner.empty() ? "" : "/" + r.combiner) +
                                    " (use --method-a/--method-b to pick one method)");
            slot[r.replication] = r.accuracy;
        }
        return out;
    };
    const auto a = load(args.a, args.method_a);
    const auto b = load(args.b, args.method_b);

    json cells = json::array();
    std::vector<double> mean_a, mean_b;
    std::string text;
    for (const auto& [key, ra] : a) {
        const auto it = b.find(key);
        if (it == b.end()) continue;
        std::vector<double> pa, pb, all_a, all_b;
        for (const auto& [r, v] : ra) {
            all_a.push_back(v);
            if (auto jt = it->second.find(r); jt != it->second.end()) {
                pa.push_back(v);
                pb.push_back(jt->second);
            }
        }
        for (const auto& [r, v] : it->second) all_b.push_back(v);
        json cell = {{"dataset", key.first},
                     {"combiner", key.second},
                     {"mean_a", pf::stats::mean(all_a)},
                     {"mean_b", pf::stats::mean(all_b)},
                     {"pairs", pa.size()}};
        std::string p_text = "n/a";
        try {
            const auto w = pf::stats::wilcoxon_signed_rank(pa, pb, args.alpha);
            cell["wilcoxon"] = pf::to_json(w);
            p_text = pf::detail::format_double(w.p_value) + (w.significant ? " *" : "");
        } catch (const pf::ArgumentError& e) {
            cell["wilcoxon"] = nullptr;
            cell["note"] = e.what();
        }
        mean_a.push_back(pf::stats::mean(all_a));
        mean_b.push_back(pf::stats::mean(all_b));
        cells.push_back(cell);
        text += key.first + (key.second.empty() ? "" : " " + key.second) + ": " +
                pf::detail::format_double(mean_a.back()) + " vs " + pf::detail::format_double(mean_b.back()) +
                ", p = " + p_text + "\n";
    }
    if (cells.empty()) throw pf::DataError("the two result files share no dataset");
    const auto t = pf::stats::win_tie_loss(mean_a, mean_b, args.tie_eps);
    text += "wins " + std::to_string(t.wins) + ", ties " + std::to_string(t.ties) + ", losses " +
            std::to_string(t.losses) + "\n";
    emit(g, {{"alpha", args.alpha}, {"cells", cells}, {"win_tie_loss", pf::to_json(t)}}, text);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"poolforge: diverse classifier pools from evolved instance bags"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--seed", g.seed, "Master random seed");
    app.add_option("--workers", g.workers, "Worker threads")->check(CLI::PositiveNumber);
    app.add_flag("--json", g.json, "Machine-readable JSON output");
    app.add_flag("--scale,!--no-scale", g.scale, "Min-max scale features (default on)");

    FetchArgs fa;
    auto* fetch = app.add_subcommand("fetch", "Download catalog datasets (or generate p2/banana/blobs)");
    fetch->add_option("ids", fa.ids, "Dataset ids")->required();
    fetch->add_option("--dest", fa.dest, "Output directory");
    fetch->add_option("--mirror", fa.mirror, "Directory with <id>.dat mirror copies");
    fetch->add_option("--n", fa.n, "Rows for synthetic datasets");
    fetch->add_option("--noise", fa.noise, "Noise level for synthetic datasets");

    ComplexityArgs ca;
    auto* cx = app.add_subcommand("complexity", "Compute complexity measures of a dataset");
    cx->add_option("--data", ca.data, "CSV file")->required();
    cx->add_option("--measures", ca.measures, "Measure codes or 'all'")->delimiter(',');

    SelectArgs sa;
    auto* sel = app.add_subcommand("select-metrics", "Vote for the most dispersed complexity measures");
    sel->add_option("--data", sa.data, "Training CSV")->required();
    sel->add_option("--iters", sa.iters, "Voting iterations");
    sel->add_option("--subsets", sa.subsets, "Resamples per iteration");
    sel->add_option("--frac", sa.frac, "Resample size as a fraction of the data");

    GenerateArgs ga;
    auto* gen = app.add_subcommand("generate", "Generate a classifier pool");
    gen->add_option("--method", ga.method, "pgdcs or bagging")->check(CLI::IsMember({"pgdcs", "bagging"}));
    gen->add_option("--data", ga.data, "Training CSV")->required();
    gen->add_option("--dsel", ga.dsel, "Validation CSV (pgdcs)");
    gen->add_option("--pool-size", ga.pool_size, "Pool size (GA population)");
    gen->add_option("--generations", ga.generations, "GA generations");
    gen->add_option("--children", ga.children, "Children produced per generation");
    gen->add_option("--offspring", ga.offspring, "Children kept as offspring");
    gen->add_option("--crossover", ga.crossover, "Crossover probability");
    gen->add_option("--mutation", ga.mutation, "Mutation probability");
    gen->add_option("--bag-frac", ga.bag_frac, "Bag size as a fraction of the training set");
    gen->add_option("--cm1", ga.cm1, "Overlapping measure or 'auto'");
    gen->add_option("--cm2", ga.cm2, "Neighborhood measure or 'auto'");
    gen->add_option("--epochs", ga.epochs, "Perceptron epochs");
    gen->add_option("--out", ga.out, "Pool JSON path (stdout when omitted)");
    gen->add_option("--history", ga.history, "Write per-generation fitness as JSON lines");

    EvaluateArgs ea;
    auto* ev = app.add_subcommand("evaluate", "Test accuracy of a pool under each combiner");
    ev->add_option("--pool", ea.pool, "Pool JSON")->required();
    ev->add_option("--test", ea.test, "Test CSV")->required();
    ev->add_option("--dsel", ea.dsel, "DSEL (validation) CSV");
    ev->add_option("--combiner", ea.combiners, "mvr, ola, lca, rank, knora-e, knora-u or all")->delimiter(',');
    ev->add_option("--k", ea.k, "Region of competence size")->check(CLI::PositiveNumber);

    ExperimentArgs xa;
    auto* ex = app.add_subcommand("experiment", "Run the PGDCS vs Bagging protocol");
    ex->add_option("--data", xa.data, "Dataset CSVs")->required();
    ex->add_option("--replications", xa.replications, "Replications per dataset");
    ex->add_option("--pool-size", xa.pool_size, "Pool size");
    ex->add_option("--generations", xa.generations, "GA generations");
    ex->add_option("--iters", xa.iters, "Metric-selection iterations");
    ex->add_option("--subsets", xa.subsets, "Metric-selection resamples per iteration");
    ex->add_option("--epochs", xa.epochs, "Perceptron epochs");
    ex->add_option("--k", xa.k, "Region of competence size")->check(CLI::PositiveNumber);
    ex->add_option("--bag-frac", xa.bag_frac, "Bagging bag size as a fraction of the training set");
    ex->add_option("--combiners", xa.combiners, "Combiners or 'all'")->delimiter(',');
    ex->add_option("--cm1", xa.cm1, "Overlapping measure or 'auto'");
    ex->add_option("--cm2", xa.cm2, "Neighborhood measure or 'auto'");
    ex->add_option("--out", xa.out, "Output directory (results, manifest, reports)");
    ex->add_option("--format", xa.format, "Report format on stdout: markdown, json or csv");

    CompareArgs cp;
    auto* cmp = app.add_subcommand("compare", "Wilcoxon and win/tie/loss between two result files");
    cmp->add_option("--a", cp.a, "Results CSV for method A")->required();
    cmp->add_option("--b", cp.b, "Results CSV for method B")->required();
    cmp->add_option("--method-a", cp.method_a, "Keep only rows of this method from --a");
    cmp->add_option("--method-b", cp.method_b, "Keep only rows of this method from --b");
    cmp->add_option("--alpha", cp.alpha, "Significance level");
    cmp->add_option("--tie-eps", cp.tie_eps, "Mean difference treated as a tie");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*fetch) return run_fetch(g, fa);
        if (*cx) return run_complexity(g, ca);
        if (*sel) return run_select(g, sa);
        if (*gen) return run_generate(g, ga);
        if (*ev) return run_evaluate(g, ea);
        if (*ex) return run_experiment_cmd(g, xa);
        if (*cmp) return run_compare(g, cp);
    } catch (const pf::ArgumentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const pf::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << "\n";
        return 3;
    }
    return 1;
}
