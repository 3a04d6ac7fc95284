#pragma once

/// @file experiment.hpp
/// @brief The full comparison protocol: repeated stratified splits, metric
/// selection, PGDCS and Bagging pools, every combiner on the test split,
/// incremental result files and report rendering.

#include <poolforge/complexity.hpp>
#include <poolforge/core.hpp>
#include <poolforge/dataset.hpp>
#include <poolforge/dynsel.hpp>
#include <poolforge/learner.hpp>
#include <poolforge/metricsel.hpp>
#include <poolforge/moga.hpp>
#include <poolforge/stats.hpp>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace poolforge {

struct ExperimentConfig {
    std::vector<std::string> datasets;  // CSV paths, label in the last column
    std::size_t replications = 20;
    std::array<double, 3> fractions = {0.5, 0.25, 0.25};
    std::size_t pool_size = 100;
    GaConfig ga;
    MetricSelectionConfig metricsel;
    double bagging_bag_frac = 0.5;
    std::vector<Combiner> combiners = {all_combiners.begin(), all_combiners.end()};
    std::size_t k = 7;
    std::uint64_t seed = 0;
    /// Where results.csv, manifest.json and generation histories go; empty
    /// keeps everything in memory.
    std::string output_dir;
    bool scale = true;
    std::size_t workers = 1;
    /// Fixed measures; when unset they are chosen by metric selection.
    std::optional<complexity::Measure> cm1;
    std::optional<complexity::Measure> cm2;

    void validate() const {
        if (datasets.empty()) throw ArgumentError("no datasets given");
        if (replications < 1) throw ArgumentError("replications must be at least 1");
        if (combiners.empty()) throw ArgumentError("no combiners given");
        if (pool_size < 2) throw ArgumentError("pool size must be at least 2");
        if (k < 1) throw ArgumentError("k must be at least 1");
    }
};

/// One accuracy measurement.
struct ResultRow {
    std::string dataset;
    std::string method;  // "bagging" or "pgdcs"
    std::string combiner;
    std::size_t replication = 0;
    double accuracy = 0.0;

    friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

struct ReplicationInfo {
    std::string dataset;
    std::size_t replication = 0;
    std::uint64_t seed = 0;
    std::string cm1;
    std::string cm2;
    std::size_t chosen_generation = 0;

    friend bool operator==(const ReplicationInfo&, const ReplicationInfo&) = default;
};

struct ReplicationFailure {
    std::string dataset;
    std::size_t replication = 0;
    std::string message;

    friend bool operator==(const ReplicationFailure&, const ReplicationFailure&) = default;
};

struct ExperimentReport {
    std::vector<ResultRow> rows;
    std::vector<ReplicationInfo> replications;
    std::vector<ReplicationFailure> failures;

    bool empty() const noexcept { return rows.empty(); }
    friend bool operator==(const ExperimentReport&, const ExperimentReport&) = default;

    /// Canonical order: dataset, replication, method, combiner.
    void sort() {
        std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
            return std::tie(a.dataset, a.replication, a.method, a.combiner) <
                   std::tie(b.dataset, b.replication, b.method, b.combiner);
        });
        std::sort(replications.begin(), replications.end(), [](const auto& a, const auto& b) {
            return std::tie(a.dataset, a.replication) < std::tie(b.dataset, b.replication);
        });
        std::sort(failures.begin(), failures.end(), [](const auto& a, const auto& b) {
            return std::tie(a.dataset, a.replication) < std::tie(b.dataset, b.replication);
        });
    }
};

inline std::uint64_t string_tag(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ULL;
    return h;
}

/// Seed of replication r on a dataset; independent of which other datasets
/// are in the run.
inline std::uint64_t replication_seed(std::uint64_t master, const std::string& dataset, std::size_t r) {
    return derive_seed(master, string_tag(dataset), r);
}

/// JSON lines with the fitness of every individual of every generation.
inline std::string generation_history_jsonl(const std::vector<GenerationRecord>& history) {
    std::string out;
    for (const auto& g : history) {
        for (std::size_t i = 0; i < g.fitness.size(); ++i) {
            nlohmann::json line = {{"generation", g.index}, {"individual", i},   {"phi1", g.fitness[i].phi1},
                                   {"phi2", g.fitness[i].phi2}, {"ddv", g.fitness[i].ddv}, {"g_disp", g.g_disp}};
            out += line.dump() + "\n";
        }
    }
    return out;
}

struct ReplicationOutcome {
    std::vector<ResultRow> rows;
    ReplicationInfo info;
    std::string history_jsonl;
};

/// Everything for one (dataset, replication): split, scaling fitted on the
/// training part, measure choice, both pools, every combiner on the test
/// part with the validation part as DSEL. Both pools share the split.
inline ReplicationOutcome run_replication(const Dataset& data, std::size_t r, const ExperimentConfig& cfg,
                                          std::size_t inner_workers = 1) {
    const std::uint64_t rs = replication_seed(cfg.seed, data.name, r);
    const Split split = stratified_split(data, cfg.fractions, derive_seed(rs, 1));
    Dataset train = data.subset(split.train);
    Dataset validation = data.subset(split.validation);
    Dataset test = data.subset(split.test);
    if (cfg.scale) {
        const Scaler sc = Scaler::fit(train);
        train = sc.apply(std::move(train));
        validation = sc.apply(std::move(validation));
        test = sc.apply(std::move(test));
    }

    complexity::Measure cm1 = cfg.cm1.value_or(complexity::Measure::F1);
    complexity::Measure cm2 = cfg.cm2.value_or(complexity::Measure::N1);
    if (!cfg.cm1 || !cfg.cm2) {
        MetricSelectionConfig mc = cfg.metricsel;
        mc.seed = derive_seed(rs, 2);
        mc.workers = inner_workers;
        const auto tally = select_metrics(train, mc);
        if (!cfg.cm1) cm1 = tally.cm1;
        if (!cfg.cm2) cm2 = tally.cm2;
    }

    GaConfig ga = cfg.ga;
    ga.population = cfg.pool_size;
    ga.seed = derive_seed(rs, 3);
    ga.workers = inner_workers;
    const PgdcsResult pg = run_pgdcs(train, validation, cm1, cm2, ga);

    BaggingConfig bc;
    bc.pool_size = cfg.pool_size;
    bc.bag_frac = cfg.bagging_bag_frac;
    bc.seed = derive_seed(rs, 4);
    bc.workers = inner_workers;
    bc.learner = cfg.ga.learner;
    const Pool bag = bagging_generate(train, bc);

    ReplicationOutcome out;
    out.info = {data.name, r, rs, complexity::code(cm1), complexity::code(cm2), pg.chosen_generation};
    for (const auto& [method, pool] : {std::pair<std::string, const Pool*>{"bagging", &bag}, {"pgdcs", &pg.pool}}) {
        const DynamicSelector sel(*pool, validation);
        const auto acc = sel.accuracy(cfg.combiners, test, cfg.k);
        for (std::size_t c = 0; c < cfg.combiners.size(); ++c)
            out.rows.push_back({data.name, method, to_string(cfg.combiners[c]), r, acc[c]});
    }
    out.history_jsonl = generation_history_jsonl(pg.history);
    return out;
}

// --- incremental results --------------------------------------------------------

namespace detail {

inline std::string rows_csv_header() { return "dataset,method,combiner,replication,accuracy\n"; }

inline std::string row_csv(const ResultRow& r) {
    return r.dataset + "," + r.method + "," + r.combiner + "," + std::to_string(r.replication) + "," +
           format_double(r.accuracy) + "\n";
}

/// Fingerprint of the settings that change results; a manifest written
/// under different settings is not resumed.
inline std::string config_fingerprint(const ExperimentConfig& cfg) {
    nlohmann::json j = {{"seed", cfg.seed},
                        {"fractions", cfg.fractions},
                        {"pool_size", cfg.pool_size},
                        {"generations", cfg.ga.generations},
                        {"children", cfg.ga.children},
                        {"offspring", cfg.ga.offspring},
                        {"crossover_prob", cfg.ga.crossover_prob},
                        {"mutation_prob", cfg.ga.mutation_prob},
                        {"bag_frac", cfg.ga.bag_frac},
                        {"bagging_bag_frac", cfg.bagging_bag_frac},
                        {"metricsel", {cfg.metricsel.n_subsets, cfg.metricsel.subset_frac, cfg.metricsel.iterations}},
                        {"epochs", cfg.ga.learner.epochs},
                        {"learning_rate", cfg.ga.learner.learning_rate},
                        {"k", cfg.k},
                        {"scale", cfg.scale},
                        {"cm1", cfg.cm1 ? complexity::code(*cfg.cm1) : std::string("auto")},
                        {"cm2", cfg.cm2 ? complexity::code(*cfg.cm2) : std::string("auto")}};
    std::vector<std::string> combs;
    for (auto c : cfg.combiners) combs.push_back(to_string(c));
    j["combiners"] = combs;
    return j.dump();
}

inline nlohmann::json info_to_json(const ReplicationInfo& i) {
    return {{"dataset", i.dataset}, {"replication", i.replication}, {"seed", i.seed},
            {"cm1", i.cm1},         {"cm2", i.cm2},                 {"chosen_generation", i.chosen_generation}};
}

inline ReplicationInfo info_from_json(const nlohmann::json& j) {
    return {j.at("dataset").get<std::string>(), j.at("replication").get<std::size_t>(),
            j.at("seed").get<std::uint64_t>(),  j.at("cm1").get<std::string>(),
            j.at("cm2").get<std::string>(),     j.at("chosen_generation").get<std::size_t>()};
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw RuntimeFailure("cannot write " + p.string());
    f << text;
    if (!f) throw RuntimeFailure("write failed for " + p.string());
}

}  // namespace detail

/// Parse results written by run_experiment (or any CSV with the columns
/// dataset,method,combiner,replication,accuracy).
inline std::vector<ResultRow> parse_results_csv(std::string_view text) {
    std::vector<ResultRow> rows;
    std::size_t line_no = 0;
    std::map<std::string, std::size_t> col;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        const auto line = detail::trim(text.substr(pos, nl - pos));
        pos = nl + 1;
        ++line_no;
        if (line.empty()) continue;
        const auto f = detail::split_fields(line);
        if (col.empty()) {
            for (std::size_t i = 0; i < f.size(); ++i) col[std::string(detail::trim(f[i]))] = i;
            for (const char* need : {"dataset", "replication", "accuracy"})
                if (!col.count(need)) throw DataError(std::string("results file lacks a '") + need + "' column");
            continue;
        }
        auto field = [&](const char* name) -> std::string {
            const auto it = col.find(name);
            if (it == col.end()) return "";
            if (it->second >= f.size()) throw DataError("results line " + std::to_string(line_no) + " is short");
            return std::string(detail::trim(f[it->second]));
        };
        ResultRow r;
        r.dataset = field("dataset");
        r.method = field("method");
        r.combiner = field("combiner");
        const auto acc = detail::parse_double(field("accuracy"));
        const auto rep = detail::parse_double(field("replication"));
        if (!acc || !rep || *rep < 0) throw DataError("results line " + std::to_string(line_no) + " is malformed");
        r.accuracy = *acc;
        r.replication = static_cast<std::size_t>(*rep);
        rows.push_back(std::move(r));
    }
    return rows;
}

/// Run every (dataset, replication) job. With an output directory, each
/// finished job is appended to results.csv and recorded in manifest.json, so
/// a rerun with the same settings skips what is already done. A job that
/// throws is recorded as a failure and the run continues.
inline ExperimentReport run_experiment(const ExperimentConfig& cfg, std::ostream* log = nullptr) {
    cfg.validate();
    namespace fs = std::filesystem;
    std::vector<Dataset> data;
    for (const auto& path : cfg.datasets) data.push_back(load_csv(path));

    ExperimentReport report;
    std::map<std::pair<std::string, std::size_t>, bool> done;
    const std::string fingerprint = detail::config_fingerprint(cfg);
    fs::path dir, results_path, manifest_path;
    nlohmann::json manifest = {{"config", fingerprint}, {"completed", nlohmann::json::array()}};

    if (!cfg.output_dir.empty()) {
        dir = cfg.output_dir;
        fs::create_directories(dir / "generations");
        results_path = dir / "results.csv";
        manifest_path = dir / "manifest.json";
        bool resumed = false;
        if (fs::exists(manifest_path) && fs::exists(results_path)) {
            try {
                auto old = nlohmann::json::parse(read_file(manifest_path.string()));
                if (old.at("config").get<std::string>() == fingerprint) {
                    std::map<std::pair<std::string, std::size_t>, bool> completed;
                    for (const auto& c : old.at("completed")) {
                        auto info = detail::info_from_json(c);
                        completed[{info.dataset, info.replication}] = true;
                        report.replications.push_back(info);
                    }
                    for (auto& row : parse_results_csv(read_file(results_path.string())))
                        if (completed.count({row.dataset, row.replication})) report.rows.push_back(std::move(row));
                    done = completed;
                    manifest = old;
                    resumed = true;
                    if (log) *log << "resuming: " << done.size() << " replications already complete\n";
                }
            } catch (const nlohmann::json::exception&) {
                resumed = false;
            }
        }
        if (!resumed) {
            report = {};
            done.clear();
            detail::write_text(results_path, detail::rows_csv_header());
            detail::write_text(manifest_path, manifest.dump(2) + "\n");
        } else {
            // rewrite results without rows of unfinished replications
            std::string text = detail::rows_csv_header();
            for (const auto& row : report.rows) text += detail::row_csv(row);
            detail::write_text(results_path, text);
        }
    }

    struct Job {
        std::size_t dataset;
        std::size_t replication;
    };
    std::vector<Job> jobs;
    for (std::size_t d = 0; d < data.size(); ++d)
        for (std::size_t r = 0; r < cfg.replications; ++r)
            if (!done.count({data[d].name, r})) jobs.push_back({d, r});

    std::mutex mu;
    const std::size_t outer = std::max<std::size_t>(1, std::min(cfg.workers, jobs.size()));
    parallel_for(jobs.size(), outer, [&](std::size_t j) {
        const auto& job = jobs[j];
        const Dataset& d = data[job.dataset];
        try {
            auto out = run_replication(d, job.replication, cfg);
            std::lock_guard lock(mu);
            if (!dir.empty()) {
                std::ofstream f(results_path, std::ios::binary | std::ios::app);
                for (const auto& row : out.rows) f << detail::row_csv(row);
                detail::write_text(dir / "generations" / (d.name + "_r" + std::to_string(job.replication) + ".jsonl"),
                                   out.history_jsonl);
                manifest["completed"].push_back(detail::info_to_json(out.info));
                detail::write_text(manifest_path, manifest.dump(2) + "\n");
            }
            if (log) *log << d.name << " replication " << job.replication << " done\n";
            report.rows.insert(report.rows.end(), out.rows.begin(), out.rows.end());
            report.replications.push_back(out.info);
        } catch (const std::exception& e) {
            std::lock_guard lock(mu);
            if (log) *log << "warning: " << d.name << " replication " << job.replication << " failed: " << e.what()
                          << "\n";
            report.failures.push_back({d.name, job.replication, e.what()});
        }
    });
    report.sort();
    return report;
}

// --- summaries and rendering ------------------------------------------------------

struct CellSummary {
    std::string dataset;
    std::string combiner;
    double bagging_mean = 0.0, bagging_std = 0.0;
    double pgdcs_mean = 0.0, pgdcs_std = 0.0;
    std::size_t pairs = 0;
    std::optional<stats::WilcoxonResult> wilcoxon;  // unset when too few nonzero pairs
};

struct ReportSummary {
    std::vector<std::string> datasets;
    std::vector<std::string> combiners;
    std::vector<CellSummary> cells;                 // dataset-major
    std::map<std::string, stats::WtlTally> wtl;     // per combiner, PGDCS vs Bagging over datasets
};

inline ReportSummary summarize(const ExperimentReport& report, double alpha = 0.05, double tie_epsilon = 0.0) {
    ReportSummary s;
    std::map<std::tuple<std::string, std::string, std::string>, std::map<std::size_t, double>> acc;
    for (const auto& r : report.rows) {
        acc[{r.dataset, r.combiner, r.method}][r.replication] = r.accuracy;
        if (std::find(s.datasets.begin(), s.datasets.end(), r.dataset) == s.datasets.end())
            s.datasets.push_back(r.dataset);
        if (std::find(s.combiners.begin(), s.combiners.end(), r.combiner) == s.combiners.end())
            s.combiners.push_back(r.combiner);
    }
    std::sort(s.datasets.begin(), s.datasets.end());
    // combiners in canonical order
    std::vector<std::string> ordered;
    for (auto c : all_combiners)
        if (std::find(s.combiners.begin(), s.combiners.end(), to_string(c)) != s.combiners.end())
            ordered.push_back(to_string(c));
    for (const auto& c : s.combiners)
        if (std::find(ordered.begin(), ordered.end(), c) == ordered.end()) ordered.push_back(c);
    s.combiners = ordered;

    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> per_combiner;
    for (const auto& d : s.datasets) {
        for (const auto& c : s.combiners) {
            const auto& bag = acc[{d, c, "bagging"}];
            const auto& pg = acc[{d, c, "pgdcs"}];
            std::vector<double> a, b, pa, pb;
            for (const auto& [r, v] : bag) b.push_back(v);
            for (const auto& [r, v] : pg) a.push_back(v);
            for (const auto& [r, v] : pg)
                if (auto it = bag.find(r); it != bag.end()) {
                    pa.push_back(v);
                    pb.push_back(it->second);
                }
            if (a.empty() && b.empty()) continue;
            CellSummary cell{d, c, stats::mean(b), stats::stddev(b), stats::mean(a), stats::stddev(a), pa.size(), {}};
            try {
                cell.wilcoxon = stats::wilcoxon_signed_rank(pa, pb, alpha);
            } catch (const ArgumentError&) {
            }
            s.cells.push_back(cell);
            if (!a.empty() && !b.empty()) {
                per_combiner[c].first.push_back(cell.pgdcs_mean);
                per_combiner[c].second.push_back(cell.bagging_mean);
            }
        }
    }
    for (const auto& [c, ab] : per_combiner) s.wtl[c] = stats::win_tie_loss(ab.first, ab.second, tie_epsilon);
    return s;
}

inline nlohmann::json to_json(const stats::WtlTally& t) {
    nlohmann::json nc = nlohmann::json::object(), ncp = nlohmann::json::object();
    nlohmann::json sig = nlohmann::json::object(), sigp = nlohmann::json::object();
    for (const auto& [a, v] : t.nc) {
        std::ostringstream k;
        k << a;
        nc[k.str()] = v;
        sig[k.str()] = t.significant(a);
    }
    for (const auto& [a, v] : t.nc_published) {
        std::ostringstream k;
        k << a;
        ncp[k.str()] = v;
        sigp[k.str()] = t.significant_published(a);
    }
    return {{"wins", t.wins},         {"ties", t.ties},           {"losses", t.losses},
            {"n_exp", t.n_exp},       {"nc", nc},                 {"nc_published", ncp},
            {"significant", sig},     {"significant_published", sigp}};
}

inline nlohmann::json to_json(const stats::WilcoxonResult& w) {
    return {{"w", w.w_plus},   {"w_minus", w.w_minus}, {"n", w.n},
            {"p_value", w.p_value}, {"exact", w.exact}, {"significant", w.significant}};
}

inline nlohmann::json to_json(const ReportSummary& s) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : s.cells)
        cells.push_back({{"dataset", c.dataset},
                         {"combiner", c.combiner},
                         {"bagging_mean", c.bagging_mean},
                         {"bagging_std", c.bagging_std},
                         {"pgdcs_mean", c.pgdcs_mean},
                         {"pgdcs_std", c.pgdcs_std},
                         {"pairs", c.pairs},
                         {"wilcoxon", c.wilcoxon ? to_json(*c.wilcoxon) : nlohmann::json(nullptr)}});
    nlohmann::json wtl = nlohmann::json::object();
    for (const auto& [c, t] : s.wtl) wtl[c] = to_json(t);
    return {{"cells", cells}, {"win_tie_loss", wtl}};
}

inline nlohmann::json to_json(const ExperimentReport& r) {
    nlohmann::json rows = nlohmann::json::array(), reps = nlohmann::json::array(),
                   fails = nlohmann::json::array();
    for (const auto& x : r.rows)
        rows.push_back({{"dataset", x.dataset},
                        {"method", x.method},
                        {"combiner", x.combiner},
                        {"replication", x.replication},
                        {"accuracy", x.accuracy}});
    for (const auto& x : r.replications) reps.push_back(detail::info_to_json(x));
    for (const auto& x : r.failures)
        fails.push_back({{"dataset", x.dataset}, {"replication", x.replication}, {"message", x.message}});
    nlohmann::json j = {{"rows", rows}, {"replications", reps}, {"failures", fails}};
    if (!r.empty()) j["summary"] = to_json(summarize(r));
    return j;
}

/// Inverse of to_json; the derived "summary" block is ignored.
inline ExperimentReport report_from_json(const nlohmann::json& j) {
    try {
        ExperimentReport r;
        for (const auto& x : j.at("rows"))
            r.rows.push_back({x.at("dataset").get<std::string>(), x.at("method").get<std::string>(),
                              x.at("combiner").get<std::string>(), x.at("replication").get<std::size_t>(),
                              x.at("accuracy").get<double>()});
        for (const auto& x : j.at("replications")) r.replications.push_back(detail::info_from_json(x));
        for (const auto& x : j.at("failures"))
            r.failures.push_back({x.at("dataset").get<std::string>(), x.at("replication").get<std::size_t>(),
                                  x.at("message").get<std::string>()});
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed report JSON: ") + e.what());
    }
}

enum class ReportFormat : std::uint8_t { csv, json, markdown };

inline ReportFormat parse_report_format(const std::string& s) {
    if (s == "csv") return ReportFormat::csv;
    if (s == "json") return ReportFormat::json;
    if (s == "markdown" || s == "md") return ReportFormat::markdown;
    throw ArgumentError("unknown report format '" + s + "' (expected csv, json or markdown)");
}

namespace detail {

inline std::string pct(double mean, double sd) {
    std::ostringstream o;
    o << std::fixed << std::setprecision(1) << 100.0 * mean << "(" << 100.0 * sd << ")";
    return o.str();
}

inline std::string fixed(double v, int digits) {
    std::ostringstream o;
    o << std::fixed << std::setprecision(digits) << v;
    return o.str();
}

}  // namespace detail

/// Markdown: one row per dataset with Bagging/PGDCS mean(std) accuracy pairs
/// per combiner (percent, better mean in bold), then win/tie/loss counts per
/// combiner with the critical levels.
inline std::string render_markdown(const ExperimentReport& report) {
    const auto s = summarize(report);
    std::ostringstream o;
    o << "| Dataset |";
    for (const auto& c : s.combiners) o << " " << c << " Bagging | " << c << " PGDCS |";
    o << "\n|---|";
    for (std::size_t i = 0; i < s.combiners.size(); ++i) o << "---|---|";
    o << "\n";
    for (const auto& d : s.datasets) {
        o << "| " << d << " |";
        for (const auto& c : s.combiners) {
            const auto it = std::find_if(s.cells.begin(), s.cells.end(),
                                         [&](const CellSummary& x) { return x.dataset == d && x.combiner == c; });
            if (it == s.cells.end()) {
                o << " - | - |";
                continue;
            }
            std::string b = detail::pct(it->bagging_mean, it->bagging_std);
            std::string p = detail::pct(it->pgdcs_mean, it->pgdcs_std);
            if (it->pgdcs_mean > it->bagging_mean) p = "**" + p + "**";
            if (it->bagging_mean > it->pgdcs_mean) b = "**" + b + "**";
            if (it->wilcoxon && it->wilcoxon->significant) p += " *";
            o << " " << b << " | " << p << " |";
        }
        o << "\n";
    }
    o << "\n* Wilcoxon signed-rank p < 0.05 over paired replications.\n\n";
    o << "| Combiner | Wins | Ties | Losses | Nc(0.1) | Nc(0.05) | Nc(0.01) |\n|---|---|---|---|---|---|---|\n";
    for (const auto& c : s.combiners) {
        const auto it = s.wtl.find(c);
        if (it == s.wtl.end()) continue;
        const auto& t = it->second;
        o << "| " << c << " | " << t.wins << " | " << t.ties << " | " << t.losses << " | "
          << detail::fixed(t.nc.at(0.1), 2) << " | " << detail::fixed(t.nc.at(0.05), 2) << " | "
          << detail::fixed(t.nc.at(0.01), 2) << " |\n";
    }
    if (!report.failures.empty()) {
        o << "\nFailed replications:\n\n";
        for (const auto& f : report.failures)
            o << "- " << f.dataset << " replication " << f.replication << ": " << f.message << "\n";
    }
    return o.str();
}

inline std::string render_report(const ExperimentReport& report, ReportFormat format) {
    if (report.empty()) throw ArgumentError("cannot render an empty report");
    switch (format) {
        case ReportFormat::csv: {
            std::string text = detail::rows_csv_header();
            for (const auto& r : report.rows) text += detail::row_csv(r);
            return text;
        }
        case ReportFormat::json: return to_json(report).dump(2) + "\n";
        case ReportFormat::markdown: return render_markdown(report);
    }
    throw ArgumentError("unknown report format");
}

}  // namespace poolforge
