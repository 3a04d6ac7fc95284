#include <poolforge/experiment.hpp>
#include <poolforge/synthetic.hpp>

#include <gtest/gtest.h>

#include <filesystem>

using namespace poolforge;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("poolforge_exp_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string write_banana(const fs::path& dir, std::uint64_t seed) {
    auto d = generate_synthetic(SyntheticKind::banana, 120, 1.0, seed);
    const auto path = (dir / ("banana" + std::to_string(seed) + ".csv")).string();
    write_csv(d, path);
    return path;
}

ExperimentConfig tiny(const std::vector<std::string>& data) {
    ExperimentConfig cfg;
    cfg.datasets = data;
    cfg.replications = 2;
    cfg.pool_size = 6;
    cfg.ga.generations = 2;
    cfg.ga.children = 6;
    cfg.ga.offspring = 6;
    cfg.ga.learner.epochs = 10;
    cfg.metricsel.iterations = 2;
    cfg.metricsel.n_subsets = 4;
    cfg.combiners = {Combiner::mvr, Combiner::knora_u};
    cfg.seed = 3;
    return cfg;
}

}  // namespace

TEST(Experiment, RowCountAndShape) {
    const auto dir = scratch("rows");
    const auto cfg = tiny({write_banana(dir, 1)});
    const auto rep = run_experiment(cfg);
    // 1 dataset x 2 replications x 2 methods x 2 combiners
    ASSERT_EQ(rep.rows.size(), 8u);
    EXPECT_EQ(rep.replications.size(), 2u);
    EXPECT_TRUE(rep.failures.empty());
    for (const auto& r : rep.rows) {
        EXPECT_TRUE(r.method == "bagging" || r.method == "pgdcs");
        EXPECT_TRUE(r.combiner == "mvr" || r.combiner == "knora-u");
        EXPECT_GE(r.accuracy, 0.0);
        EXPECT_LE(r.accuracy, 1.0);
    }
    fs::remove_all(dir);
}

TEST(Experiment, DeterministicAcrossRunsAndWorkers) {
    const auto dir = scratch("det");
    auto cfg = tiny({write_banana(dir, 2), write_banana(dir, 3)});
    const auto a = run_experiment(cfg);
    cfg.workers = 4;
    const auto b = run_experiment(cfg);
    EXPECT_EQ(a, b);
    EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
    fs::remove_all(dir);
}

TEST(Experiment, ReplicationSeedsDependOnNameAndIndex) {
    EXPECT_NE(replication_seed(1, "wine", 0), replication_seed(1, "wine", 1));
    EXPECT_NE(replication_seed(1, "wine", 0), replication_seed(1, "heart", 0));
    EXPECT_EQ(replication_seed(1, "wine", 0), replication_seed(1, "wine", 0));
}

TEST(Experiment, JsonRoundTripAndRendering) {
    const auto dir = scratch("json");
    const auto rep = run_experiment(tiny({write_banana(dir, 4)}));
    const auto j = to_json(rep);
    ASSERT_TRUE(j.contains("summary"));
    EXPECT_EQ(report_from_json(nlohmann::json::parse(j.dump())), rep);
    const auto md = render_report(rep, ReportFormat::markdown);
    EXPECT_NE(md.find("| Dataset |"), std::string::npos);
    EXPECT_NE(md.find("knora-u"), std::string::npos);
    const auto csv = render_report(rep, ReportFormat::csv);
    EXPECT_EQ(parse_results_csv(csv), rep.rows);
    EXPECT_THROW(report_from_json(nlohmann::json::parse(R"({"rows": 1})")), DataError);
    fs::remove_all(dir);
}

TEST(Experiment, EmptyReportCannotBeRendered) {
    EXPECT_THROW(render_report(ExperimentReport{}, ReportFormat::json), ArgumentError);
    EXPECT_THROW(parse_report_format("xml"), ArgumentError);
}

TEST(Experiment, ResumeSkipsCompletedReplications) {
    const auto dir = scratch("resume");
    auto cfg = tiny({write_banana(dir, 5)});
    cfg.output_dir = (dir / "out").string();
    const auto full = run_experiment(cfg);
    ASSERT_TRUE(fs::exists(dir / "out" / "results.csv"));
    ASSERT_TRUE(fs::exists(dir / "out" / "generations" / "banana5_r0.jsonl"));

    std::ostringstream log;
    const auto again = run_experiment(cfg, &log);
    EXPECT_EQ(again, full);
    EXPECT_NE(log.str().find("resuming: 2"), std::string::npos) << log.str();

    // drop replication 1 from the manifest: only it is recomputed
    auto manifest = nlohmann::json::parse(read_file((dir / "out" / "manifest.json").string()));
    auto& done = manifest["completed"];
    for (auto it = done.begin(); it != done.end();)
        it = (*it)["replication"] == 1 ? done.erase(it) : it + 1;
    detail::write_text(dir / "out" / "manifest.json", manifest.dump(2));
    std::ostringstream log2;
    const auto partial = run_experiment(cfg, &log2);
    EXPECT_EQ(partial, full);
    EXPECT_NE(log2.str().find("resuming: 1"), std::string::npos) << log2.str();

    // a different configuration starts over
    cfg.seed = 99;
    std::ostringstream log3;
    run_experiment(cfg, &log3);
    EXPECT_EQ(log3.str().find("resuming"), std::string::npos);
    fs::remove_all(dir);
}

TEST(Experiment, FailuresAreRecordedAndRunContinues) {
    const auto dir = scratch("fail");
    // 6 rows leave fewer than 4 training instances, so every replication fails
    const auto bad = (dir / "tiny.csv").string();
    detail::write_text(bad, "x,c\n1,A\n2,A\n3,A\n4,B\n5,B\n6,B\n");
    auto cfg = tiny({write_banana(dir, 6), bad});
    const auto rep = run_experiment(cfg);
    EXPECT_EQ(rep.failures.size(), 2u);
    EXPECT_EQ(rep.rows.size(), 8u);
    EXPECT_NE(render_markdown(rep).find("Failed replications"), std::string::npos);
    fs::remove_all(dir);
}

TEST(Summary, CellsAndWinTieLoss) {
    ExperimentReport rep;
    for (std::size_t r = 0; r < 6; ++r) {
        rep.rows.push_back({"a", "bagging", "mvr", r, 0.5});
        rep.rows.push_back({"a", "pgdcs", "mvr", r, 0.6 + 0.01 * static_cast<double>(r)});
        rep.rows.push_back({"b", "bagging", "mvr", r, 0.7});
        rep.rows.push_back({"b", "pgdcs", "mvr", r, 0.7});
    }
    const auto s = summarize(rep);
    ASSERT_EQ(s.cells.size(), 2u);
    EXPECT_NEAR(s.cells[0].pgdcs_mean, 0.625, 1e-12);
    ASSERT_TRUE(s.cells[0].wilcoxon.has_value());
    EXPECT_TRUE(s.cells[0].wilcoxon->significant);
    EXPECT_FALSE(s.cells[1].wilcoxon.has_value());
    const auto& t = s.wtl.at("mvr");
    EXPECT_EQ(t.wins, 1u);
    EXPECT_EQ(t.ties, 1u);
    EXPECT_EQ(t.losses, 0u);
}
