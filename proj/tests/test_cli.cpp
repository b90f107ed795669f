#include <catch2/catch_amalgamated.hpp>

#include "mcpsforge/cli.hpp"
#include "test_support.hpp"

using namespace mcpsforge;

namespace {

std::string make_dataset_file(const std::string& name, std::size_t per_class,
                              std::uint64_t seed) {
    auto d = testsupport::two_class_gaussian(per_class, 3, seed);
    auto path = (testsupport::temp_dir() / name).string();
    save_csv(d, path);
    return path;
}

RunConfig small_run(const std::string& dataset, const std::string& out,
                    const std::string& strategy = "random") {
    RunConfig config;
    config.dataset_path = dataset;
    config.out_dir = out;
    config.strategy = strategy;
    config.space_name = "full";
    config.seeds = parse_seeds("3");
    config.budget.max_evaluations = 8;
    config.budget.per_eval_timeout = 5.0;
    config.k_folds = 5;
    return config;
}

nlohmann::json strip_timing(const std::string& jsonl_path) {
    nlohmann::json lines = nlohmann::json::array();
    std::ifstream in(jsonl_path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto j = nlohmann::json::parse(line);
        j["ts"] = nullptr;
        j["wall"] = nullptr;
        lines.push_back(j);
    }
    return lines;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("parse_seeds handles counts and explicit lists") {
    auto counted = parse_seeds("25");
    REQUIRE(counted.size() == 25);
    REQUIRE(counted.front() == 0);
    REQUIRE(counted.back() == 24);
    auto listed = parse_seeds("3,5,9");
    REQUIRE(listed == std::vector<std::uint64_t>{3, 5, 9});
    REQUIRE_THROWS_AS(parse_seeds("0"), UsageError);
}

TEST_CASE("compose writes an archive that analyze consumes") {
    auto dataset = make_dataset_file("cli_roundtrip.csv", 60, 5);
    auto out = (testsupport::temp_dir() / "arch_roundtrip").string();
    std::filesystem::remove_all(out);
    auto config = small_run(dataset, out);
    const auto feasible = cmd_compose(config);
    REQUIRE(feasible >= 1);

    auto archive = load_archive(out);
    REQUIRE(archive.runs.size() == 3);
    for (const auto& run : archive.runs) {
        REQUIRE(run.evaluations == 8);
        if (run.feasible) {
            REQUIRE(run.holdout_error.has_value());
            REQUIRE(run.sequence.size() == 7);
        }
    }

    AnalyzeConfig analyze;
    analyze.archive_dir = out;
    analyze.bootstrap_samples = 2000;
    cmd_analyze(analyze);
    for (const char* file : {"similarity.csv", "dendrogram.newick", "bootstrap.csv",
                             "trajectories.csv", "envelope.csv", "clusters.md"})
        REQUIRE(std::filesystem::exists(std::filesystem::path(out) / "reports" / file));
}

TEST_CASE("run logs are replayable line by line") {
    auto dataset = make_dataset_file("cli_logs.csv", 50, 6);
    auto out = (testsupport::temp_dir() / "arch_logs").string();
    std::filesystem::remove_all(out);
    cmd_compose(small_run(dataset, out, "tpe"));
    auto archive = load_archive(out, true, /*load_records=*/true);
    for (const auto& run : archive.runs) {
        REQUIRE(run.records.size() == 8);
        for (std::size_t i = 0; i < run.records.size(); ++i) {
            REQUIRE(run.records[i].eval_index == static_cast<long>(i));
            if (run.records[i].ok())
                REQUIRE(run.records[i].cv_error == mean_of(run.records[i].fold_losses));
            else
                REQUIRE(run.records[i].cv_error == kPenaltyError);
        }
    }
}

TEST_CASE("repeated compose runs are identical modulo timestamps") {
    auto dataset = make_dataset_file("cli_determinism.csv", 40, 7);
    auto out1 = (testsupport::temp_dir() / "arch_det1").string();
    auto out2 = (testsupport::temp_dir() / "arch_det2").string();
    std::filesystem::remove_all(out1);
    std::filesystem::remove_all(out2);
    for (const char* strategy : {"random", "tpe", "smac"}) {
        std::filesystem::remove_all(out1);
        std::filesystem::remove_all(out2);
        auto c1 = small_run(dataset, out1, strategy);
        auto c2 = small_run(dataset, out2, strategy);
        cmd_compose(c1);
        cmd_compose(c2);
        for (std::uint64_t seed : c1.seeds) {
            auto a = strip_timing(run_file(out1, seed, ".jsonl").string());
            auto b = strip_timing(run_file(out2, seed, ".jsonl").string());
            REQUIRE(a == b);
        }
    }
}

TEST_CASE("analyze is idempotent byte for byte") {
    auto dataset = make_dataset_file("cli_idem.csv", 50, 8);
    auto out = (testsupport::temp_dir() / "arch_idem").string();
    std::filesystem::remove_all(out);
    cmd_compose(small_run(dataset, out));

    AnalyzeConfig analyze;
    analyze.archive_dir = out;
    analyze.bootstrap_samples = 5000;
    cmd_analyze(analyze);
    std::map<std::string, std::string> first;
    for (const auto& entry :
         std::filesystem::directory_iterator(std::filesystem::path(out) / "reports"))
        first[entry.path().filename().string()] = slurp(entry.path());
    REQUIRE_FALSE(first.empty());

    cmd_analyze(analyze);
    for (const auto& [name, content] : first)
        REQUIRE(slurp(std::filesystem::path(out) / "reports" / name) == content);
}

TEST_CASE("a stale dataset fails the checksum gate") {
    auto dataset = make_dataset_file("cli_stale.csv", 40, 9);
    auto out = (testsupport::temp_dir() / "arch_stale").string();
    std::filesystem::remove_all(out);
    cmd_compose(small_run(dataset, out));
    std::ofstream(dataset, std::ios::app) << "999,999,999,a\n";  // mutate the dataset

    AnalyzeConfig analyze;
    analyze.archive_dir = out;
    REQUIRE_THROWS_AS(cmd_analyze(analyze), ArchiveError);
}

TEST_CASE("missing dataset path fails before any archive is written") {
    auto out = (testsupport::temp_dir() / "arch_missing").string();
    std::filesystem::remove_all(out);
    auto config = small_run((testsupport::temp_dir() / "nope.csv").string(), out);
    REQUIRE_THROWS_AS(cmd_compose(config), IngestError);
    REQUIRE_FALSE(std::filesystem::exists(out));
}

TEST_CASE("clustering a one-run archive surfaces an analysis error") {
    auto dataset = make_dataset_file("cli_onerun.csv", 40, 10);
    auto out = (testsupport::temp_dir() / "arch_onerun").string();
    std::filesystem::remove_all(out);
    auto config = small_run(dataset, out);
    config.seeds = {0};
    cmd_compose(config);

    AnalyzeConfig analyze;
    analyze.archive_dir = out;
    analyze.analyses = {"cluster"};
    REQUIRE_THROWS_AS(cmd_analyze(analyze), AnalysisError);
}

TEST_CASE("report compares strategies side by side and refuses mixed datasets") {
    auto dataset = make_dataset_file("cli_report.csv", 50, 11);
    std::vector<std::string> dirs;
    for (const char* strategy : {"random", "tpe", "smac"}) {
        auto out = (testsupport::temp_dir() / (std::string("arch_rep_") + strategy)).string();
        std::filesystem::remove_all(out);
        cmd_compose(small_run(dataset, out, strategy));
        dirs.push_back(out);
    }
    auto markdown = cmd_report(dirs, 2, 2000);
    REQUIRE(markdown.find("| random |") != std::string::npos);
    REQUIRE(markdown.find("| tpe |") != std::string::npos);
    REQUIRE(markdown.find("| smac |") != std::string::npos);
    REQUIRE(markdown.find("Best pipelines") != std::string::npos);

    auto other = make_dataset_file("cli_report_other.csv", 45, 12);
    auto out = (testsupport::temp_dir() / "arch_rep_other").string();
    std::filesystem::remove_all(out);
    cmd_compose(small_run(other, out));
    auto mixed = dirs;
    mixed.push_back(out);
    REQUIRE_THROWS_AS(cmd_report(mixed, 2, 1000), UsageError);
    REQUIRE_THROWS_AS(cmd_report({}, 2, 1000), UsageError);
}

TEST_CASE("catalog emits the full machine-readable roster") {
    auto j = nlohmann::json::parse(cmd_catalog());
    REQUIRE(j.size() == registry().size());
    bool found_bagging = false;
    for (const auto& comp : j)
        if (comp.at("id") == "bagging") {
            found_bagging = true;
            bool has_component_param = false;
            for (const auto& p : comp.at("params"))
                if (p.at("kind") == "component") has_component_param = true;
            REQUIRE(has_component_param);
        }
    REQUIRE(found_bagging);
}

TEST_CASE("crash-interrupted archives keep their completed evaluations parseable") {
    auto dataset = make_dataset_file("cli_crash.csv", 40, 13);
    auto out = (testsupport::temp_dir() / "arch_crash").string();
    std::filesystem::remove_all(out);
    auto config = small_run(dataset, out);
    cmd_compose(config);
    // simulate a crash on seed 2: drop its summary, truncate its log midline
    std::filesystem::remove(run_file(out, 2, ".summary.json"));
    auto log_path = run_file(out, 2, ".jsonl").string();
    auto content = slurp(log_path);
    std::ofstream(log_path, std::ios::trunc)
        << content.substr(0, content.find('\n') + 1) << "{\"eval\": 1, \"truncat";

    auto archive = load_archive(out, true, true);
    REQUIRE(archive.runs.size() == 2);  // seed 2 skipped, others intact
    std::ifstream log_in(log_path);
    std::string first_line;
    std::getline(log_in, first_line);
    REQUIRE_NOTHROW(record_from_json(nlohmann::json::parse(first_line)));
}

TEST_CASE("worker count respects the environment variable") {
    setenv("MCPS_FORGE_WORKERS", "2", 1);
    REQUIRE(worker_count(8) == 2);
    REQUIRE(worker_count(1) == 1);
    setenv("MCPS_FORGE_WORKERS", "banana", 1);
    REQUIRE_THROWS_AS(worker_count(4), UsageError);
    unsetenv("MCPS_FORGE_WORKERS");
}

TEST_CASE("the binary maps outcomes to exit codes") {
    const std::string bin = MCPS_FORGE_BIN;
    auto exit_code = [](const std::string& cmd) {
        const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
        return WEXITSTATUS(status);
    };
    REQUIRE(exit_code(bin + " catalog") == 0);
    // missing dataset: diagnostic and nonzero exit, no archive written
    auto ghost_out = (testsupport::temp_dir() / "arch_exitcode").string();
    std::filesystem::remove_all(ghost_out);
    REQUIRE(exit_code(bin + " compose --dataset /nonexistent.csv --out " + ghost_out) == 2);
    REQUIRE_FALSE(std::filesystem::exists(ghost_out));

    auto dataset = make_dataset_file("cli_exitcode.csv", 40, 14);
    REQUIRE(exit_code(bin + " compose --dataset " + dataset +
                      " --seeds 1 --budget-evals 4 --k-folds 5 --out " + ghost_out) == 0);
    std::filesystem::remove_all(ghost_out);
}
