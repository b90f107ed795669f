#include <iostream>

#include <CLI11.hpp>

#include "mcpsforge/mcpsforge.hpp"

using namespace mcpsforge;

namespace {

std::map<std::string, std::string> parse_overrides(const std::vector<std::string>& pairs) {
    std::map<std::string, std::string> out;
    for (const auto& kv : pairs) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw UsageError("--set expects key=value, got '" + kv + "'");
        out[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mcps-forge: composition and optimization of multicomponent predictive systems"};
    app.require_subcommand(1);

    // compose
    auto* compose = app.add_subcommand("compose", "run one optimization strategy over many seeds");
    std::string dataset, schema, space = "full", optimizer = "random", seeds = "25", out_dir;
    std::string missing_marker = "?";
    long budget_evals = 500;
    double budget_seconds = 300.0, eval_timeout = 10.0, train_fraction = 0.7;
    std::uint64_t split_seed = 1;
    int k_folds = 10;
    std::vector<std::string> overrides;
    compose->add_option("--dataset", dataset, "CSV dataset, last column is the class label");
    compose->add_option("--schema", schema, "optional column-kind sidecar (name=kind lines)");
    compose->add_option("--space", space, "search space: new|full")->default_val("full");
    compose->add_option("--optimizer", optimizer, "random|tpe|smac")->default_val("random");
    compose->add_option("--seeds", seeds, "seed count N (runs 0..N-1) or explicit list a,b,c");
    compose->add_option("--budget-evals", budget_evals, "max evaluations per seed");
    compose->add_option("--budget-seconds", budget_seconds, "wall-clock limit per seed");
    compose->add_option("--eval-timeout", eval_timeout, "per-evaluation timeout in seconds");
    compose->add_option("--out", out_dir, "archive output directory");
    compose->add_option("--set", overrides, "strategy overrides, e.g. tpe.gamma=0.2")
        ->take_all();
    compose->add_option("--train-fraction", train_fraction, "holdout split fraction");
    compose->add_option("--split-seed", split_seed, "seed for the 70/30 split");
    compose->add_option("--k-folds", k_folds, "cross-validation folds");
    compose->add_option("--missing-marker", missing_marker, "cell text treated as missing");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "write reports for a composed archive");
    std::string archive_dir, analyses = "similarity,cluster,bootstrap,trajectories";
    int bootstrap_pick = 4;
    long bootstrap_samples = 100000;
    bool without_replacement = false;
    analyze->add_option("archive", archive_dir, "archive directory")->required();
    analyze->add_option("--analyses", analyses, "comma list of similarity,cluster,bootstrap,trajectories");
    analyze->add_option("--bootstrap-pick", bootstrap_pick, "runs drawn per bootstrap sample");
    analyze->add_option("--bootstrap-samples", bootstrap_samples, "bootstrap sample count");
    analyze->add_flag("--without-replacement", without_replacement,
                      "draw bootstrap picks without replacement");

    // report
    auto* report = app.add_subcommand("report", "cross-strategy comparison tables");
    std::vector<std::string> report_dirs;
    std::string report_out;
    int report_pick = 4;
    long report_samples = 100000;
    report->add_option("archives", report_dirs, "archive directories")->required();
    report->add_option("--out", report_out, "write markdown here instead of stdout");
    report->add_option("--bootstrap-pick", report_pick, "runs drawn per bootstrap sample");
    report->add_option("--bootstrap-samples", report_samples, "bootstrap sample count");

    // catalog
    auto* catalog = app.add_subcommand("catalog", "print the component roster as JSON");

    CLI11_PARSE(app, argc, argv);

    try {
        if (compose->parsed()) {
            RunConfig config;
            config.dataset_path = dataset;
            config.schema_path = schema;
            config.space_name = space;
            config.strategy = optimizer;
            config.budget.max_evaluations = budget_evals;
            config.budget.wall_clock_limit = budget_seconds;
            config.budget.per_eval_timeout = eval_timeout;
            config.seeds = parse_seeds(seeds);
            config.overrides = parse_overrides(overrides);
            config.out_dir = out_dir;
            config.train_fraction = train_fraction;
            config.split_seed = split_seed;
            config.k_folds = k_folds;
            config.missing_marker = missing_marker;
            const auto feasible = cmd_compose(config);
            std::cout << feasible << " of " << config.seeds.size()
                      << " runs found a feasible pipeline; archive at " << out_dir << "\n";
            return feasible > 0 ? 0 : 1;
        }
        if (analyze->parsed()) {
            AnalyzeConfig config;
            config.archive_dir = archive_dir;
            config.analyses.clear();
            std::stringstream ss(analyses);
            std::string item;
            while (std::getline(ss, item, ','))
                if (!item.empty()) config.analyses.insert(item);
            config.bootstrap_pick = bootstrap_pick;
            config.bootstrap_samples = bootstrap_samples;
            config.with_replacement = !without_replacement;
            cmd_analyze(config);
            std::cout << "reports written under " << archive_dir << "/reports\n";
            return 0;
        }
        if (report->parsed()) {
            const auto markdown = cmd_report(report_dirs, report_pick, report_samples);
            if (report_out.empty()) {
                std::cout << markdown;
            } else {
                std::ofstream out(report_out);
                out << markdown;
            }
            return 0;
        }
        if (catalog->parsed()) {
            std::cout << cmd_catalog();
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
