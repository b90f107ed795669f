#pragma once

#include "mcpsforge/archive.hpp"
#include "mcpsforge/smac.hpp"

namespace mcpsforge {

// ── compose ─────────────────────────────────────────────────────────
//
// Load and split the dataset, run the chosen strategy once per seed
// (seeds in parallel, one log file each), persist everything. Returns
// the number of feasible runs; callers map zero to a nonzero exit.

inline std::size_t cmd_compose(const RunConfig& config) {
    if (config.dataset_path.empty()) throw UsageError("--dataset is required");
    if (config.seeds.empty()) throw UsageError("at least one seed is required");
    if (config.out_dir.empty()) throw UsageError("--out is required");

    Schema schema;
    if (!config.schema_path.empty()) schema = load_schema(config.schema_path);
    auto dataset = load_csv(config.dataset_path, config.missing_marker, schema);
    const auto checksum = file_checksum(config.dataset_path);
    auto [train, test] = split_holdout(dataset, config.train_fraction, config.split_seed);

    StrategyParams params;
    params.apply(config.overrides);
    const auto kind = strategy_from_name(config.strategy);

    std::filesystem::create_directories(std::filesystem::path(config.out_dir) / "runs");
    write_manifest(config, checksum, dataset);

    std::atomic<std::size_t> feasible{0};
    run_parallel(config.seeds.size(), [&](std::size_t i) {
        const std::uint64_t seed = config.seeds[i];
        std::ofstream log(run_file(config.out_dir, seed, ".jsonl"));
        RecordSink sink = [&log](const EvaluationRecord& rec) {
            log << record_to_json(rec).dump() << "\n";
            log.flush();  // completed evaluations survive a crash
        };
        auto result = run_strategy(kind, config.space_name, train, test, config.budget, seed,
                                   params, config.k_folds, sink);
        write_run_result(config.out_dir, result);
        if (result.feasible) feasible.fetch_add(1);
    });
    return feasible.load();
}

// ── analyze ─────────────────────────────────────────────────────────

struct AnalyzeConfig {
    std::string archive_dir;
    std::set<std::string> analyses = {"similarity", "cluster", "bootstrap", "trajectories"};
    int bootstrap_pick = 4;
    long bootstrap_samples = 100000;
    bool with_replacement = true;
};

namespace detail {

inline void write_similarity_reports(const std::filesystem::path& reports,
                                     const LoadedArchive& archive) {
    auto runs = archive.analyzed_runs();
    if (runs.empty()) throw AnalysisError("no feasible runs to compare");
    auto matrix = similarity_matrix(runs, similarity_weights(archive.space()));

    std::ofstream csv(reports / "similarity.csv");
    csv << "run";
    for (const auto& id : matrix.run_ids) csv << ',' << id;
    csv << '\n';
    char buf[64];
    for (std::size_t i = 0; i < matrix.size(); ++i) {
        csv << matrix.run_ids[i];
        for (std::size_t j = 0; j < matrix.size(); ++j) {
            std::snprintf(buf, sizeof buf, ",%.17g", matrix.at(i, j));
            csv << buf;
        }
        csv << '\n';
    }

    nlohmann::json summary;
    summary["mean_pairwise_similarity"] = matrix.mean_pairwise;
    summary["holdout_error_variance"] = matrix.performance_variance;
    summary["runs_compared"] = matrix.size();
    summary["runs_excluded_infeasible"] = archive.runs.size() - runs.size();
    std::ofstream js(reports / "similarity_summary.json");
    js << summary.dump(2) << "\n";
}

inline void write_cluster_reports(const std::filesystem::path& reports,
                                  const LoadedArchive& archive) {
    auto runs = archive.analyzed_runs();
    auto matrix = similarity_matrix(runs, similarity_weights(archive.space()));
    std::vector<double> cv;
    for (const auto& r : runs) cv.push_back(r.cv_error);
    auto dendro = cluster(matrix, cv);

    std::ofstream newick(reports / "dendrogram.newick");
    newick << to_newick(dendro) << "\n";

    std::ofstream md(reports / "clusters.md");
    md << "# Complete-linkage clustering\n\n";
    md << "| merge | left | right | distance | size | cv mean | cv std |\n";
    md << "|-------|------|-------|----------|------|---------|--------|\n";
    auto label = [&](int id) {
        return id < static_cast<int>(dendro.leaves.size())
                   ? dendro.leaves[static_cast<std::size_t>(id)]
                   : "cluster_" + std::to_string(id);
    };
    char buf[160];
    for (std::size_t m = 0; m < dendro.merges.size(); ++m) {
        const auto& merge = dendro.merges[m];
        std::snprintf(buf, sizeof buf, "| %zu | %s | %s | %.4f | %d | %.4f | %.4f |\n",
                      m + dendro.leaves.size(), label(merge.a).c_str(), label(merge.b).c_str(),
                      merge.distance, merge.size, merge.cv_mean, merge.cv_std);
        md << buf;
    }
}

inline void write_bootstrap_report(const std::filesystem::path& reports,
                                   const LoadedArchive& archive, const AnalyzeConfig& config) {
    auto runs = archive.analyzed_runs();
    if (runs.empty()) throw AnalysisError("no feasible runs to bootstrap");
    std::vector<std::pair<double, double>> cv_records, holdout_records;
    for (const auto& r : runs) {
        cv_records.emplace_back(r.cv_error, r.cv_error);
        holdout_records.emplace_back(r.cv_error, r.holdout_error);
    }
    const auto seed = archive.analysis_seed();
    auto eps = bootstrap(cv_records, config.bootstrap_pick, config.bootstrap_samples, seed,
                         config.with_replacement);
    auto holdout = bootstrap(holdout_records, config.bootstrap_pick, config.bootstrap_samples,
                             seed, config.with_replacement);
    std::ofstream csv(reports / "bootstrap.csv");
    csv << "metric,mean,ci_low,ci_high,samples,pick,with_replacement\n";
    char buf[200];
    std::snprintf(buf, sizeof buf, "cv_error,%.17g,%.17g,%.17g,%ld,%d,%d\n", eps.mean, eps.ci_low,
                  eps.ci_high, eps.samples, eps.pick, config.with_replacement ? 1 : 0);
    csv << buf;
    std::snprintf(buf, sizeof buf, "holdout_error,%.17g,%.17g,%.17g,%ld,%d,%d\n", holdout.mean,
                  holdout.ci_low, holdout.ci_high, holdout.samples, holdout.pick,
                  config.with_replacement ? 1 : 0);
    csv << buf;
}

inline void write_trajectory_reports(const std::filesystem::path& reports,
                                     const LoadedArchive& archive) {
    std::vector<Trajectory> trajectories;
    std::ofstream csv(reports / "trajectories.csv");
    csv << "run,wall_time,best_cv_error\n";
    char buf[160];
    for (const auto& run : archive.runs) {
        if (run.trajectory.empty()) continue;
        trajectories.push_back(run.trajectory);
        for (const auto& point : run.trajectory) {
            std::snprintf(buf, sizeof buf, "seed_%llu,%.17g,%.17g\n",
                          static_cast<unsigned long long>(run.seed), point.wall_time,
                          point.best_cv_error);
            csv << buf;
        }
    }
    if (trajectories.empty()) throw AnalysisError("archive has no trajectory data");
    auto env = trajectory_envelope(trajectories);
    std::ofstream envcsv(reports / "envelope.csv");
    envcsv << "wall_time,best_min,best_median,best_max\n";
    for (std::size_t i = 0; i < env.grid.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", env.grid[i], env.low[i],
                      env.median[i], env.high[i]);
        envcsv << buf;
    }
}

}  // namespace detail

inline void cmd_analyze(const AnalyzeConfig& config) {
    auto archive = load_archive(config.archive_dir, /*verify_checksum=*/true);
    const auto reports = std::filesystem::path(config.archive_dir) / "reports";
    std::filesystem::create_directories(reports);
    for (const auto& analysis : config.analyses)
        if (analysis != "similarity" && analysis != "cluster" && analysis != "bootstrap" &&
            analysis != "trajectories")
            throw UsageError("unknown analysis '" + analysis + "'");
    if (config.analyses.count("similarity")) detail::write_similarity_reports(reports, archive);
    if (config.analyses.count("cluster")) detail::write_cluster_reports(reports, archive);
    if (config.analyses.count("bootstrap"))
        detail::write_bootstrap_report(reports, archive, config);
    if (config.analyses.count("trajectories")) detail::write_trajectory_reports(reports, archive);
}

// ── report ──────────────────────────────────────────────────────────
//
// Side-by-side table of bootstrap cv and holdout estimates per archive
// plus each archive's best pipeline, in the MV|OU|TR|DR|SA|predictor|meta
// column layout. All archives must reference the same dataset.

inline std::string cmd_report(const std::vector<std::string>& archive_dirs, int bootstrap_pick = 4,
                              long bootstrap_samples = 100000) {
    if (archive_dirs.empty()) throw UsageError("at least one archive is required");
    std::vector<LoadedArchive> archives;
    for (const auto& dir : archive_dirs) archives.push_back(load_archive(dir));
    for (const auto& archive : archives)
        if (archive.dataset_checksum() != archives.front().dataset_checksum())
            throw UsageError("archives reference different datasets; one table row per dataset");

    std::ostringstream md;
    md << "# Composition results — dataset `" << archives.front().dataset_name() << "`\n\n";
    md << "| strategy | space | feasible runs | cv error (bootstrap mean [95% CI]) | "
          "holdout error (bootstrap mean [95% CI]) |\n";
    md << "|----------|-------|---------------|------------------------------------|"
          "------------------------------------------|\n";
    char buf[256];
    for (const auto& archive : archives) {
        auto runs = archive.analyzed_runs();
        if (runs.empty()) {
            md << "| " << archive.strategy() << " | " << archive.space()
               << " | 0 | infeasible | infeasible |\n";
            continue;
        }
        std::vector<std::pair<double, double>> cv_records, holdout_records;
        for (const auto& r : runs) {
            cv_records.emplace_back(r.cv_error, r.cv_error);
            holdout_records.emplace_back(r.cv_error, r.holdout_error);
        }
        const auto seed = archive.analysis_seed();
        auto eps = bootstrap(cv_records, bootstrap_pick, bootstrap_samples, seed);
        auto holdout = bootstrap(holdout_records, bootstrap_pick, bootstrap_samples, seed);
        std::snprintf(buf, sizeof buf,
                      "| %s | %s | %zu | %.4f [%.4f, %.4f] | %.4f [%.4f, %.4f] |\n",
                      archive.strategy().c_str(), archive.space().c_str(), runs.size(), eps.mean,
                      eps.ci_low, eps.ci_high, holdout.mean, holdout.ci_low, holdout.ci_high);
        md << buf;
    }

    md << "\n## Best pipelines\n\n";
    md << "| strategy | MV | OU | TR | DR | SA | predictor | meta-predictor | holdout |\n";
    md << "|----------|----|----|----|----|----|-----------|----------------|--------|\n";
    for (const auto& archive : archives) {
        auto runs = archive.analyzed_runs();
        if (runs.empty()) continue;
        const auto* best = &runs.front();
        for (const auto& r : runs)
            if (r.cv_error < best->cv_error) best = &r;
        std::vector<std::string> row(7, "-");
        if (best->sequence.size() == 7) {
            row = best->sequence;
        } else if (best->sequence.size() == 2) {
            row[5] = best->sequence[0];
            row[6] = best->sequence[1];
        }
        for (auto& cell : row)
            if (cell == "none") cell = "-";
        std::snprintf(buf, sizeof buf, "| %s | %s | %s | %s | %s | %s | %s | %s | %.4f |\n",
                      archive.strategy().c_str(), row[0].c_str(), row[1].c_str(), row[2].c_str(),
                      row[3].c_str(), row[4].c_str(), row[5].c_str(), row[6].c_str(),
                      best->holdout_error);
        md << buf;
    }
    return md.str();
}

// ── catalog ─────────────────────────────────────────────────────────

// machine-readable component roster, one entry per registry component
inline std::string cmd_catalog() {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& comp : registry()) {
        nlohmann::json c;
        c["id"] = comp.id;
        c["stage"] = stage_name(comp.stage);
        c["arity"] = {comp.arity_in, comp.arity_out};
        nlohmann::json params = nlohmann::json::array();
        for (const auto& p : comp.params) {
            nlohmann::json pj;
            pj["name"] = p.name;
            switch (p.kind) {
                case ParamKind::continuous:
                    pj["kind"] = "continuous";
                    pj["lo"] = p.lo;
                    pj["hi"] = p.hi;
                    pj["log_scale"] = p.log_scale;
                    break;
                case ParamKind::integer:
                    pj["kind"] = "integer";
                    pj["lo"] = static_cast<long long>(p.lo);
                    pj["hi"] = static_cast<long long>(p.hi);
                    break;
                case ParamKind::categorical_simple:
                    pj["kind"] = "categorical";
                    pj["values"] = p.values;
                    break;
                case ParamKind::categorical_complex:
                    pj["kind"] = "component";
                    pj["stage"] = stage_name(p.component_stage);
                    break;
            }
            pj["default"] = value_to_text(p.def);
            params.push_back(pj);
        }
        c["params"] = params;
        out.push_back(c);
    }
    return out.dump(2) + "\n";
}

}  // namespace mcpsforge
