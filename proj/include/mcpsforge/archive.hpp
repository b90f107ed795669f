#pragma once

#include <thread>

#include "mcpsforge/analyze.hpp"

namespace mcpsforge {

// ── run configuration ───────────────────────────────────────────────

struct RunConfig {
    std::string dataset_path;
    std::string schema_path;
    std::string space_name = "full";
    std::string strategy = "random";
    Budget budget;
    std::vector<std::uint64_t> seeds;
    std::map<std::string, std::string> overrides;
    std::string out_dir;
    double train_fraction = 0.7;
    std::uint64_t split_seed = 1;
    int k_folds = 10;
    std::uint64_t analysis_seed = 9001;
    std::string missing_marker = "?";
};

// 0..n-1 for a bare count, or an explicit comma-separated list
inline std::vector<std::uint64_t> parse_seeds(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    if (text.find(',') == std::string::npos) {
        const long long n = std::stoll(text);
        if (n <= 0) throw UsageError("seed count must be positive");
        for (long long s = 0; s < n; ++s) seeds.push_back(static_cast<std::uint64_t>(s));
        return seeds;
    }
    std::stringstream ss(text);
    std::string field;
    while (std::getline(ss, field, ','))
        if (!field.empty()) seeds.push_back(std::stoull(field));
    if (seeds.empty()) throw UsageError("seed list is empty");
    return seeds;
}

inline std::string file_checksum(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArchiveError("cannot open for checksum: " + path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[65536];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
    }
    char out[32];
    std::snprintf(out, sizeof out, "fnv1a:%016llx", static_cast<unsigned long long>(h));
    return out;
}

// ── record / result serialization ───────────────────────────────────

inline nlohmann::json record_to_json(const EvaluationRecord& rec) {
    nlohmann::json j;
    j["eval"] = rec.eval_index;
    j["ts"] = rec.timestamp;
    j["wall"] = rec.wall_time;
    j["status"] = status_name(rec.status);
    j["cv_error"] = rec.cv_error;
    j["fold_losses"] = rec.fold_losses;
    j["config"] = config_to_json(rec.config);
    if (!rec.note.empty()) j["note"] = rec.note;
    return j;
}

inline EvaluationRecord record_from_json(const nlohmann::json& j) {
    EvaluationRecord rec;
    rec.eval_index = j.at("eval").get<long>();
    rec.timestamp = j.at("ts").get<std::string>();
    rec.wall_time = j.at("wall").get<double>();
    rec.status = status_from_name(j.at("status").get<std::string>());
    rec.cv_error = j.at("cv_error").get<double>();
    rec.fold_losses = j.at("fold_losses").get<std::vector<double>>();
    rec.config = config_from_json(j.at("config"));
    rec.note = j.value("note", "");
    return rec;
}

// ── archive writing ─────────────────────────────────────────────────
//
// Layout under the output directory:
//   manifest.json                       run config, dataset checksum
//   runs/seed_<s>.jsonl                 one evaluation record per line
//   runs/seed_<s>.summary.json          incumbent, errors, counters
//   runs/seed_<s>.trajectory.csv        best-so-far steps
//   runs/seed_<s>.net.json / .net.dot   incumbent net
//   reports/                            analysis outputs

inline void write_manifest(const RunConfig& config, const std::string& checksum,
                           const Dataset& d) {
    nlohmann::json j;
    j["version"] = kVersion;
    j["dataset"] = {{"path", config.dataset_path},
                    {"checksum", checksum},
                    {"rows", d.n_rows},
                    {"columns", d.n_cols()},
                    {"classes", d.class_names.size()}};
    if (!config.schema_path.empty()) j["schema"] = config.schema_path;
    j["space"] = config.space_name;
    j["strategy"] = config.strategy;
    j["budget"] = {{"wall_clock_limit", config.budget.wall_clock_limit},
                   {"max_evaluations", config.budget.max_evaluations},
                   {"per_eval_timeout", config.budget.per_eval_timeout},
                   {"per_eval_memory", config.budget.per_eval_memory}};
    j["seeds"] = config.seeds;
    j["overrides"] = config.overrides;
    j["train_fraction"] = config.train_fraction;
    j["split_seed"] = config.split_seed;
    j["k_folds"] = config.k_folds;
    j["analysis_seed"] = config.analysis_seed;
    j["missing_marker"] = config.missing_marker;
    std::ofstream out(std::filesystem::path(config.out_dir) / "manifest.json");
    out << j.dump(2) << "\n";
}

inline std::filesystem::path run_file(const std::string& dir, std::uint64_t seed,
                                      const std::string& suffix) {
    return std::filesystem::path(dir) / "runs" / ("seed_" + std::to_string(seed) + suffix);
}

inline void write_run_result(const std::string& dir, const RunResult& result) {
    nlohmann::json j;
    j["seed"] = result.seed;
    j["strategy"] = result.strategy;
    j["space"] = result.space;
    j["feasible"] = result.feasible;
    j["evaluations"] = result.state.history.size();
    j["wall_time"] = result.wall_time;
    if (result.feasible) {
        j["incumbent_cv"] = result.incumbent_cv;
        if (result.holdout_error) j["holdout_error"] = *result.holdout_error;
        j["incumbent_config"] = config_to_json(result.incumbent);
        j["sequence"] = slot_sequence(result.incumbent);
    }
    std::ofstream summary(run_file(dir, result.seed, ".summary.json"));
    summary << j.dump(2) << "\n";

    std::ofstream traj(run_file(dir, result.seed, ".trajectory.csv"));
    traj << "wall_time,best_cv_error\n";
    char buf[64];
    for (const auto& point : result.state.trajectory) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", point.wall_time, point.best_cv_error);
        traj << buf;
    }

    if (result.feasible) {
        auto net = instantiate(result.incumbent);
        std::ofstream net_json(run_file(dir, result.seed, ".net.json"));
        net_json << net_to_json(net).dump(2) << "\n";
        std::ofstream net_dot(run_file(dir, result.seed, ".net.dot"));
        net_dot << to_dot(net);
    }
}

// ── archive reading ─────────────────────────────────────────────────

struct LoadedRun {
    std::uint64_t seed = 0;
    bool feasible = false;
    double incumbent_cv = kPenaltyError;
    std::optional<double> holdout_error;
    Configuration incumbent;
    std::vector<std::string> sequence;
    Trajectory trajectory;
    std::size_t evaluations = 0;
    std::vector<EvaluationRecord> records;
};

struct LoadedArchive {
    std::string dir;
    nlohmann::json manifest;
    std::vector<LoadedRun> runs;

    std::string strategy() const { return manifest.at("strategy").get<std::string>(); }
    std::string space() const { return manifest.at("space").get<std::string>(); }
    std::string dataset_name() const {
        return std::filesystem::path(manifest.at("dataset").at("path").get<std::string>())
            .stem()
            .string();
    }
    std::string dataset_checksum() const {
        return manifest.at("dataset").at("checksum").get<std::string>();
    }
    std::uint64_t analysis_seed() const { return manifest.at("analysis_seed").get<std::uint64_t>(); }

    std::vector<LoadedRun> feasible_runs() const {
        std::vector<LoadedRun> out;
        for (const auto& r : runs)
            if (r.feasible) out.push_back(r);
        return out;
    }

    std::vector<AnalyzedRun> analyzed_runs() const {
        std::vector<AnalyzedRun> out;
        for (const auto& r : runs)
            if (r.feasible && r.holdout_error)
                out.push_back({"seed_" + std::to_string(r.seed), r.incumbent_cv, *r.holdout_error,
                               r.sequence});
        return out;
    }
};

inline LoadedArchive load_archive(const std::string& dir, bool verify_checksum = true,
                                  bool load_records = false) {
    LoadedArchive archive;
    archive.dir = dir;
    std::ifstream manifest_in(std::filesystem::path(dir) / "manifest.json");
    if (!manifest_in) throw ArchiveError("no manifest.json under " + dir);
    manifest_in >> archive.manifest;

    if (verify_checksum) {
        const auto path = archive.manifest.at("dataset").at("path").get<std::string>();
        const auto recorded = archive.dataset_checksum();
        const auto current = file_checksum(path);
        if (recorded != current)
            throw ArchiveError("dataset checksum mismatch for " + path + ": manifest has " +
                               recorded + ", file is " + current + " (stale archive?)");
    }

    for (const auto& seed_json : archive.manifest.at("seeds")) {
        const auto seed = seed_json.get<std::uint64_t>();
        LoadedRun run;
        run.seed = seed;
        std::ifstream summary_in(run_file(dir, seed, ".summary.json"));
        if (!summary_in) continue;  // partially written archive: skip the seed
        nlohmann::json summary;
        summary_in >> summary;
        run.feasible = summary.at("feasible").get<bool>();
        run.evaluations = summary.at("evaluations").get<std::size_t>();
        if (run.feasible) {
            run.incumbent_cv = summary.at("incumbent_cv").get<double>();
            if (summary.contains("holdout_error"))
                run.holdout_error = summary.at("holdout_error").get<double>();
            run.incumbent = config_from_json(summary.at("incumbent_config"));
            run.sequence = summary.at("sequence").get<std::vector<std::string>>();
        }
        std::ifstream traj_in(run_file(dir, seed, ".trajectory.csv"));
        std::string line;
        std::getline(traj_in, line);  // header
        while (std::getline(traj_in, line)) {
            const auto comma = line.find(',');
            if (comma == std::string::npos) continue;
            run.trajectory.push_back(
                {std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
        }
        if (load_records) {
            std::ifstream log_in(run_file(dir, seed, ".jsonl"));
            while (std::getline(log_in, line)) {
                if (line.empty()) continue;
                run.records.push_back(record_from_json(nlohmann::json::parse(line)));
            }
        }
        archive.runs.push_back(std::move(run));
    }
    return archive;
}

// ── worker pool ─────────────────────────────────────────────────────

inline std::size_t worker_count(std::size_t jobs) {
    std::size_t workers = std::thread::hardware_concurrency();
    if (const char* env = std::getenv("MCPS_FORGE_WORKERS")) {
        try {
            workers = static_cast<std::size_t>(std::stoul(env));
        } catch (const std::exception&) {
            throw UsageError("MCPS_FORGE_WORKERS must be a positive integer");
        }
    }
    return std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(jobs, 1));
}

// Runs fn(0..jobs-1) on a fixed pool; the first exception wins and is
// rethrown after all workers join.
inline void run_parallel(std::size_t jobs, const std::function<void(std::size_t)>& fn) {
    const std::size_t n_workers = worker_count(jobs);
    if (n_workers <= 1) {
        for (std::size_t i = 0; i < jobs; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n_workers; ++w)
        pool.emplace_back([&] {
            while (!failed.load()) {
                const std::size_t i = next.fetch_add(1);
                if (i >= jobs) break;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    failed.store(true);
                }
            }
        });
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace mcpsforge
