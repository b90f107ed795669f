#pragma once

#include "mcpsforge/evaluate.hpp"

namespace mcpsforge {

struct TrajectoryPoint {
    double wall_time = 0.0;       // seconds since the run started
    double best_cv_error = 1.0;  // best-so-far at that moment
};
using Trajectory = std::vector<TrajectoryPoint>;

// Suggest/observe bookkeeping shared by every strategy. History is
// append-only; the incumbent is always the earliest ok record achieving
// the minimum cv error (first-seen wins ties).
struct OptimizerState {
    std::vector<EvaluationRecord> history;
    std::optional<std::size_t> incumbent_index;
    Trajectory trajectory;

    const EvaluationRecord* incumbent() const {
        return incumbent_index ? &history[*incumbent_index] : nullptr;
    }

    void observe(EvaluationRecord rec, double wall_time_s) {
        history.push_back(std::move(rec));
        const auto& r = history.back();
        if (r.ok() && (!incumbent_index || r.cv_error < history[*incumbent_index].cv_error)) {
            incumbent_index = history.size() - 1;
            trajectory.push_back({wall_time_s, r.cv_error});
        }
    }

    std::size_t ok_count() const {
        std::size_t n = 0;
        for (const auto& r : history)
            if (r.ok()) n++;
        return n;
    }
};

struct StrategyParams {
    double tpe_gamma = 0.25;
    int tpe_candidates = 24;
    int tpe_startup = 10;
    int smac_trees = 10;
    int smac_min_leaf = 3;
    int smac_startup = 10;
    int smac_candidates = 1000;
    bool smac_interleave = true;
    double intensify_ladder = 2.0;  // fold-subset growth factor

    // Documented override keys: tpe.gamma, tpe.candidates, smac.trees,
    // smac.interleave, intensify.ladder (plus the startup/min-leaf knobs).
    void apply(const std::map<std::string, std::string>& overrides) {
        for (const auto& [key, value] : overrides) {
            if (key == "tpe.gamma") tpe_gamma = std::stod(value);
            else if (key == "tpe.candidates") tpe_candidates = std::stoi(value);
            else if (key == "tpe.startup") tpe_startup = std::stoi(value);
            else if (key == "smac.trees") smac_trees = std::stoi(value);
            else if (key == "smac.min_leaf") smac_min_leaf = std::stoi(value);
            else if (key == "smac.startup") smac_startup = std::stoi(value);
            else if (key == "smac.candidates") smac_candidates = std::stoi(value);
            else if (key == "smac.interleave") smac_interleave = value == "true" || value == "1";
            else if (key == "intensify.ladder") intensify_ladder = std::stod(value);
            else throw UsageError("unknown strategy override '" + key + "'");
        }
    }
};

class Suggester {
public:
    virtual ~Suggester() = default;
    virtual Configuration suggest(const OptimizerState& state, const SearchSpace& space,
                                  Rng& rng) = 0;
};

class RandomSuggester final : public Suggester {
public:
    Configuration suggest(const OptimizerState&, const SearchSpace& space, Rng& rng) override {
        auto cfg = sample_config(space, rng);
        cfg.lineage = "random";
        return cfg;
    }
};

// ── intensification ─────────────────────────────────────────────────
//
// Challenger folds grow 1, 2, 4, ... up to k; after each rung its mean on
// the shared subset is compared against the incumbent's losses on those
// same folds. A strictly worse mean before the full ladder discards the
// challenger with the penalty error; completing all folds yields an
// ordinary ok record (promotion is the caller's strict-improvement rule,
// so an exact tie keeps the incumbent).
inline EvaluationRecord intensify(const Configuration& challenger,
                                  const EvaluationRecord& incumbent, Objective& objective,
                                  const Budget& budget, std::uint64_t seed, long eval_index,
                                  double ladder_factor = 2.0) {
    const int k = objective.fold_count();
    const auto start = std::chrono::steady_clock::now();
    const auto deadline = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                      std::chrono::duration<double>(budget.per_eval_timeout));

    Objective::FoldOutcome total;
    int evaluated = 0;
    int rung = 1;
    while (evaluated < k) {
        const int next = std::min(k, std::max(evaluated + 1, rung));
        std::vector<int> fold_ids;
        for (int f = evaluated; f < next; ++f) fold_ids.push_back(f);
        auto outcome = objective.evaluate_folds(challenger, fold_ids, seed, deadline);
        total.losses.insert(total.losses.end(), outcome.losses.begin(), outcome.losses.end());
        if (outcome.status != EvalStatus::ok) {
            total.status = outcome.status;
            total.note = outcome.note;
            break;
        }
        evaluated = next;
        if (evaluated < k) {
            double challenger_mean = mean_of(total.losses);
            std::vector<double> shared(incumbent.fold_losses.begin(),
                                       incumbent.fold_losses.begin() + evaluated);
            if (challenger_mean > mean_of(shared)) {
                total.status = EvalStatus::discarded;
                total.note = "worse than incumbent on " + std::to_string(evaluated) + " fold(s)";
                break;
            }
        }
        rung = std::max(rung + 1, static_cast<int>(std::ceil(rung * ladder_factor)));
    }

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return make_record(challenger, total, k, wall, eval_index);
}

// ── run loop ────────────────────────────────────────────────────────

enum class StrategyKind { random, tpe, smac };

inline const char* strategy_name(StrategyKind s) {
    switch (s) {
        case StrategyKind::random: return "random";
        case StrategyKind::tpe: return "tpe";
        case StrategyKind::smac: return "smac";
    }
    return "?";
}

inline StrategyKind strategy_from_name(const std::string& s) {
    if (s == "random") return StrategyKind::random;
    if (s == "tpe") return StrategyKind::tpe;
    if (s == "smac") return StrategyKind::smac;
    throw UsageError("unknown optimizer '" + s + "' (expected random|tpe|smac)");
}

struct RunResult {
    std::uint64_t seed = 0;
    std::string strategy;
    std::string space;
    bool feasible = false;
    Configuration incumbent;
    double incumbent_cv = kPenaltyError;
    std::optional<double> holdout_error;
    OptimizerState state;
    double wall_time = 0.0;
};

using RecordSink = std::function<void(const EvaluationRecord&)>;

std::unique_ptr<Suggester> make_suggester(StrategyKind kind, const StrategyParams& params);

// suggest -> evaluate -> observe until the budget runs out. SMAC
// challengers race the incumbent fold-by-fold; every other strategy runs
// the full k folds per configuration.
inline RunResult run_optimization(StrategyKind kind, const SearchSpace& space,
                                  Objective& objective, const Budget& budget, std::uint64_t seed,
                                  const StrategyParams& params = {},
                                  const RecordSink& sink = nullptr) {
    if (!budget.sane()) throw UsageError("budget fields must be positive");
    RunResult result;
    result.seed = seed;
    result.strategy = strategy_name(kind);
    result.space = space.name;

    auto suggester = make_suggester(kind, params);
    auto rng = make_rng(seed, "optimizer");
    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };

    for (long idx = 0; idx < budget.max_evaluations && elapsed() < budget.wall_clock_limit;
         ++idx) {
        auto cfg = suggester->suggest(result.state, space, rng);
        const std::uint64_t eval_seed = mix_seed(seed, static_cast<std::uint64_t>(idx));
        EvaluationRecord rec;
        if (kind == StrategyKind::smac && result.state.incumbent() != nullptr) {
            rec = intensify(cfg, *result.state.incumbent(), objective, budget, eval_seed, idx,
                            params.intensify_ladder);
        } else {
            rec = cv_evaluate(cfg, objective, budget, eval_seed, idx);
        }
        result.state.observe(std::move(rec), elapsed());
        if (sink) sink(result.state.history.back());
    }

    result.wall_time = elapsed();
    if (result.state.incumbent() != nullptr) {
        result.feasible = true;
        result.incumbent = result.state.incumbent()->config;
        result.incumbent_cv = result.state.incumbent()->cv_error;
    }
    return result;
}

// Full per-seed run on a pre-split dataset: plan folds, optimize, then
// train the incumbent on the whole training split and score the holdout.
inline RunResult run_strategy(StrategyKind kind, const std::string& space_name,
                              const Dataset& train, const Dataset& test, const Budget& budget,
                              std::uint64_t seed, const StrategyParams& params = {}, int k = 10,
                              const RecordSink& sink = nullptr) {
    const auto& space = space_by_name(space_name);
    auto plan = plan_folds(train, k, seed);
    CvObjective objective(train, plan, budget);
    auto result = run_optimization(kind, space, objective, budget, seed, params, sink);
    if (result.feasible)
        result.holdout_error = final_fit_and_test(result.incumbent, train, test,
                                                  mix_seed(seed, "final_fit"));
    return result;
}

}  // namespace mcpsforge
