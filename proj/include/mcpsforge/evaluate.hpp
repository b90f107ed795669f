#pragma once

#include "mcpsforge/execute.hpp"
#include "mcpsforge/space.hpp"

namespace mcpsforge {

enum class EvalStatus { ok, aborted_timeout, aborted_resource, failed, discarded };

inline const char* status_name(EvalStatus s) {
    switch (s) {
        case EvalStatus::ok: return "ok";
        case EvalStatus::aborted_timeout: return "aborted_timeout";
        case EvalStatus::aborted_resource: return "aborted_resource";
        case EvalStatus::failed: return "failed";
        case EvalStatus::discarded: return "discarded";
    }
    return "?";
}

inline EvalStatus status_from_name(const std::string& s) {
    if (s == "ok") return EvalStatus::ok;
    if (s == "aborted_timeout") return EvalStatus::aborted_timeout;
    if (s == "aborted_resource") return EvalStatus::aborted_resource;
    if (s == "discarded") return EvalStatus::discarded;
    return EvalStatus::failed;
}

// Penalty assigned to anything that is not a complete, successful
// evaluation, so the optimizer keeps a total order over observations.
inline constexpr double kPenaltyError = 1.0;

struct EvaluationRecord {
    Configuration config;
    std::vector<double> fold_losses;  // losses of the folds actually evaluated
    double cv_error = kPenaltyError;
    EvalStatus status = EvalStatus::failed;
    double wall_time = 0.0;  // seconds spent in this evaluation
    long eval_index = -1;
    std::string timestamp;
    std::string note;  // diagnostic for non-ok records

    bool ok() const { return status == EvalStatus::ok; }
};

struct Budget {
    double wall_clock_limit = 300.0;  // seconds for the whole optimization loop
    long max_evaluations = 500;
    double per_eval_timeout = 10.0;                      // seconds per configuration step
    std::size_t per_eval_memory = 3ULL * 1024 * 1024 * 1024;  // advisory bytes

    bool sane() const {
        return wall_clock_limit > 0 && max_evaluations >= 0 && per_eval_timeout > 0 &&
               per_eval_memory > 0;
    }
};

inline std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const auto t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// ── objective abstraction ───────────────────────────────────────────
//
// Optimizers talk to a fold-wise objective so the same loop drives both
// the real cross-validated error and direct synthetic losses.

class Objective {
public:
    virtual ~Objective() = default;

    struct FoldOutcome {
        std::vector<double> losses;
        EvalStatus status = EvalStatus::ok;
        std::string note;
    };

    virtual int fold_count() const = 0;
    virtual FoldOutcome evaluate_folds(const Configuration& cfg, const std::vector<int>& fold_ids,
                                       std::uint64_t seed,
                                       const std::optional<std::chrono::steady_clock::time_point>&
                                           deadline) = 0;

    std::vector<int> all_folds() const {
        std::vector<int> out(static_cast<std::size_t>(fold_count()));
        std::iota(out.begin(), out.end(), 0);
        return out;
    }
};

// k-fold cross-validated misclassification error of an instantiated net.
// Fold subsets are materialized once; evaluations never touch rows of
// their own validation fold at fit time, asserted on every call through
// the row-id provenance carried by the tables.
class CvObjective final : public Objective {
public:
    CvObjective(Dataset train, const FoldPlan& plan, Budget budget)
        : budget_(budget), k_(plan.k) {
        for (int f = 0; f < plan.k; ++f) {
            auto fit_rows = plan.rows_outside_fold(f);
            auto valid_rows = plan.rows_in_fold(f);
            folds_.push_back({train.subset_rows(fit_rows), train.subset_rows(valid_rows)});
            std::set<int> fit_ids(folds_.back().first.row_ids.begin(),
                                  folds_.back().first.row_ids.end());
            for (int id : folds_.back().second.row_ids)
                if (fit_ids.count(id))
                    throw SplitError("fold plan places row " + std::to_string(id) +
                                     " on both sides");
        }
    }

    int fold_count() const override { return k_; }

    FoldOutcome evaluate_folds(const Configuration& cfg, const std::vector<int>& fold_ids,
                               std::uint64_t seed,
                               const std::optional<std::chrono::steady_clock::time_point>&
                                   deadline) override {
        FoldOutcome out;
        ExecLimits limits;
        limits.deadline = deadline;
        limits.memory_limit_bytes = budget_.per_eval_memory;
        try {
            auto net = instantiate(cfg);
            for (int f : fold_ids) {
                const auto& [fit_part, valid_part] = folds_.at(static_cast<std::size_t>(f));
                assert_disjoint(fit_part, valid_part);
                const std::uint64_t fold_seed = mix_seed(seed, static_cast<std::uint64_t>(f));
                auto [train_preds, state] = fit_net(net, fit_part, fold_seed, limits);
                auto preds = predict_net(net, valid_part, state, fold_seed, limits);
                std::size_t wrong = 0;
                for (std::size_t r = 0; r < valid_part.n_rows; ++r)
                    if (preds.labels[r] != valid_part.labels[r]) wrong++;
                out.losses.push_back(static_cast<double>(wrong) /
                                     static_cast<double>(valid_part.n_rows));
            }
        } catch (const TimeoutSignal&) {
            out.status = EvalStatus::aborted_timeout;
            out.note = "per-evaluation time limit exceeded";
        } catch (const ResourceSignal& r) {
            out.status = EvalStatus::aborted_resource;
            out.note = "estimated memory " + std::to_string(r.bytes) + " bytes over limit";
        } catch (const Error& e) {
            out.status = EvalStatus::failed;
            out.note = e.what();
        }
        return out;
    }

private:
    static void assert_disjoint(const Dataset& fit_part, const Dataset& valid_part) {
        std::set<int> ids(fit_part.row_ids.begin(), fit_part.row_ids.end());
        for (int id : valid_part.row_ids)
            if (ids.count(id))
                throw SplitError("validation row " + std::to_string(id) + " seen at fit time");
    }

    Budget budget_;
    int k_;
    std::vector<std::pair<Dataset, Dataset>> folds_;
};

// Deterministic direct config -> loss objective (no ML), used by strategy
// comparisons and tests.
class FunctionObjective final : public Objective {
public:
    explicit FunctionObjective(std::function<double(const Configuration&)> fn)
        : fn_(std::move(fn)) {}

    int fold_count() const override { return 1; }

    FoldOutcome evaluate_folds(const Configuration& cfg, const std::vector<int>&, std::uint64_t,
                               const std::optional<std::chrono::steady_clock::time_point>&)
        override {
        FoldOutcome out;
        const double loss = fn_(cfg);
        if (std::isfinite(loss)) {
            out.losses.push_back(std::clamp(loss, 0.0, 1.0));
        } else {
            out.status = EvalStatus::failed;
            out.note = "objective returned a non-finite loss";
        }
        return out;
    }

private:
    std::function<double(const Configuration&)> fn_;
};

// Assembles the record for one configuration step. Only a complete run
// over all k folds counts as ok; everything else carries the penalty.
inline EvaluationRecord make_record(Configuration cfg, const Objective::FoldOutcome& outcome,
                                    int k_expected, double wall_time, long eval_index) {
    EvaluationRecord rec;
    rec.config = std::move(cfg);
    rec.fold_losses = outcome.losses;
    rec.status = outcome.status;
    rec.note = outcome.note;
    rec.wall_time = wall_time;
    rec.eval_index = eval_index;
    rec.timestamp = iso_timestamp();
    if (outcome.status == EvalStatus::ok &&
        outcome.losses.size() == static_cast<std::size_t>(k_expected)) {
        rec.cv_error = mean_of(outcome.losses);
    } else {
        if (rec.status == EvalStatus::ok) rec.status = EvalStatus::discarded;
        rec.cv_error = kPenaltyError;
    }
    return rec;
}

// One full k-fold evaluation of a configuration under the budget's
// per-evaluation limits.
inline EvaluationRecord cv_evaluate(const Configuration& cfg, Objective& objective,
                                    const Budget& budget, std::uint64_t seed,
                                    long eval_index = -1) {
    const auto start = std::chrono::steady_clock::now();
    const auto deadline = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                      std::chrono::duration<double>(budget.per_eval_timeout));
    auto outcome = objective.evaluate_folds(cfg, objective.all_folds(), seed, deadline);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return make_record(cfg, outcome, objective.fold_count(), wall, eval_index);
}

inline EvaluationRecord cv_evaluate(const Configuration& cfg, const Dataset& train,
                                    const FoldPlan& folds, const Budget& budget,
                                    std::uint64_t seed) {
    CvObjective objective(train, folds, budget);
    return cv_evaluate(cfg, objective, budget, seed);
}

// Trains the chosen configuration on the full training split and scores
// the untouched holdout. Failures surface here: the caller picked this
// configuration deliberately.
inline double final_fit_and_test(const Configuration& cfg, const Dataset& train,
                                 const Dataset& test, std::uint64_t seed) {
    auto net = instantiate(cfg);
    auto [train_preds, state] = fit_net(net, train, seed);
    auto preds = predict_net(net, test, state, seed);
    std::size_t wrong = 0;
    for (std::size_t r = 0; r < test.n_rows; ++r)
        if (preds.labels[r] != test.labels[r]) wrong++;
    return static_cast<double>(wrong) / static_cast<double>(test.n_rows);
}

}  // namespace mcpsforge
