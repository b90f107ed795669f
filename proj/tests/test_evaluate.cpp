#include <catch2/catch_amalgamated.hpp>

#include "mcpsforge/evaluate.hpp"
#include "test_support.hpp"

using namespace mcpsforge;
using testsupport::baseline_config;
using testsupport::two_class_gaussian;

namespace {

Dataset skewed(std::size_t majority, std::size_t minority, std::uint64_t seed) {
    Dataset d;
    d.class_names = {"maj", "min"};
    d.columns = {{"x", ColumnKind::continuous, {}}, {"y", ColumnKind::continuous, {}}};
    d.resize(majority + minority, 2);
    auto rng = make_rng(seed);
    std::normal_distribution<double> noise(0, 1);
    for (std::size_t r = 0; r < d.n_rows; ++r) {
        d.labels[r] = r < majority ? 0 : 1;
        d.set_cell(r, 0, noise(rng));
        d.set_cell(r, 1, noise(rng));
    }
    return d;
}

}  // namespace

TEST_CASE("zeror ten-fold error matches the per-fold majority oracle") {
    auto d = skewed(60, 40, 3);
    auto plan = plan_folds(d, 10, 7);
    Budget budget;
    auto rec = cv_evaluate(baseline_config("full", "zeror"), d, plan, budget, 11);
    REQUIRE(rec.status == EvalStatus::ok);
    REQUIRE(rec.fold_losses.size() == 10);

    // oracle: each fold's loss is its own minority-class share, because
    // the fit side always keeps class 0 as the majority (54/36 at worst)
    for (int f = 0; f < 10; ++f) {
        auto rows = plan.rows_in_fold(f);
        double minority = 0;
        for (int r : rows)
            if (d.labels[static_cast<std::size_t>(r)] == 1) minority += 1;
        const double expected = minority / static_cast<double>(rows.size());
        REQUIRE(rec.fold_losses[static_cast<std::size_t>(f)] ==
                Catch::Approx(expected).margin(1e-12));
    }
    REQUIRE(rec.cv_error == Catch::Approx(0.40).margin(1e-12));
    // the stored mean is exactly the mean of the stored fold losses
    REQUIRE(rec.cv_error == mean_of(rec.fold_losses));
}

TEST_CASE("missing data without imputation fails with the penalty error") {
    auto d = two_class_gaussian(40, 3, 5);
    d.set_cell(7, 1, 0, true);
    auto plan = plan_folds(d, 5, 1);
    Budget budget;
    auto rec = cv_evaluate(baseline_config("full", "knn"), d, plan, budget, 0);
    REQUIRE(rec.status == EvalStatus::failed);
    REQUIRE(rec.cv_error == kPenaltyError);
    REQUIRE(rec.note.find("missing") != std::string::npos);
}

TEST_CASE("identical configuration and seed give identical records modulo timing") {
    auto d = two_class_gaussian(50, 4, 9);
    auto plan = plan_folds(d, 10, 2);
    Budget budget;
    auto cfg = sample_config(space_by_name("full"), 77);
    auto a = cv_evaluate(cfg, d, plan, budget, 5);
    auto b = cv_evaluate(cfg, d, plan, budget, 5);
    REQUIRE(a.status == b.status);
    REQUIRE(a.fold_losses == b.fold_losses);
    REQUIRE(a.cv_error == b.cv_error);
    REQUIRE(a.config == b.config);
}

TEST_CASE("per-evaluation timeout aborts with the penalty") {
    auto d = two_class_gaussian(50, 4, 9);
    auto plan = plan_folds(d, 10, 2);
    Budget budget;
    budget.per_eval_timeout = 1e-9;
    auto rec = cv_evaluate(baseline_config("full", "tree"), d, plan, budget, 0);
    REQUIRE(rec.status == EvalStatus::aborted_timeout);
    REQUIRE(rec.cv_error == kPenaltyError);
}

TEST_CASE("advisory memory cap aborts with the penalty") {
    auto d = two_class_gaussian(50, 4, 9);
    auto plan = plan_folds(d, 5, 2);
    Budget budget;
    budget.per_eval_memory = 64;  // bytes; any real table estimate exceeds this
    auto rec = cv_evaluate(baseline_config("full", "zeror"), d, plan, budget, 0);
    REQUIRE(rec.status == EvalStatus::aborted_resource);
    REQUIRE(rec.cv_error == kPenaltyError);
}

TEST_CASE("fold losses stay within the unit interval across sampled configs") {
    auto d = two_class_gaussian(40, 4, 13);
    auto plan = plan_folds(d, 5, 4);
    Budget budget;
    CvObjective objective(d, plan, budget);
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        auto cfg = sample_config(space_by_name("full"), seed);
        auto rec = cv_evaluate(cfg, objective, budget, seed);
        for (double loss : rec.fold_losses) {
            REQUIRE(loss >= 0.0);
            REQUIRE(loss <= 1.0);
        }
        if (!rec.ok()) REQUIRE(rec.cv_error == kPenaltyError);
        else REQUIRE(rec.cv_error == mean_of(rec.fold_losses));
    }
}

TEST_CASE("final fit reproduces the majority error and knn identity") {
    auto train = skewed(60, 40, 21);
    auto test = skewed(60, 40, 22);
    REQUIRE(final_fit_and_test(baseline_config("full", "zeror"), train, test, 0) ==
            Catch::Approx(0.40));
    auto d = two_class_gaussian(40, 3, 23);
    auto nn1 = baseline_config("full", "knn");
    nn1.assignments["predictor.knn.k"] = 1LL;
    REQUIRE(final_fit_and_test(nn1, d, d, 0) == 0.0);
}

TEST_CASE("the holdout is never read during optimization-side evaluation") {
    auto whole = two_class_gaussian(80, 4, 31);
    auto [train, test] = split_holdout(whole, 0.7, 5);
    REQUIRE(test.touch_count() == 0);

    auto plan = plan_folds(train, 10, 3);
    Budget budget;
    CvObjective objective(train, plan, budget);
    for (std::uint64_t seed = 0; seed < 5; ++seed)
        cv_evaluate(sample_config(space_by_name("full"), seed), objective, budget, seed);
    REQUIRE(test.touch_count() == 0);

    final_fit_and_test(baseline_config("full", "zeror"), train, test, 0);
    REQUIRE(test.touch_count() > 0);
}

TEST_CASE("final fit surfaces component failures instead of encoding them") {
    auto d = two_class_gaussian(30, 3, 41);
    d.set_cell(2, 0, 0, true);
    REQUIRE_THROWS_AS(final_fit_and_test(baseline_config("full", "knn"), d, d, 0), Error);
}
