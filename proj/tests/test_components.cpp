#include <catch2/catch_amalgamated.hpp>

#include "mcpsforge/component_ops.hpp"
#include "test_support.hpp"

using namespace mcpsforge;
using testsupport::two_class_gaussian;

namespace {

// Independent type-7 quantile: explicit floor/ceil weighting, no shared
// code with the library implementation.
double oracle_quantile(std::vector<double> xs, double p) {
    std::sort(xs.begin(), xs.end());
    const double h = (static_cast<double>(xs.size()) - 1.0) * p;
    const auto fl = static_cast<std::size_t>(h);
    const auto ce = static_cast<std::size_t>(std::ceil(h));
    if (fl == ce) return xs[fl];
    return xs[fl] * (static_cast<double>(ce) - h) + xs[ce] * (h - static_cast<double>(fl));
}

Dataset single_column(const std::vector<double>& vals) {
    Dataset d;
    d.class_names = {"a", "b"};
    d.columns = {{"x", ColumnKind::continuous, {}}};
    d.resize(vals.size(), 1);
    for (std::size_t r = 0; r < vals.size(); ++r) {
        d.set_cell(r, 0, vals[r]);
        d.labels[r] = static_cast<int>(r % 2);
    }
    return d;
}

Dataset skewed_two_class(std::size_t majority, std::size_t minority) {
    Dataset d;
    d.class_names = {"maj", "min"};
    d.columns = {{"x", ColumnKind::continuous, {}}};
    d.resize(majority + minority, 1);
    for (std::size_t r = 0; r < d.n_rows; ++r) {
        d.labels[r] = r < majority ? 0 : 1;
        d.set_cell(r, 0, static_cast<double>(r));
    }
    return d;
}

}  // namespace

TEST_CASE("registry parameter bookkeeping matches the documented roster") {
    struct Expected {
        Stage stage;
        const char* id;
        int numeric, cat_simple, cat_complex;
    };
    const Expected table[] = {
        {Stage::missing_values, "none", 0, 0, 0},
        {Stage::missing_values, "replace_constant", 0, 1, 0},
        {Stage::outliers, "none", 0, 0, 0},
        {Stage::outliers, "iqr_remove", 1, 0, 0},
        {Stage::transformation, "none", 0, 0, 0},
        {Stage::transformation, "center", 0, 0, 0},
        {Stage::transformation, "standardize", 0, 0, 0},
        {Stage::transformation, "normalize", 2, 0, 0},
        {Stage::dim_reduction, "none", 0, 0, 0},
        {Stage::dim_reduction, "random_subset", 1, 0, 0},
        {Stage::dim_reduction, "pca", 1, 0, 0},
        {Stage::dim_reduction, "correlation_top_m", 1, 0, 0},
        {Stage::sampling, "none", 0, 0, 0},
        {Stage::sampling, "resample", 1, 1, 0},
        {Stage::sampling, "periodic", 1, 0, 0},
        {Stage::predictor, "zeror", 0, 0, 0},
        {Stage::predictor, "oner", 1, 0, 0},
        {Stage::predictor, "decision_stump", 0, 0, 0},
        {Stage::predictor, "knn", 1, 1, 0},
        {Stage::predictor, "naive_bayes", 1, 0, 0},
        {Stage::predictor, "logistic", 3, 0, 0},
        {Stage::predictor, "tree", 2, 0, 0},
        {Stage::meta_predictor, "none", 0, 0, 0},
        {Stage::meta_predictor, "bagging", 2, 0, 1},
        {Stage::meta_predictor, "adaboostm1", 1, 1, 1},
        {Stage::meta_predictor, "random_subspace", 2, 0, 1},
        {Stage::meta_predictor, "vote", 1, 1, 1},
    };
    REQUIRE(registry().size() == std::size(table));
    for (const auto& e : table) {
        const auto* c = find_component(e.stage, e.id);
        INFO(e.id);
        REQUIRE(c != nullptr);
        int numeric = 0, cs = 0, cc = 0;
        for (const auto& p : c->params) {
            if (p.kind == ParamKind::continuous || p.kind == ParamKind::integer) numeric++;
            if (p.kind == ParamKind::categorical_simple) cs++;
            if (p.kind == ParamKind::categorical_complex) cc++;
        }
        REQUIRE(numeric == e.numeric);
        REQUIRE(cs == e.cat_simple);
        REQUIRE(cc == e.cat_complex);
    }
}

TEST_CASE("replace_constant exposes one five-valued strategy choice") {
    const auto* c = find_component(Stage::missing_values, "replace_constant");
    REQUIRE(c->params.size() == 1);
    REQUIRE(c->params[0].kind == ParamKind::categorical_simple);
    REQUIRE(c->params[0].values.size() == 5);
}

TEST_CASE("iqr_remove is an outlier-stage component with one numeric parameter") {
    const auto* c = find_component(Stage::outliers, "iqr_remove");
    REQUIRE(c->stage == Stage::outliers);
    REQUIRE(c->params.size() == 1);
    REQUIRE(c->params[0].kind == ParamKind::continuous);
}

TEST_CASE("every meta-predictor nests exactly one base predictor choice") {
    for (const auto* c : components_of_stage(Stage::meta_predictor)) {
        if (c->id == "none") continue;
        int complex_params = 0;
        for (const auto& p : c->params)
            if (p.kind == ParamKind::categorical_complex) {
                complex_params++;
                REQUIRE(p.component_stage == Stage::predictor);
            }
        REQUIRE(complex_params == 1);
    }
    // and the complex choice ranges over all predictors
    REQUIRE(components_of_stage(Stage::predictor).size() == 7);
}

TEST_CASE("standardize yields zero mean and unit sample std") {
    auto d = two_class_gaussian(60, 5, 21);
    for (std::size_t r = 0; r < d.n_rows; ++r) d.set_cell(r, 2, d.cell(r, 2) * 1000.0 + 5.0);
    auto fitres = fit_transform("standardize", {}, d, 0);
    for (std::size_t c = 0; c < d.n_cols(); ++c) {
        std::vector<double> col;
        for (std::size_t r = 0; r < d.n_rows; ++r) col.push_back(fitres.fit_output.cell(r, c));
        REQUIRE(std::abs(mean_of(col)) < 1e-9);
        REQUIRE(std::abs(sample_std(col) - 1.0) < 1e-9);
    }
}

TEST_CASE("standardize applied back to its fit data reproduces fit output") {
    auto d = two_class_gaussian(40, 3, 33);
    auto fitres = fit_transform("standardize", {}, d, 0);
    auto again = apply_transform(fitres.fitted, d);
    REQUIRE(again.cells == fitres.fit_output.cells);
}

TEST_CASE("iqr removal drops the planted outlier from {1,2,3,4,100}") {
    auto d = single_column({1, 2, 3, 4, 100});
    // brute-force oracle: type-7 quartiles of the column
    REQUIRE(oracle_quantile({1, 2, 3, 4, 100}, 0.25) == 2.0);
    REQUIRE(oracle_quantile({1, 2, 3, 4, 100}, 0.75) == 4.0);
    const double hi = 4.0 + 1.5 * (4.0 - 2.0);
    REQUIRE(100.0 > hi);

    auto fitres = fit_transform("iqr_remove", {{"multiplier", 1.5}}, d, 0);
    REQUIRE(fitres.fit_output.n_rows == 4);
    for (std::size_t r = 0; r < 4; ++r) REQUIRE(fitres.fit_output.cell(r, 0) != 100.0);
    // predict-time apply never drops rows
    auto applied = apply_transform(fitres.fitted, d);
    REQUIRE(applied.n_rows == 5);
}

TEST_CASE("iqr bounds agree with the quantile oracle on random columns") {
    auto rng = make_rng(99);
    std::uniform_real_distribution<double> u(-50, 50);
    std::uniform_int_distribution<int> len(5, 40);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> vals(static_cast<std::size_t>(len(rng)));
        for (auto& v : vals) v = u(rng);
        const double mult = 1.5 + (trial % 4) * 0.5;
        auto d = single_column(vals);
        auto fitres = fit_transform("iqr_remove", {{"multiplier", mult}}, d, 0);

        const double q1 = oracle_quantile(vals, 0.25), q3 = oracle_quantile(vals, 0.75);
        const double lo = q1 - mult * (q3 - q1), hi = q3 + mult * (q3 - q1);
        std::vector<double> kept;
        for (double v : vals)
            if (v >= lo && v <= hi) kept.push_back(v);
        if (kept.empty()) kept = vals;  // implementation refuses to drop everything

        std::vector<double> got;
        for (std::size_t r = 0; r < fitres.fit_output.n_rows; ++r)
            got.push_back(fitres.fit_output.cell(r, 0));
        REQUIRE(got == kept);
    }
}

TEST_CASE("iqr on a constant column removes nothing") {
    auto d = single_column({5, 5, 5, 5, 5, 5});
    auto fitres = fit_transform("iqr_remove", {{"multiplier", 1.5}}, d, 0);
    REQUIRE(fitres.fit_output.n_rows == 6);
}

TEST_CASE("imputation clears every missing cell") {
    auto d = two_class_gaussian(30, 4, 8);
    auto rng = make_rng(4);
    std::uniform_int_distribution<std::size_t> rr(0, d.n_rows - 1), cc(0, d.n_cols() - 1);
    for (int i = 0; i < 25; ++i) d.set_cell(rr(rng), cc(rng), 0, true);
    REQUIRE(d.missing_count() > 0);
    for (const char* strategy : {"zero", "mean", "median", "min", "max"}) {
        auto fitres = fit_transform("replace_constant", {{"strategy", std::string(strategy)}}, d, 0);
        REQUIRE(fitres.fit_output.missing_count() == 0);
        auto applied = apply_transform(fitres.fitted, d);
        REQUIRE(applied.missing_count() == 0);
    }
}

TEST_CASE("imputation constants follow the declared strategy") {
    auto d = single_column({1, 2, 3, 4, 10});
    d.set_cell(2, 0, 0, true);  // non-missing values: 1,2,4,10
    auto check = [&](const char* strategy, double expect) {
        auto f = fit_transform("replace_constant", {{"strategy", std::string(strategy)}}, d, 0);
        REQUIRE(f.fit_output.cell(2, 0) == Catch::Approx(expect).margin(1e-12));
    };
    check("zero", 0.0);
    check("mean", (1 + 2 + 4 + 10) / 4.0);
    check("median", oracle_quantile({1, 2, 4, 10}, 0.5));
    check("min", 1.0);
    check("max", 10.0);
}

TEST_CASE("normalize maps fit range onto [lo, hi]") {
    auto d = single_column({2, 4, 6, 8, 10});
    auto f = fit_transform("normalize", {{"lo", -1.0}, {"hi", 1.0}}, d, 0);
    REQUIRE(f.fit_output.cell(0, 0) == Catch::Approx(-1.0));
    REQUIRE(f.fit_output.cell(4, 0) == Catch::Approx(1.0));
    REQUIRE(f.fit_output.cell(2, 0) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("zeror predicts the majority class with its training error") {
    auto d = skewed_two_class(60, 40);
    auto model = fit_atomic_predictor("zeror", {}, d, 0);
    auto preds = model->predict(d);
    std::size_t wrong = 0;
    for (std::size_t r = 0; r < d.n_rows; ++r) {
        REQUIRE(preds.labels[r] == 0);
        if (preds.labels[r] != d.labels[r]) wrong++;
    }
    REQUIRE(static_cast<double>(wrong) / static_cast<double>(d.n_rows) == Catch::Approx(0.40));
}

TEST_CASE("knn with k=1 reproduces its own training labels") {
    auto d = two_class_gaussian(40, 3, 55);
    auto model = fit_atomic_predictor("knn", {{"k", 1LL}}, d, 0);
    auto preds = model->predict(d);
    for (std::size_t r = 0; r < d.n_rows; ++r) REQUIRE(preds.labels[r] == d.labels[r]);
}

TEST_CASE("predictors reject inputs with missing cells") {
    auto d = two_class_gaussian(20, 3, 2);
    d.set_cell(3, 1, 0, true);
    for (const char* m :
         {"zeror", "oner", "decision_stump", "knn", "naive_bayes", "logistic", "tree"})
        REQUIRE_THROWS_AS(fit_atomic_predictor(m, {}, d, 0), ContractError);
    // and at predict time too
    auto clean = two_class_gaussian(20, 3, 2);
    auto model = fit_atomic_predictor("knn", {}, clean, 0);
    REQUIRE_THROWS_AS(model->predict(d), ContractError);
}

TEST_CASE("resample and periodic act at fit time only") {
    auto d = two_class_gaussian(30, 2, 10);
    auto f1 = fit_transform("resample", {{"fraction", 0.5}, {"replace", std::string("false")}}, d, 3);
    REQUIRE(f1.fit_output.n_rows == 30);
    REQUIRE(apply_transform(f1.fitted, d).n_rows == d.n_rows);

    auto f2 = fit_transform("periodic", {{"interval", 3LL}}, d, 3);
    REQUIRE(f2.fit_output.n_rows == 20);
    REQUIRE(apply_transform(f2.fitted, d).n_rows == d.n_rows);
    // rows 0, 3, 6, ... are the ones kept
    REQUIRE(f2.fit_output.row_ids[0] == 0);
    REQUIRE(f2.fit_output.row_ids[1] == 3);
}

TEST_CASE("stochastic components are deterministic per seed") {
    auto d = two_class_gaussian(40, 20, 12);
    auto a = fit_transform("random_subset", {{"fraction", 0.5}}, d, 77);
    auto b = fit_transform("random_subset", {{"fraction", 0.5}}, d, 77);
    auto c = fit_transform("random_subset", {{"fraction", 0.5}}, d, 78);
    REQUIRE(a.fit_output.columns.size() == b.fit_output.columns.size());
    REQUIRE(a.fit_output.cells == b.fit_output.cells);
    bool same_as_c = a.fit_output.columns.size() == c.fit_output.columns.size();
    if (same_as_c)
        for (std::size_t i = 0; i < a.fit_output.columns.size(); ++i)
            same_as_c = same_as_c && a.fit_output.columns[i].name == c.fit_output.columns[i].name;
    REQUIRE_FALSE(same_as_c);

    auto r1 = fit_transform("resample", {{"fraction", 0.5}, {"replace", std::string("true")}}, d, 5);
    auto r2 = fit_transform("resample", {{"fraction", 0.5}, {"replace", std::string("true")}}, d, 5);
    REQUIRE(r1.fit_output.row_ids == r2.fit_output.row_ids);
}

TEST_CASE("pca with all variance kept reconstructs centered data") {
    auto d = two_class_gaussian(50, 6, 31);
    auto f = fit_transform("pca", {{"variance_kept", 1.0}}, d, 0);
    auto pca = std::dynamic_pointer_cast<const PcaTransform>(f.fitted.transform);
    REQUIRE(pca != nullptr);
    auto recon = pca->reconstruct(f.fit_output);
    double rms = 0.0;
    for (std::size_t r = 0; r < d.n_rows; ++r)
        for (std::size_t c = 0; c < d.n_cols(); ++c) {
            const double centered = d.cell(r, c) - pca->mean()(static_cast<Eigen::Index>(c));
            const double diff = recon(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) -
                                centered;
            rms += diff * diff;
        }
    rms = std::sqrt(rms / static_cast<double>(d.n_rows * d.n_cols()));
    REQUIRE(rms < 1e-6);
}

TEST_CASE("pca drops components when variance budget shrinks") {
    // one dominant direction: keep 0.9 of variance with a single component
    Dataset d;
    d.class_names = {"a", "b"};
    d.columns = {{"x", ColumnKind::continuous, {}}, {"y", ColumnKind::continuous, {}}};
    d.resize(100, 2);
    auto rng = make_rng(3);
    std::normal_distribution<double> big(0, 10), small(0, 0.1);
    for (std::size_t r = 0; r < 100; ++r) {
        const double t = big(rng);
        d.set_cell(r, 0, t);
        d.set_cell(r, 1, 0.5 * t + small(rng));
        d.labels[r] = static_cast<int>(r % 2);
    }
    auto f = fit_transform("pca", {{"variance_kept", 0.9}}, d, 0);
    REQUIRE(f.fit_output.n_cols() == 1);
}

TEST_CASE("correlation_top_m keeps the label-correlated columns") {
    Dataset d;
    d.class_names = {"a", "b"};
    d.columns = {{"noise1", ColumnKind::continuous, {}},
                 {"signal", ColumnKind::continuous, {}},
                 {"noise2", ColumnKind::continuous, {}}};
    d.resize(200, 3);
    auto rng = make_rng(14);
    std::normal_distribution<double> noise(0, 1);
    for (std::size_t r = 0; r < 200; ++r) {
        d.labels[r] = static_cast<int>(r % 2);
        d.set_cell(r, 0, noise(rng));
        d.set_cell(r, 1, d.labels[r] * 2.0 + 0.1 * noise(rng));
        d.set_cell(r, 2, noise(rng));
    }
    auto f = fit_transform("correlation_top_m", {{"m", 1LL}}, d, 0);
    REQUIRE(f.fit_output.n_cols() == 1);
    REQUIRE(f.fit_output.columns[0].name == "signal");
}

TEST_CASE("adaboost renormalizes weights every round and stops early when appropriate") {
    auto d = two_class_gaussian(50, 3, 61);
    AdaBoostM1Predictor boost(d, 12, false, "decision_stump", {}, 9);
    REQUIRE(boost.rounds_used() >= 1);
    for (double s : boost.weight_sums_after_round()) REQUIRE(std::abs(s - 1.0) <= 1e-9);

    // trivially separable data: the first round is perfect, boosting halts
    Dataset sep = single_column({0, 1, 2, 3, 100, 101, 102, 103});
    for (std::size_t r = 0; r < sep.n_rows; ++r) sep.labels[r] = r < 4 ? 0 : 1;
    AdaBoostM1Predictor early(sep, 12, false, "decision_stump", {}, 9);
    REQUIRE(early.rounds_used() == 1);
}

TEST_CASE("adaboost improves over its base stump on a two-blob problem") {
    auto d = two_class_gaussian(80, 4, 71);
    auto stump = fit_atomic_predictor("decision_stump", {}, d, 0);
    AdaBoostM1Predictor boost(d, 15, false, "decision_stump", {}, 5);
    auto err = [&](const Predictions& p) {
        std::size_t wrong = 0;
        for (std::size_t r = 0; r < d.n_rows; ++r)
            if (p.labels[r] != d.labels[r]) wrong++;
        return static_cast<double>(wrong) / static_cast<double>(d.n_rows);
    };
    REQUIRE(err(boost.predict(d)) <= err(stump->predict(d)) + 1e-12);
}

TEST_CASE("bagging and random_subspace with n=1, fraction=1 equal the base predictor") {
    auto d = two_class_gaussian(40, 4, 41);
    auto probe = two_class_gaussian(15, 4, 42);
    const std::uint64_t seed = 123;
    auto base = fit_atomic_predictor("tree", {{"max_depth", 4LL}}, d, mix_seed(seed, 0));
    auto base_preds = base->predict(probe);

    BaggingPredictor bag(d, 1, 1.0, "tree", {{"max_depth", 4LL}}, seed);
    auto bag_preds = bag.predict(probe);
    REQUIRE(bag_preds.labels == base_preds.labels);
    REQUIRE(bag_preds.proba == base_preds.proba);

    RandomSubspacePredictor sub(d, 1, 1.0, "tree", {{"max_depth", 4LL}}, seed);
    auto sub_preds = sub.predict(probe);
    REQUIRE(sub_preds.labels == base_preds.labels);
    REQUIRE(sub_preds.proba == base_preds.proba);
}

TEST_CASE("vote combiner follows its rule") {
    Predictions a{{0, 1, 0}, {0.9, 0.1, 0.4, 0.6, 0.8, 0.2}, 2};
    Predictions b{{1, 1, 0}, {0.2, 0.8, 0.3, 0.7, 0.9, 0.1}, 2};
    Predictions c{{0, 1, 1}, {0.6, 0.4, 0.1, 0.9, 0.2, 0.8}, 2};
    auto maj = combine_votes({a, b, c}, "majority");
    REQUIRE(maj.labels == std::vector<int>{0, 1, 0});
    auto avg = combine_votes({a, b, c}, "average");
    REQUIRE(avg.score(0, 0) == Catch::Approx((0.9 + 0.2 + 0.6) / 3));
    REQUIRE(avg.labels[0] == 0);
}

TEST_CASE("logistic separates standardized blobs") {
    auto d = two_class_gaussian(60, 3, 81);
    auto std_fit = fit_transform("standardize", {}, d, 0);
    auto model = fit_atomic_predictor(
        "logistic", {{"l2", 1e-4}, {"epochs", 100LL}, {"rate", 0.5}}, std_fit.fit_output, 0);
    auto preds = model->predict(std_fit.fit_output);
    std::size_t wrong = 0;
    for (std::size_t r = 0; r < d.n_rows; ++r)
        if (preds.labels[r] != d.labels[r]) wrong++;
    REQUIRE(static_cast<double>(wrong) / static_cast<double>(d.n_rows) < 0.25);
}

TEST_CASE("oner picks the single informative attribute") {
    Dataset d;
    d.class_names = {"a", "b"};
    d.columns = {{"junk", ColumnKind::continuous, {}}, {"signal", ColumnKind::continuous, {}}};
    d.resize(100, 2);
    auto rng = make_rng(2);
    std::normal_distribution<double> noise(0, 1);
    for (std::size_t r = 0; r < 100; ++r) {
        d.labels[r] = static_cast<int>(r % 2);
        d.set_cell(r, 0, noise(rng));
        d.set_cell(r, 1, d.labels[r] * 10.0 + noise(rng));
    }
    auto model = fit_atomic_predictor("oner", {{"bins", 4LL}}, d, 0);
    auto preds = model->predict(d);
    std::size_t wrong = 0;
    for (std::size_t r = 0; r < 100; ++r)
        if (preds.labels[r] != d.labels[r]) wrong++;
    REQUIRE(wrong < 10);
    auto oner = std::dynamic_pointer_cast<const OneR>(model);
    REQUIRE(oner->chosen_column() == 1);
}

TEST_CASE("schema mismatch at apply time is a contract error") {
    auto d = two_class_gaussian(20, 3, 7);
    auto f = fit_transform("standardize", {}, d, 0);
    auto other = two_class_gaussian(20, 4, 7);
    REQUIRE_THROWS_AS(apply_transform(f.fitted, other), ContractError);
}
