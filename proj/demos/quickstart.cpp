// Quickstart: compose a pipeline by hand, validate and execute it, then
// let TPE search the FULL space on a synthetic dataset.

#include <iostream>

#include "mcpsforge/mcpsforge.hpp"

using namespace mcpsforge;

namespace {

Dataset make_blobs(std::size_t per_class, std::uint64_t seed) {
    Dataset d;
    d.name = "blobs";
    d.class_names = {"a", "b"};
    d.columns.resize(5);
    for (std::size_t c = 0; c < 5; ++c)
        d.columns[c] = {"f" + std::to_string(c), ColumnKind::continuous, {}};
    d.resize(2 * per_class, 5);
    auto rng = make_rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t r = 0; r < d.n_rows; ++r) {
        const int cls = r < per_class ? 0 : 1;
        d.labels[r] = cls;
        for (std::size_t c = 0; c < 5; ++c) {
            const bool missing = unit(rng) < 0.05;
            d.set_cell(r, c, cls * 1.2 + noise(rng), missing);
        }
    }
    return d;
}

}  // namespace

int main() {
    auto data = make_blobs(150, 11);
    auto [train, test] = split_holdout(data, 0.7, 1);

    // a hand-built MCPS: impute -> standardize -> knn inside bagging
    auto net = make_chain({{"replace_constant", {{"strategy", std::string("mean")}}},
                           {"standardize", {}},
                           {"__meta__", {}}});
    net.transitions.erase("t3");
    net.add_transition("t3", make_meta_transition("bagging", {{"n", 5LL}, {"fraction", 0.8}},
                                                  "knn", {{"k", 5LL}}));

    auto report = validate(net);
    std::cout << "hand-built net valid: " << (report.valid() ? "yes" : "no") << "\n";
    std::cout << "flattened: ";
    for (const auto& m : flatten(net)) std::cout << m << " ";
    std::cout << "\n";

    auto [train_preds, state] = fit_net(net, train, 7);
    auto preds = predict_net(net, test, state, 7);
    std::size_t wrong = 0;
    for (std::size_t r = 0; r < test.n_rows; ++r)
        if (preds.labels[r] != test.labels[r]) wrong++;
    std::cout << "hand-built holdout error: "
              << static_cast<double>(wrong) / static_cast<double>(test.n_rows) << "\n";

    // now let TPE search the FULL space for a better chain
    Budget budget;
    budget.max_evaluations = 120;
    budget.per_eval_timeout = 2.0;
    auto result = run_strategy(StrategyKind::tpe, "full", train, test, budget, 0);
    if (result.feasible) {
        std::cout << "tpe incumbent cv error: " << result.incumbent_cv << "\n";
        std::cout << "tpe holdout error: " << *result.holdout_error << "\n";
        std::cout << "tpe pipeline: ";
        for (const auto& m : slot_sequence(result.incumbent)) std::cout << m << " ";
        std::cout << "\n";
    }
    return 0;
}
