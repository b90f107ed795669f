#pragma once

#include "mcpsforge/ensembles.hpp"

namespace mcpsforge {

// Nested base predictor of a meta component, pulled out of its params.
struct BaseSpec {
    std::string method;
    ParamMap params;
};

// Fit result of one transition: the fitted state plus what leaves the
// transition in fit mode. Row-dropping components shrink the fit output;
// their predict-time apply() is the identity.
struct ComponentFit {
    FittedComponent fitted;
    Dataset fit_output;  // transforms only
};

inline ComponentFit fit_transform(const std::string& method, const ParamMap& params,
                                  const Dataset& data, std::uint64_t seed) {
    ComponentFit out;
    out.fitted.method = method;
    std::shared_ptr<const Transform> t;

    if (method == "none") {
        t = std::make_shared<IdentityTransform>();
        out.fit_output = data;
    } else if (method == "replace_constant") {
        t = std::make_shared<ImputeConstant>(data, param_or<std::string>(params, "strategy", "mean"));
        out.fit_output = t->apply(data);
    } else if (method == "iqr_remove") {
        auto iqr = std::make_shared<IqrRemove>(data, param_or<double>(params, "multiplier", 1.5));
        out.fit_output = iqr->fit_output(data);
        t = iqr;
    } else if (method == "center") {
        t = std::make_shared<AffineTransform>(data, AffineTransform::Kind::center);
        out.fit_output = t->apply(data);
    } else if (method == "standardize") {
        t = std::make_shared<AffineTransform>(data, AffineTransform::Kind::standardize);
        out.fit_output = t->apply(data);
    } else if (method == "normalize") {
        t = std::make_shared<AffineTransform>(data, AffineTransform::Kind::normalize,
                                              param_or<double>(params, "lo", 0.0),
                                              param_or<double>(params, "hi", 1.0));
        out.fit_output = t->apply(data);
    } else if (method == "random_subset") {
        auto rng = make_rng(seed, "random_subset");
        auto cols = random_column_subset(data.n_cols(),
                                         param_or<double>(params, "fraction", 0.5), rng);
        t = std::make_shared<SelectColumns>(data, cols, "random_subset");
        out.fit_output = t->apply(data);
    } else if (method == "pca") {
        t = std::make_shared<PcaTransform>(data, param_or<double>(params, "variance_kept", 0.95));
        out.fit_output = t->apply(data);
    } else if (method == "correlation_top_m") {
        auto cols = correlation_top_columns(data, param_or<long long>(params, "m", 10));
        t = std::make_shared<SelectColumns>(data, cols, "correlation_top_m");
        out.fit_output = t->apply(data);
    } else if (method == "resample") {
        auto rng = make_rng(seed, "resample");
        auto rows = resample_rows(data.n_rows, param_or<double>(params, "fraction", 0.8),
                                  param_or<bool>(params, "replace", false), rng);
        t = std::make_shared<IdentityTransform>();
        out.fit_output = data.subset_rows(rows);
    } else if (method == "periodic") {
        auto rows = periodic_rows(data.n_rows, param_or<long long>(params, "interval", 2));
        t = std::make_shared<IdentityTransform>();
        out.fit_output = data.subset_rows(rows);
    } else {
        throw ContractError("unknown transform: " + method);
    }
    out.fitted.transform = t;
    return out;
}

inline std::shared_ptr<const Predictor> fit_meta_predictor(const std::string& method,
                                                           const ParamMap& params,
                                                           const BaseSpec& base, const Dataset& data,
                                                           std::uint64_t seed) {
    if (method == "bagging")
        return std::make_shared<BaggingPredictor>(data, param_or<long long>(params, "n", 5),
                                                  param_or<double>(params, "fraction", 1.0),
                                                  base.method, base.params, seed);
    if (method == "adaboostm1")
        return std::make_shared<AdaBoostM1Predictor>(
            data, param_or<long long>(params, "rounds", 10),
            param_or<bool>(params, "resample", false), base.method, base.params, seed);
    if (method == "random_subspace")
        return std::make_shared<RandomSubspacePredictor>(
            data, param_or<long long>(params, "n", 5), param_or<double>(params, "fraction", 0.5),
            base.method, base.params, seed);
    throw ContractError("unknown meta predictor: " + method);
}

inline bool is_ensemble_method(const std::string& method) {
    return method == "bagging" || method == "adaboostm1" || method == "random_subspace";
}

inline bool is_predictor_method(const std::string& method) {
    const auto* c = find_method(method);
    return c != nullptr && c->stage == Stage::predictor;
}

inline bool is_transform_method(const std::string& method) {
    const auto* c = find_method(method);
    return c != nullptr && c->stage != Stage::predictor && c->stage != Stage::meta_predictor;
}

// Predict-mode application; preprocessors preserve rows one-to-one.
inline Dataset apply_transform(const FittedComponent& f, const Dataset& data) {
    if (!f.transform) throw ContractError(f.method + ": not a fitted transform");
    return f.transform->apply(data);
}

inline Predictions apply_predictor(const FittedComponent& f, const Dataset& data) {
    if (!f.predictor) throw ContractError(f.method + ": not a fitted predictor");
    return f.predictor->predict(data);
}

}  // namespace mcpsforge
