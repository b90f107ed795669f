#pragma once

#include "mcpsforge/core.hpp"

namespace mcpsforge {

// Pipeline stages in the fixed chain order used by the FULL space.
enum class Stage {
    missing_values,
    outliers,
    transformation,
    dim_reduction,
    sampling,
    predictor,
    meta_predictor,
};

inline const char* stage_name(Stage s) {
    switch (s) {
        case Stage::missing_values: return "missing_values";
        case Stage::outliers: return "outliers";
        case Stage::transformation: return "transformation";
        case Stage::dim_reduction: return "dim_reduction";
        case Stage::sampling: return "sampling";
        case Stage::predictor: return "predictor";
        case Stage::meta_predictor: return "meta_predictor";
    }
    return "?";
}

inline constexpr Stage kStageOrder[] = {
    Stage::missing_values, Stage::outliers,  Stage::transformation, Stage::dim_reduction,
    Stage::sampling,       Stage::predictor, Stage::meta_predictor,
};

enum class ParamKind { continuous, integer, categorical_simple, categorical_complex };

struct ParamDescriptor {
    std::string name;
    ParamKind kind = ParamKind::continuous;
    double lo = 0.0, hi = 0.0;          // continuous / integer bounds (inclusive)
    bool log_scale = false;             // continuous only
    std::vector<std::string> values;    // categorical_simple
    Stage component_stage = Stage::predictor;  // categorical_complex: stage it ranges over
    Value def;

    static ParamDescriptor real(std::string n, double lo, double hi, double def,
                                bool log_scale = false) {
        ParamDescriptor p;
        p.name = std::move(n);
        p.kind = ParamKind::continuous;
        p.lo = lo;
        p.hi = hi;
        p.log_scale = log_scale;
        p.def = def;
        return p;
    }
    static ParamDescriptor integer(std::string n, long long lo, long long hi, long long def) {
        ParamDescriptor p;
        p.name = std::move(n);
        p.kind = ParamKind::integer;
        p.lo = static_cast<double>(lo);
        p.hi = static_cast<double>(hi);
        p.def = def;
        return p;
    }
    static ParamDescriptor categorical(std::string n, std::vector<std::string> vals,
                                       std::string def) {
        ParamDescriptor p;
        p.name = std::move(n);
        p.kind = ParamKind::categorical_simple;
        p.values = std::move(vals);
        p.def = std::move(def);
        return p;
    }
    static ParamDescriptor component(std::string n, Stage stage) {
        ParamDescriptor p;
        p.name = std::move(n);
        p.kind = ParamKind::categorical_complex;
        p.component_stage = stage;
        p.def = std::string();
        return p;
    }
};

struct ComponentDescriptor {
    std::string id;
    Stage stage = Stage::predictor;
    std::vector<ParamDescriptor> params;
    int arity_in = 1;
    int arity_out = 1;

    const ParamDescriptor* param(const std::string& name) const {
        for (const auto& p : params)
            if (p.name == name) return &p;
        return nullptr;
    }
};

// The fixed component roster. Stage rosters mirror the shape of the
// preprocessing/predictor/meta tables this searches over, at desk scale:
// each preprocessing stage keeps its "none" choice, every meta-predictor
// takes exactly one nested base predictor.
inline const std::vector<ComponentDescriptor>& registry() {
    static const std::vector<ComponentDescriptor> reg = [] {
        using PD = ParamDescriptor;
        std::vector<ComponentDescriptor> r;
        auto add = [&](std::string id, Stage st, std::vector<PD> params) {
            r.push_back({std::move(id), st, std::move(params), 1, 1});
        };

        add("none", Stage::missing_values, {});
        add("replace_constant", Stage::missing_values,
            {PD::categorical("strategy", {"zero", "mean", "median", "min", "max"}, "mean")});

        add("none", Stage::outliers, {});
        add("iqr_remove", Stage::outliers, {PD::real("multiplier", 1.5, 3.0, 1.5)});

        add("none", Stage::transformation, {});
        add("center", Stage::transformation, {});
        add("standardize", Stage::transformation, {});
        add("normalize", Stage::transformation,
            {PD::real("lo", -1.0, 0.0, 0.0), PD::real("hi", 0.5, 2.0, 1.0)});

        add("none", Stage::dim_reduction, {});
        add("random_subset", Stage::dim_reduction, {PD::real("fraction", 0.05, 1.0, 0.5)});
        add("pca", Stage::dim_reduction, {PD::real("variance_kept", 0.5, 1.0, 0.95)});
        add("correlation_top_m", Stage::dim_reduction, {PD::integer("m", 1, 64, 10)});

        add("none", Stage::sampling, {});
        add("resample", Stage::sampling,
            {PD::real("fraction", 0.1, 1.0, 0.8),
             PD::categorical("replace", {"false", "true"}, "false")});
        add("periodic", Stage::sampling, {PD::integer("interval", 2, 10, 2)});

        add("zeror", Stage::predictor, {});
        add("oner", Stage::predictor, {PD::integer("bins", 2, 16, 6)});
        add("decision_stump", Stage::predictor, {});
        add("knn", Stage::predictor,
            {PD::integer("k", 1, 25, 5), PD::categorical("weighted", {"false", "true"}, "false")});
        add("naive_bayes", Stage::predictor, {PD::real("smoothing", 1e-9, 1.0, 1e-6, true)});
        add("logistic", Stage::predictor,
            {PD::real("l2", 1e-6, 10.0, 1e-3, true), PD::integer("epochs", 10, 200, 50),
             PD::real("rate", 1e-3, 1.0, 0.1, true)});
        add("tree", Stage::predictor,
            {PD::integer("max_depth", 1, 12, 6), PD::integer("min_leaf", 1, 20, 2)});

        add("none", Stage::meta_predictor, {});
        add("bagging", Stage::meta_predictor,
            {PD::integer("n", 1, 12, 5), PD::real("fraction", 0.1, 1.0, 1.0),
             PD::component("base", Stage::predictor)});
        add("adaboostm1", Stage::meta_predictor,
            {PD::integer("rounds", 1, 20, 10),
             PD::categorical("resample", {"false", "true"}, "false"),
             PD::component("base", Stage::predictor)});
        add("random_subspace", Stage::meta_predictor,
            {PD::integer("n", 1, 12, 5), PD::real("fraction", 0.1, 1.0, 0.5),
             PD::component("base", Stage::predictor)});
        add("vote", Stage::meta_predictor,
            {PD::integer("inputs", 1, 5, 3),
             PD::categorical("rule", {"majority", "average"}, "majority"),
             PD::component("base", Stage::predictor)});
        return r;
    }();
    return reg;
}

inline std::vector<const ComponentDescriptor*> components_of_stage(Stage st) {
    std::vector<const ComponentDescriptor*> out;
    for (const auto& c : registry())
        if (c.stage == st) out.push_back(&c);
    return out;
}

inline const ComponentDescriptor* find_component(Stage st, const std::string& id) {
    for (const auto& c : registry())
        if (c.stage == st && c.id == id) return &c;
    return nullptr;
}

// Method ids are unique outside the shared per-stage "none", so a bare id
// still resolves a stage for non-none methods.
inline const ComponentDescriptor* find_method(const std::string& id) {
    for (const auto& c : registry())
        if (c.id == id) return &c;
    return nullptr;
}

}  // namespace mcpsforge
