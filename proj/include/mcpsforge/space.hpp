#pragma once

#include "mcpsforge/petri.hpp"

namespace mcpsforge {

// One hyperparameter in a search space: a descriptor plus the categorical
// choices that must hold for it to be active. Slot choices themselves are
// condition-free categorical nodes.
struct ParamNode {
    std::string path;
    ParamDescriptor desc;
    std::vector<std::pair<std::string, std::string>> conditions;  // (categorical path, value)
};

struct SearchSpace {
    std::string name;            // "new" | "full"
    std::vector<Stage> slots;    // ordered stage slots
    std::vector<ParamNode> nodes;  // parents always precede dependents

    const ParamNode* node(const std::string& path) const {
        for (const auto& n : nodes)
            if (n.path == path) return &n;
        return nullptr;
    }
};

// A concrete assignment: exactly the parameters active under its own
// categorical choices, nothing else.
struct Configuration {
    std::string space;
    std::map<std::string, Value> assignments;
    std::string lineage;  // where it came from: sample:<seed>, tpe, smac, neighbor

    bool operator==(const Configuration& other) const {
        return space == other.space && assignments == other.assignments;
    }
};

namespace detail {

// The complex base-predictor parameter of a meta component is not given
// its own parameter tree: the predictor slot is that tree, expanded once,
// and instantiate wires it in as the meta's base. That keeps every
// parameter reachable through a single activation path.
inline void add_component_params(SearchSpace& space, const std::string& prefix,
                                 const ComponentDescriptor& comp,
                                 const std::vector<std::pair<std::string, std::string>>& conditions) {
    for (const auto& p : comp.params) {
        if (p.kind == ParamKind::categorical_complex) continue;
        ParamNode node;
        node.path = prefix + "." + p.name;
        node.desc = p;
        node.conditions = conditions;
        space.nodes.push_back(node);
    }
}

}  // namespace detail

// NEW: predictor + meta-predictor only. FULL: the fixed chain of five
// preprocessing slots, a predictor and a meta-predictor.
inline SearchSpace build_space(const std::string& name) {
    SearchSpace space;
    space.name = name;
    if (name == "full") {
        space.slots = {Stage::missing_values, Stage::outliers,  Stage::transformation,
                       Stage::dim_reduction,  Stage::sampling,  Stage::predictor,
                       Stage::meta_predictor};
    } else if (name == "new") {
        space.slots = {Stage::predictor, Stage::meta_predictor};
    } else {
        throw Error("unknown search space '" + name + "' (expected 'new' or 'full')");
    }
    for (Stage stage : space.slots) {
        ParamNode slot;
        slot.path = stage_name(stage);
        slot.desc.name = slot.path;
        slot.desc.kind = ParamKind::categorical_simple;
        for (const auto* c : components_of_stage(stage)) slot.desc.values.push_back(c->id);
        slot.desc.def = slot.desc.values.front();
        space.nodes.push_back(slot);
        for (const auto* c : components_of_stage(stage)) {
            if (c->params.empty()) continue;
            detail::add_component_params(space, slot.path + "." + c->id, *c,
                                         {{slot.path, c->id}});
        }
    }
    return space;
}

inline const SearchSpace& space_by_name(const std::string& name) {
    static const SearchSpace full = build_space("full");
    static const SearchSpace brief = build_space("new");
    if (name == "full") return full;
    if (name == "new") return brief;
    throw Error("unknown search space '" + name + "'");
}

// ── activation bookkeeping ──────────────────────────────────────────

inline bool conditions_hold(const ParamNode& node, const std::map<std::string, Value>& assigned) {
    for (const auto& [path, value] : node.conditions) {
        auto it = assigned.find(path);
        if (it == assigned.end() || !std::holds_alternative<std::string>(it->second) ||
            std::get<std::string>(it->second) != value)
            return false;
    }
    return true;
}

inline std::vector<const ParamNode*> active_nodes(const SearchSpace& space,
                                                  const std::map<std::string, Value>& assigned) {
    std::vector<const ParamNode*> out;
    for (const auto& n : space.nodes)
        if (conditions_hold(n, assigned)) out.push_back(&n);
    return out;
}

inline Value default_value(const ParamDescriptor& d) {
    return d.def;
}

// Drops inactive assignments and fills newly active parameters with their
// defaults; categorical choices drive activation, so they are kept as-is.
inline Configuration canonicalize(const SearchSpace& space, Configuration cfg) {
    std::map<std::string, Value> out;
    for (const auto& n : space.nodes) {
        if (!conditions_hold(n, out)) continue;
        auto it = cfg.assignments.find(n.path);
        out[n.path] = it != cfg.assignments.end() ? it->second : default_value(n.desc);
    }
    cfg.assignments = std::move(out);
    return cfg;
}

inline void check_valid(const SearchSpace& space, const Configuration& cfg) {
    std::map<std::string, Value> seen;
    std::size_t active_count = 0;
    for (const auto& n : space.nodes) {
        if (!conditions_hold(n, seen)) continue;
        ++active_count;
        auto it = cfg.assignments.find(n.path);
        if (it == cfg.assignments.end())
            throw Error("configuration misses active parameter '" + n.path + "'");
        seen[n.path] = it->second;
        switch (n.desc.kind) {
            case ParamKind::continuous: {
                const double v = as_double(it->second);
                if (v < n.desc.lo - 1e-12 || v > n.desc.hi + 1e-12)
                    throw Error("parameter '" + n.path + "' out of range");
                break;
            }
            case ParamKind::integer: {
                const auto v = static_cast<double>(as_int(it->second));
                if (v < n.desc.lo || v > n.desc.hi)
                    throw Error("parameter '" + n.path + "' out of range");
                break;
            }
            default: {
                const auto& v = as_str(it->second);
                if (std::find(n.desc.values.begin(), n.desc.values.end(), v) ==
                    n.desc.values.end())
                    throw Error("parameter '" + n.path + "' has unknown value '" + v + "'");
            }
        }
    }
    if (active_count != cfg.assignments.size())
        throw Error("configuration carries inactive assignments");
}

// ── sampling ────────────────────────────────────────────────────────

inline Value sample_param(const ParamDescriptor& d, Rng& rng) {
    switch (d.kind) {
        case ParamKind::continuous: {
            if (d.log_scale) {
                std::uniform_real_distribution<double> u(std::log(d.lo), std::log(d.hi));
                return std::exp(u(rng));
            }
            std::uniform_real_distribution<double> u(d.lo, d.hi);
            return u(rng);
        }
        case ParamKind::integer: {
            std::uniform_int_distribution<long long> u(static_cast<long long>(d.lo),
                                                       static_cast<long long>(d.hi));
            return u(rng);
        }
        default: {
            std::uniform_int_distribution<std::size_t> u(0, d.values.size() - 1);
            return d.values[u(rng)];
        }
    }
}

inline Configuration sample_config(const SearchSpace& space, Rng& rng) {
    Configuration cfg;
    cfg.space = space.name;
    for (const auto& n : space.nodes)
        if (conditions_hold(n, cfg.assignments)) cfg.assignments[n.path] = sample_param(n.desc, rng);
    return cfg;
}

inline Configuration sample_config(const SearchSpace& space, std::uint64_t seed) {
    auto rng = make_rng(seed, "sample");
    auto cfg = sample_config(space, rng);
    cfg.lineage = "sample:" + std::to_string(seed);
    return cfg;
}

// ── one-change neighbourhood ────────────────────────────────────────
//
// Every categorical flips to each alternative (newly activated parameters
// take defaults); every numeric gets one Gaussian step with sigma at 20%
// of its range, log-scale parameters stepping in log space.

inline std::vector<Configuration> neighbors(const SearchSpace& space, const Configuration& cfg,
                                            Rng& rng) {
    std::vector<Configuration> out;
    for (const auto& [path, value] : cfg.assignments) {
        const auto* node = space.node(path);
        if (node == nullptr) continue;
        switch (node->desc.kind) {
            case ParamKind::continuous: {
                const double lo = node->desc.log_scale ? std::log(node->desc.lo) : node->desc.lo;
                const double hi = node->desc.log_scale ? std::log(node->desc.hi) : node->desc.hi;
                double v = as_double(value);
                if (node->desc.log_scale) v = std::log(v);
                std::normal_distribution<double> step(0.0, 0.2 * (hi - lo));
                double moved = std::clamp(v + step(rng), lo, hi);
                Configuration n = cfg;
                n.assignments[path] = node->desc.log_scale ? std::exp(moved) : moved;
                n.lineage = "neighbor";
                out.push_back(std::move(n));
                break;
            }
            case ParamKind::integer: {
                const auto lo = static_cast<long long>(node->desc.lo);
                const auto hi = static_cast<long long>(node->desc.hi);
                const long long v = as_int(value);
                std::normal_distribution<double> step(0.0, 0.2 * static_cast<double>(hi - lo));
                long long moved =
                    std::clamp(v + static_cast<long long>(std::llround(step(rng))), lo, hi);
                if (moved == v) moved = v < hi ? v + 1 : v - 1;
                if (moved < lo || moved > hi) break;  // single-point range: no neighbour
                Configuration n = cfg;
                n.assignments[path] = moved;
                n.lineage = "neighbor";
                out.push_back(std::move(n));
                break;
            }
            default: {
                for (const auto& alt : node->desc.values) {
                    if (alt == as_str(value)) continue;
                    Configuration n = cfg;
                    n.assignments[path] = alt;
                    n = canonicalize(space, std::move(n));
                    n.lineage = "neighbor";
                    out.push_back(std::move(n));
                }
            }
        }
    }
    return out;
}

// ── net instantiation ───────────────────────────────────────────────

namespace detail {

inline ParamMap params_under(const Configuration& cfg, const std::string& prefix) {
    ParamMap out;
    for (const auto& [path, value] : cfg.assignments) {
        if (path.size() <= prefix.size() || path.compare(0, prefix.size(), prefix) != 0) continue;
        std::string rest = path.substr(prefix.size() + 1);
        if (rest.find('.') != std::string::npos) continue;  // deeper nesting handled separately
        out[rest] = value;
    }
    return out;
}

}  // namespace detail

inline int slot_index(Stage stage) {
    for (std::size_t i = 0; i < std::size(kStageOrder); ++i)
        if (kStageOrder[i] == stage) return static_cast<int>(i);
    return -1;
}

// Builds the linear WA-WF net for a configuration. Stages choosing "none"
// contribute no transition; the meta-predictor becomes a subnet transition
// wrapping its base predictor.
inline McpsNet instantiate(const Configuration& cfg) {
    const auto& space = space_by_name(cfg.space);
    check_valid(space, cfg);

    McpsNet net;
    net.source = "i";
    net.sink = "o";
    net.add_place("i");
    std::string prev = "i";
    std::vector<std::pair<std::string, TransitionSpec>> chain;

    const auto& predictor_method = as_str(cfg.assignments.at(stage_name(Stage::predictor)));
    const auto& meta_method = as_str(cfg.assignments.at(stage_name(Stage::meta_predictor)));

    for (std::size_t s = 0; s < space.slots.size(); ++s) {
        const Stage stage = space.slots[s];
        const std::string slot_path = stage_name(stage);
        const auto& choice = as_str(cfg.assignments.at(slot_path));
        if (choice == "none") continue;
        const std::string tid = "t" + std::to_string(slot_index(stage) + 1) + "_" + slot_path;
        if (stage == Stage::predictor) {
            if (meta_method != "none") continue;  // predictor nests inside the meta subnet
            TransitionSpec t;
            t.kind = TransitionSpec::Kind::atomic;
            t.method = choice;
            t.hyperparameters = detail::params_under(cfg, slot_path + "." + choice);
            t.slot = stage;
            chain.emplace_back(tid, std::move(t));
        } else if (stage == Stage::meta_predictor) {
            auto base_params =
                detail::params_under(cfg, std::string(stage_name(Stage::predictor)) + "." +
                                              predictor_method);
            auto meta_params = detail::params_under(cfg, slot_path + "." + choice);
            chain.emplace_back(tid, make_meta_transition(choice, std::move(meta_params),
                                                         predictor_method,
                                                         std::move(base_params)));
        } else {
            TransitionSpec t;
            t.kind = TransitionSpec::Kind::atomic;
            t.method = choice;
            t.hyperparameters = detail::params_under(cfg, slot_path + "." + choice);
            t.slot = stage;
            chain.emplace_back(tid, std::move(t));
        }
    }

    for (std::size_t k = 0; k < chain.size(); ++k) {
        net.add_transition(chain[k].first, chain[k].second);
        net.add_arc(prev, chain[k].first);
        const std::string place = k + 1 == chain.size() ? "o" : "p" + std::to_string(k + 1);
        net.add_place(place);
        net.add_arc(chain[k].first, place);
        prev = place;
    }
    return net;
}

// Recovers the configuration of a net built by instantiate.
inline Configuration encode(const McpsNet& net, const SearchSpace& space) {
    Configuration cfg;
    cfg.space = space.name;
    cfg.lineage = "encode";
    for (Stage stage : space.slots) cfg.assignments[stage_name(stage)] = std::string("none");
    for (const auto& [tid, t] : net.transitions) {
        if (!t.slot) throw AnalysisError("encode: transition '" + tid + "' carries no slot tag");
        const std::string slot_path = stage_name(*t.slot);
        cfg.assignments[slot_path] = t.method;
        if (*t.slot == Stage::meta_predictor) {
            if (!t.sub) throw AnalysisError("encode: meta transition without subnet");
            const TransitionSpec* base = nullptr;
            for (const auto& [bid, bt] : t.sub->transitions)
                if (!is_structural_method(bt.method)) base = &bt;
            if (base == nullptr) throw AnalysisError("encode: meta subnet has no base predictor");
            const std::string meta_prefix = slot_path + "." + t.method;
            for (const auto& [k, v] : t.hyperparameters) cfg.assignments[meta_prefix + "." + k] = v;
            const std::string pred_slot = stage_name(Stage::predictor);
            cfg.assignments[pred_slot] = base->method;
            for (const auto& [k, v] : base->hyperparameters)
                cfg.assignments[pred_slot + "." + base->method + "." + k] = v;
        } else {
            for (const auto& [k, v] : t.hyperparameters)
                cfg.assignments[slot_path + "." + t.method + "." + k] = v;
        }
    }
    check_valid(space, cfg);
    return cfg;
}

// Method id per slot, "none" included: the position-aligned sequence the
// weighted Hamming similarity works over.
inline std::vector<std::string> slot_sequence(const Configuration& cfg) {
    const auto& space = space_by_name(cfg.space);
    std::vector<std::string> out;
    out.reserve(space.slots.size());
    for (Stage stage : space.slots) out.push_back(as_str(cfg.assignments.at(stage_name(stage))));
    return out;
}

// ── serialization ───────────────────────────────────────────────────

inline nlohmann::json config_to_json(const Configuration& cfg) {
    nlohmann::json j;
    j["space"] = cfg.space;
    j["lineage"] = cfg.lineage;
    j["assignments"] = params_to_json(cfg.assignments);
    return j;
}

inline Configuration config_from_json(const nlohmann::json& j) {
    Configuration cfg;
    cfg.space = j.at("space").get<std::string>();
    cfg.lineage = j.value("lineage", "");
    for (const auto& [k, v] : j.at("assignments").items()) {
        if (v.is_number_integer()) cfg.assignments[k] = v.get<long long>();
        else if (v.is_number_float()) cfg.assignments[k] = v.get<double>();
        else cfg.assignments[k] = v.get<std::string>();
    }
    return cfg;
}

// flat key=value text, stable ordering; embedded in run logs and reports
inline std::string config_to_text(const Configuration& cfg) {
    std::string out;
    for (const auto& [k, v] : cfg.assignments) out += k + "=" + value_to_text(v) + "\n";
    return out;
}

}  // namespace mcpsforge
