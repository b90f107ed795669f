#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <set>

#include <nlohmann/json.hpp>

#include "mcpsforge/components.hpp"

namespace mcpsforge {

// Structural transition methods used inside hierarchical nets: "fanout"
// copies a token to every output place, "collect" joins prediction tokens.
inline bool is_structural_method(const std::string& m) { return m == "fanout" || m == "collect"; }

enum class TransitionSemantics { and_sync, xor_choice };

struct McpsNet;

struct TransitionSpec {
    enum class Kind { atomic, subnet };
    Kind kind = Kind::atomic;
    std::string method;
    ParamMap hyperparameters;
    std::shared_ptr<const McpsNet> sub;  // subnet only
    TransitionSemantics semantics = TransitionSemantics::and_sync;
    std::optional<Stage> slot;  // chain position, set by instantiate
};

// A WA-WF Petri net: bipartite graph of places and transitions with a
// unique source and sink place. Transitions carry the bound method and
// hyperparameters; the net itself is an immutable value.
struct McpsNet {
    std::vector<std::string> places;
    std::map<std::string, TransitionSpec> transitions;  // id order fixes the firing scan
    std::vector<std::pair<std::string, std::string>> arcs;
    std::string source, sink;

    bool has_place(const std::string& id) const {
        return std::find(places.begin(), places.end(), id) != places.end();
    }
    bool has_transition(const std::string& id) const { return transitions.count(id) > 0; }

    McpsNet& add_place(std::string id) {
        places.push_back(std::move(id));
        return *this;
    }
    McpsNet& add_transition(std::string id, TransitionSpec spec) {
        transitions.emplace(std::move(id), std::move(spec));
        return *this;
    }
    McpsNet& add_atomic(std::string id, std::string method, ParamMap params = {}) {
        TransitionSpec t;
        t.kind = TransitionSpec::Kind::atomic;
        t.method = std::move(method);
        t.hyperparameters = std::move(params);
        return add_transition(std::move(id), std::move(t));
    }
    McpsNet& add_arc(std::string from, std::string to) {
        arcs.emplace_back(std::move(from), std::move(to));
        return *this;
    }

    std::vector<std::string> inputs_of(const std::string& node) const {
        std::vector<std::string> out;
        for (const auto& [from, to] : arcs)
            if (to == node) out.push_back(from);
        return out;
    }
    std::vector<std::string> outputs_of(const std::string& node) const {
        std::vector<std::string> out;
        for (const auto& [from, to] : arcs)
            if (from == node) out.push_back(to);
        return out;
    }
};

// Convenience builder: a linear chain i -> t1 -> p1 -> ... -> tn -> o.
inline McpsNet make_chain(const std::vector<std::pair<std::string, ParamMap>>& methods) {
    McpsNet net;
    net.source = "i";
    net.sink = "o";
    net.add_place("i");
    std::string prev = "i";
    for (std::size_t k = 0; k < methods.size(); ++k) {
        const std::string tid = "t" + std::to_string(k + 1);
        net.add_atomic(tid, methods[k].first, methods[k].second);
        net.add_arc(prev, tid);
        const std::string place = k + 1 == methods.size() ? "o" : "p" + std::to_string(k + 1);
        net.add_place(place);
        net.add_arc(tid, place);
        prev = place;
    }
    return net;
}

// Inner net of a meta-predictor transition: dummy fanout, `branches`
// copies of the base predictor on parallel paths, and a collect join.
// With one branch this is a plain chain.
inline McpsNet make_meta_subnet(const std::string& base_method, const ParamMap& base_params,
                                int branches = 1, const std::string& rule = "majority") {
    McpsNet sub;
    sub.source = "i";
    sub.sink = "o";
    sub.add_place("i").add_place("o");
    sub.add_atomic("t0_in", "fanout");
    sub.add_atomic("t2_out", "collect", {{"rule", rule}});
    sub.add_arc("i", "t0_in");
    for (int b = 0; b < std::max(branches, 1); ++b) {
        const std::string q = "q" + std::to_string(b), r = "r" + std::to_string(b);
        const std::string tid = "t1_base" + std::to_string(b);
        sub.add_place(q).add_place(r);
        sub.add_atomic(tid, base_method, base_params);
        sub.add_arc("t0_in", q).add_arc(q, tid).add_arc(tid, r).add_arc(r, "t2_out");
    }
    sub.add_arc("t2_out", "o");
    return sub;
}

inline TransitionSpec make_meta_transition(const std::string& meta_method, ParamMap meta_params,
                                           const std::string& base_method, ParamMap base_params) {
    const int branches = meta_method == "vote"
                             ? static_cast<int>(param_or<long long>(meta_params, "inputs", 1))
                             : 1;
    const auto rule = param_or<std::string>(meta_params, "rule", "majority");
    TransitionSpec t;
    t.kind = TransitionSpec::Kind::subnet;
    t.method = meta_method;
    t.hyperparameters = std::move(meta_params);
    t.sub = std::make_shared<const McpsNet>(
        make_meta_subnet(base_method, std::move(base_params), branches, rule));
    t.slot = Stage::meta_predictor;
    return t;
}

// ── Definition-1 validation ─────────────────────────────────────────

enum class Clause {
    workflow_net,
    well_handled,
    acyclicity,
    interior_place_arity,
    one_sound,
    safeness,
    and_semantics,
    token_typing,
    hierarchy,
};

inline const char* clause_name(Clause c) {
    switch (c) {
        case Clause::workflow_net: return "workflow_net";
        case Clause::well_handled: return "well_handled";
        case Clause::acyclicity: return "acyclicity";
        case Clause::interior_place_arity: return "interior_place_arity";
        case Clause::one_sound: return "one_sound";
        case Clause::safeness: return "safeness";
        case Clause::and_semantics: return "and_semantics";
        case Clause::token_typing: return "token_typing";
        case Clause::hierarchy: return "hierarchy";
    }
    return "?";
}

struct Violation {
    Clause clause;
    std::string node;
    std::string detail;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool valid() const { return violations.empty(); }
    bool has(Clause c) const {
        for (const auto& v : violations)
            if (v.clause == c) return true;
        return false;
    }
    std::string describe() const {
        std::string out;
        for (const auto& v : violations)
            out += std::string(clause_name(v.clause)) + " @ " + v.node + ": " + v.detail + "\n";
        return out;
    }
};

enum class PayloadKind { instances, predictions };

namespace detail {

// (input, output) payload kinds of a transition, by method; nullopt when
// the method is unknown.
inline std::optional<std::pair<PayloadKind, PayloadKind>> method_typing(const TransitionSpec& t) {
    if (t.method == "fanout") return {{PayloadKind::instances, PayloadKind::instances}};
    if (t.method == "collect") return {{PayloadKind::predictions, PayloadKind::predictions}};
    const auto* c = find_method(t.method);
    if (c == nullptr) return std::nullopt;
    if (c->stage == Stage::predictor || c->stage == Stage::meta_predictor)
        return {{PayloadKind::instances, PayloadKind::predictions}};
    return {{PayloadKind::instances, PayloadKind::instances}};
}

}  // namespace detail

inline ValidationReport validate(const McpsNet& net) {
    ValidationReport report;
    auto flag = [&](Clause c, const std::string& node, const std::string& detail) {
        report.violations.push_back({c, node, detail});
    };

    // parseability: arcs must reference known nodes of opposite kinds
    bool graph_sane = true;
    for (const auto& [from, to] : net.arcs) {
        const bool from_place = net.has_place(from), from_trans = net.has_transition(from);
        const bool to_place = net.has_place(to), to_trans = net.has_transition(to);
        if (!(from_place || from_trans) || !(to_place || to_trans)) {
            flag(Clause::workflow_net, from + "->" + to, "arc references an unknown node");
            graph_sane = false;
        } else if ((from_place && to_place) || (from_trans && to_trans)) {
            flag(Clause::workflow_net, from + "->" + to,
                 "arc must connect a place and a transition");
            graph_sane = false;
        }
    }
    if (!net.has_place(net.source)) {
        flag(Clause::workflow_net, net.source, "source is not a place of the net");
        graph_sane = false;
    }
    if (!net.has_place(net.sink)) {
        flag(Clause::workflow_net, net.sink, "sink is not a place of the net");
        graph_sane = false;
    }
    if (!graph_sane) return report;

    // clause: workflow net — unique source/sink, everything on a path
    if (!net.inputs_of(net.source).empty())
        flag(Clause::workflow_net, net.source, "source has incoming arcs");
    if (!net.outputs_of(net.sink).empty())
        flag(Clause::workflow_net, net.sink, "sink has outgoing arcs");
    for (const auto& p : net.places) {
        if (p != net.source && net.inputs_of(p).empty())
            flag(Clause::workflow_net, p, "place other than the source has no input");
        if (p != net.sink && net.outputs_of(p).empty())
            flag(Clause::workflow_net, p, "place other than the sink has no output");
    }
    {
        auto reach = [&](const std::string& start, bool forward) {
            std::set<std::string> seen{start};
            std::vector<std::string> stack{start};
            while (!stack.empty()) {
                auto node = stack.back();
                stack.pop_back();
                for (const auto& next : forward ? net.outputs_of(node) : net.inputs_of(node))
                    if (seen.insert(next).second) stack.push_back(next);
            }
            return seen;
        };
        auto fwd = reach(net.source, true), bwd = reach(net.sink, false);
        auto check_on_path = [&](const std::string& node) {
            if (!fwd.count(node) || !bwd.count(node))
                flag(Clause::workflow_net, node, "not on any path from source to sink");
        };
        for (const auto& p : net.places) check_on_path(p);
        for (const auto& [id, t] : net.transitions) check_on_path(id);
    }

    // clause: well-handled — one arc per place/transition pair
    {
        std::map<std::pair<std::string, std::string>, int> pair_count;
        for (const auto& [from, to] : net.arcs) {
            auto key = from < to ? std::make_pair(from, to) : std::make_pair(to, from);
            if (++pair_count[key] == 2)
                flag(Clause::well_handled, from + "<->" + to,
                     "more than one arc between this place/transition pair");
        }
    }

    // clause: acyclicity
    bool acyclic = true;
    {
        std::map<std::string, int> state;  // 0 unseen, 1 on stack, 2 done
        std::function<bool(const std::string&)> dfs = [&](const std::string& node) -> bool {
            state[node] = 1;
            for (const auto& next : net.outputs_of(node)) {
                if (state[next] == 1) {
                    flag(Clause::acyclicity, next, "lies on a cycle");
                    return false;
                }
                if (state[next] == 0 && !dfs(next)) return false;
            }
            state[node] = 2;
            return true;
        };
        for (const auto& p : net.places)
            if (state[p] == 0 && !dfs(p)) { acyclic = false; break; }
    }

    // clause: interior places have exactly one input and one output
    for (const auto& p : net.places) {
        if (p == net.source || p == net.sink) continue;
        const auto in = net.inputs_of(p).size(), out = net.outputs_of(p).size();
        if (in != 1)
            flag(Clause::interior_place_arity, p,
                 "interior place in-degree " + std::to_string(in) + ", expected 1");
        if (out != 1)
            flag(Clause::interior_place_arity, p,
                 "interior place out-degree " + std::to_string(out) + ", expected 1");
    }

    // clauses: 1-soundness and safeness, by playing the token game.
    // Transitions fire at most once; with AND-only semantics on an acyclic
    // net the run is confluent, so one deterministic run decides.
    if (acyclic) {
        std::map<std::string, int> marking;
        marking[net.source] = 1;
        std::set<std::string> fired;
        bool progress = true;
        bool unsafe_flagged = false;
        while (progress) {
            progress = false;
            for (const auto& [id, t] : net.transitions) {
                if (fired.count(id)) continue;
                const auto inputs = net.inputs_of(id);
                if (inputs.empty()) continue;
                bool enabled = true;
                for (const auto& p : inputs)
                    if (marking[p] < 1) { enabled = false; break; }
                if (!enabled) continue;
                for (const auto& p : inputs) marking[p] -= 1;
                for (const auto& p : net.outputs_of(id)) {
                    marking[p] += 1;
                    if (marking[p] > 1 && !unsafe_flagged) {
                        flag(Clause::safeness, p, "place holds more than one token");
                        unsafe_flagged = true;
                    }
                }
                fired.insert(id);
                progress = true;
                break;
            }
        }
        for (const auto& [p, count] : marking) {
            if (p == net.sink && count != 1)
                flag(Clause::one_sound, p, "sink ends with " + std::to_string(count) + " tokens");
            if (p != net.sink && count != 0)
                flag(Clause::one_sound, p,
                     "terminal marking leaves " + std::to_string(count) + " token(s) here");
        }
        for (const auto& [id, t] : net.transitions)
            if (!fired.count(id)) flag(Clause::one_sound, id, "transition can never fire");
    }

    // clause: multi-arc transitions are AND-join / AND-split
    for (const auto& [id, t] : net.transitions) {
        const auto in = net.inputs_of(id).size(), out = net.outputs_of(id).size();
        if ((in > 1 || out > 1) && t.semantics != TransitionSemantics::and_sync)
            flag(Clause::and_semantics, id,
                 "transition with multiple inputs or outputs must be AND-join/AND-split");
    }

    // clause: token typing — source holds instances, sink holds predictions
    if (acyclic) {
        std::map<std::string, PayloadKind> kind;
        kind[net.source] = PayloadKind::instances;
        bool progress = true;
        std::set<std::string> typed;
        while (progress) {
            progress = false;
            for (const auto& [id, t] : net.transitions) {
                if (typed.count(id)) continue;
                const auto inputs = net.inputs_of(id);
                bool ready = !inputs.empty();
                for (const auto& p : inputs)
                    if (!kind.count(p)) { ready = false; break; }
                if (!ready) continue;
                typed.insert(id);
                progress = true;
                std::pair<PayloadKind, PayloadKind> typing;
                if (t.kind == TransitionSpec::Kind::subnet) {
                    typing = {PayloadKind::instances, PayloadKind::predictions};
                } else {
                    auto mt = detail::method_typing(t);
                    if (!mt) {
                        flag(Clause::token_typing, id, "unknown method '" + t.method + "'");
                        for (const auto& p : net.outputs_of(id)) kind[p] = PayloadKind::instances;
                        continue;
                    }
                    typing = *mt;
                    if (t.method == "fanout")  // forwards whatever it receives
                        typing = {kind[inputs.front()], kind[inputs.front()]};
                }
                for (const auto& p : inputs)
                    if (kind[p] != typing.first)
                        flag(Clause::token_typing, id,
                             "expects " +
                                 std::string(typing.first == PayloadKind::instances ? "instances"
                                                                                    : "predictions") +
                                 " but place '" + p + "' carries the other kind");
                for (const auto& p : net.outputs_of(id)) kind[p] = typing.second;
            }
        }
        if (kind.count(net.sink) && kind[net.sink] != PayloadKind::predictions)
            flag(Clause::token_typing, net.sink, "sink token is not a set of predictions");
    }

    // clause: hierarchy — nested nets must themselves be valid
    for (const auto& [id, t] : net.transitions) {
        if (t.kind != TransitionSpec::Kind::subnet) continue;
        if (!t.sub) {
            flag(Clause::hierarchy, id, "subnet transition has no inner net");
            continue;
        }
        auto inner = validate(*t.sub);
        if (!inner.valid())
            flag(Clause::hierarchy, id,
                 "inner net invalid: " + std::string(clause_name(inner.violations[0].clause)) +
                     " @ " + inner.violations[0].node);
    }

    return report;
}

// ── flatten ─────────────────────────────────────────────────────────
//
// Linear method sequence from source to sink, recursing into subnets
// (the subnet's own label comes after its contents, so a meta-predictor
// wrapping a base predictor flattens to [base, meta]). Structural
// fanout/collect transitions are skipped; identical parallel branches
// created by fanout collapse to one copy. Genuinely diverging parallel
// paths have no position order and raise an analysis error.

inline std::vector<std::string> flatten(const McpsNet& net);

namespace detail {

inline void flatten_transition(const McpsNet& net, const std::string& tid,
                               std::vector<std::string>& out) {
    const auto& t = net.transitions.at(tid);
    if (t.kind == TransitionSpec::Kind::subnet) {
        if (!t.sub) throw AnalysisError("flatten: subnet transition '" + tid + "' has no inner net");
        auto inner = flatten(*t.sub);
        out.insert(out.end(), inner.begin(), inner.end());
        out.push_back(t.method);
    } else if (!is_structural_method(t.method)) {
        out.push_back(t.method);
    }
}

}  // namespace detail

inline std::vector<std::string> flatten(const McpsNet& net) {
    std::vector<std::string> out;
    std::string place = net.source;
    while (place != net.sink) {
        auto consumers = net.outputs_of(place);
        if (consumers.size() != 1)
            throw AnalysisError("flatten: place '" + place + "' has " +
                                std::to_string(consumers.size()) + " consumers, chain expected");
        const std::string tid = consumers.front();
        const auto& t = net.transitions.at(tid);
        auto outs = net.outputs_of(tid);
        if (outs.size() == 1) {
            detail::flatten_transition(net, tid, out);
            place = outs.front();
            continue;
        }
        // AND-split: only the structural fanout with identical
        // single-transition branches has a well-defined position
        if (t.method != "fanout")
            throw AnalysisError("flatten: parallel paths at transition '" + tid + "'");
        std::vector<std::string> branch_methods;
        std::string join_id;
        for (const auto& branch_place : outs) {
            auto branch_consumers = net.outputs_of(branch_place);
            if (branch_consumers.size() != 1)
                throw AnalysisError("flatten: branch place '" + branch_place + "' is not a chain");
            const auto& bt = branch_consumers.front();
            std::vector<std::string> seq;
            detail::flatten_transition(net, bt, seq);
            if (seq.size() != 1)
                throw AnalysisError("flatten: branch '" + bt + "' is not a single step");
            branch_methods.push_back(seq.front());
            auto after = net.outputs_of(bt);
            if (after.size() != 1)
                throw AnalysisError("flatten: branch '" + bt + "' splits again");
            auto joiners = net.outputs_of(after.front());
            if (joiners.size() != 1)
                throw AnalysisError("flatten: branch of '" + bt + "' does not rejoin");
            if (join_id.empty()) join_id = joiners.front();
            else if (join_id != joiners.front())
                throw AnalysisError("flatten: branches do not rejoin at one transition");
        }
        for (const auto& m : branch_methods)
            if (m != branch_methods.front())
                throw AnalysisError("flatten: parallel branches differ, positions undefined");
        out.push_back(branch_methods.front());
        auto after_join = net.outputs_of(join_id);
        if (after_join.size() != 1)
            throw AnalysisError("flatten: join '" + join_id + "' is not a chain");
        place = after_join.front();
    }
    return out;
}

// ── serialization ───────────────────────────────────────────────────

inline nlohmann::json params_to_json(const ParamMap& params) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : params) {
        if (std::holds_alternative<long long>(v)) j[k] = std::get<long long>(v);
        else if (std::holds_alternative<double>(v)) j[k] = std::get<double>(v);
        else j[k] = std::get<std::string>(v);
    }
    return j;
}

inline nlohmann::json net_to_json(const McpsNet& net) {
    nlohmann::json j;
    j["source"] = net.source;
    j["sink"] = net.sink;
    j["places"] = net.places;
    nlohmann::json ts = nlohmann::json::object();
    for (const auto& [id, t] : net.transitions) {
        nlohmann::json tj;
        tj["kind"] = t.kind == TransitionSpec::Kind::subnet ? "subnet" : "atomic";
        tj["method"] = t.method;
        tj["hyperparameters"] = params_to_json(t.hyperparameters);
        if (t.slot) tj["slot"] = stage_name(*t.slot);
        if (t.sub) tj["sub"] = net_to_json(*t.sub);
        ts[id] = tj;
    }
    j["transitions"] = ts;
    nlohmann::json as = nlohmann::json::array();
    for (const auto& [from, to] : net.arcs) as.push_back({from, to});
    j["arcs"] = as;
    return j;
}

inline void net_to_dot(const McpsNet& net, std::string& out, const std::string& prefix = "") {
    auto q = [&](const std::string& id) { return '"' + prefix + id + '"'; };
    for (const auto& p : net.places)
        out += "  " + q(p) + " [shape=circle,label=\"" + p + "\"];\n";
    for (const auto& [id, t] : net.transitions) {
        if (t.sub) {
            out += "  subgraph \"cluster_" + prefix + id + "\" {\n    label=\"" + t.method + "\";\n";
            net_to_dot(*t.sub, out, prefix + id + "/");
            out += "  }\n";
            out += "  " + q(id) + " [shape=point,style=invis];\n";
        } else {
            out += "  " + q(id) + " [shape=box,label=\"" + t.method + "\"];\n";
        }
    }
    for (const auto& [from, to] : net.arcs) out += "  " + q(from) + " -> " + q(to) + ";\n";
}

inline std::string to_dot(const McpsNet& net) {
    std::string out = "digraph mcps {\n  rankdir=LR;\n";
    net_to_dot(net, out);
    out += "}\n";
    return out;
}

}  // namespace mcpsforge
