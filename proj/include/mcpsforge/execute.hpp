#pragma once

#include <chrono>

#include "mcpsforge/component_ops.hpp"
#include "mcpsforge/petri.hpp"

namespace mcpsforge {

enum class ExecMode { fit, predict };

struct Token {
    PayloadKind kind = PayloadKind::instances;
    Dataset table;        // instances
    Predictions preds;    // predictions
    std::string provenance;  // transition that produced it

    static Token instances(Dataset d) {
        Token t;
        t.kind = PayloadKind::instances;
        d.touch(d.n_rows);
        t.table = std::move(d);
        return t;
    }
    static Token predictions(Predictions p, std::string from) {
        Token t;
        t.kind = PayloadKind::predictions;
        t.preds = std::move(p);
        t.provenance = std::move(from);
        return t;
    }

    std::size_t approx_bytes() const {
        if (kind == PayloadKind::instances)
            return table.cells.size() * sizeof(double) + table.missing.size();
        return preds.labels.size() * sizeof(int) + preds.proba.size() * sizeof(double);
    }
};

// Learned per-transition state, keyed by the transition's path inside the
// (possibly hierarchical) net. Nets stay immutable; fitting never mutates
// the net itself.
struct FittedState {
    std::map<std::string, FittedComponent> by_path;
};

struct ExecLimits {
    std::optional<std::chrono::steady_clock::time_point> deadline;
    std::size_t memory_limit_bytes = 0;  // 0 = unbounded; advisory estimate

    void check_deadline() const {
        if (deadline && std::chrono::steady_clock::now() > *deadline) throw TimeoutSignal{};
    }
};

namespace detail {

inline void check_memory(const std::map<std::string, Token>& marking, const ExecLimits& limits) {
    if (limits.memory_limit_bytes == 0) return;
    std::size_t total = 0;
    for (const auto& [p, tok] : marking) total += tok.approx_bytes();
    if (total > limits.memory_limit_bytes) throw ResourceSignal{total};
}

inline const TransitionSpec* find_base_predictor(const McpsNet& sub) {
    for (const auto& [id, t] : sub.transitions) {
        if (t.kind != TransitionSpec::Kind::atomic) continue;
        const auto* c = find_method(t.method);
        if (c != nullptr && c->stage == Stage::predictor) return &t;
    }
    return nullptr;
}

}  // namespace detail

inline Token execute(const McpsNet& net, Token input, ExecMode mode, FittedState& state,
                     std::uint64_t seed, const ExecLimits& limits = {},
                     const std::string& path_prefix = "");

namespace detail {

inline Token fire_transition(const std::string& path, const TransitionSpec& t,
                             std::vector<Token> inputs, ExecMode mode, FittedState& state,
                             std::uint64_t seed, const ExecLimits& limits) {
    const std::uint64_t t_seed = mix_seed(seed, path);
    try {
        // structural transitions
        if (t.method == "fanout") return std::move(inputs.front());
        if (t.method == "collect") {
            std::vector<Predictions> preds;
            for (auto& tok : inputs) {
                if (tok.kind != PayloadKind::predictions)
                    throw ExecError(path + ": collect expects prediction tokens");
                preds.push_back(std::move(tok.preds));
            }
            return Token::predictions(
                combine_votes(preds, param_or<std::string>(t.hyperparameters, "rule", "majority")),
                path);
        }

        // hierarchical transitions
        if (t.kind == TransitionSpec::Kind::subnet) {
            if (!t.sub) throw ExecError(path + ": subnet transition has no inner net");
            if (is_ensemble_method(t.method)) {
                // ensemble logic runs the inner base predictor itself
                if (inputs.front().kind != PayloadKind::instances)
                    throw ExecError(path + ": ensemble expects an instance token");
                const Dataset& data = inputs.front().table;
                if (mode == ExecMode::fit) {
                    const auto* base = find_base_predictor(*t.sub);
                    if (base == nullptr)
                        throw ExecError(path + ": ensemble subnet has no base predictor");
                    FittedComponent fc;
                    fc.method = t.method;
                    fc.predictor = fit_meta_predictor(t.method, t.hyperparameters,
                                                      {base->method, base->hyperparameters}, data,
                                                      t_seed);
                    state.by_path[path] = fc;
                    return Token::predictions(fc.predictor->predict(data), path);
                }
                auto it = state.by_path.find(path);
                if (it == state.by_path.end())
                    throw ExecError(path + ": no fitted state for this transition");
                return Token::predictions(apply_predictor(it->second, data), path);
            }
            return execute(*t.sub, std::move(inputs.front()), mode, state, seed, limits,
                           path + "/");
        }

        // atomic transitions
        if (inputs.front().kind != PayloadKind::instances)
            throw ExecError(path + ": '" + t.method + "' expects an instance token");
        const Dataset& data = inputs.front().table;

        if (is_predictor_method(t.method)) {
            if (mode == ExecMode::fit) {
                FittedComponent fc;
                fc.method = t.method;
                fc.predictor = fit_atomic_predictor(t.method, t.hyperparameters, data, t_seed);
                state.by_path[path] = fc;
                return Token::predictions(fc.predictor->predict(data), path);
            }
            auto it = state.by_path.find(path);
            if (it == state.by_path.end())
                throw ExecError(path + ": no fitted state for this transition");
            return Token::predictions(apply_predictor(it->second, data), path);
        }

        if (is_transform_method(t.method) || t.method == "none") {
            if (mode == ExecMode::fit) {
                auto fit = fit_transform(t.method, t.hyperparameters, data, t_seed);
                state.by_path[path] = fit.fitted;
                Token out = Token::instances(std::move(fit.fit_output));
                out.provenance = path;
                return out;
            }
            auto it = state.by_path.find(path);
            if (it == state.by_path.end())
                throw ExecError(path + ": no fitted state for this transition");
            Token out = Token::instances(apply_transform(it->second, data));
            out.provenance = path;
            return out;
        }

        throw ExecError(path + ": unknown method '" + t.method + "'");
    } catch (const ContractError& e) {
        throw ExecError("transition '" + path + "' failed: " + e.what());
    }
}

}  // namespace detail

// Token-game execution. Transitions fire when every input place holds a
// token (AND-join); outputs are copied to every output place (AND-split).
// Enabled transitions fire in lexicographic id order, which on these nets
// is just a fixed topological order.
inline Token execute(const McpsNet& net, Token input, ExecMode mode, FittedState& state,
                     std::uint64_t seed, const ExecLimits& limits,
                     const std::string& path_prefix) {
    std::map<std::string, Token> marking;
    marking.emplace(net.source, std::move(input));
    std::set<std::string> fired;

    bool progress = true;
    while (progress) {
        progress = false;
        for (const auto& [id, t] : net.transitions) {
            if (fired.count(id)) continue;
            const auto input_places = net.inputs_of(id);
            if (input_places.empty()) continue;
            bool enabled = true;
            for (const auto& p : input_places)
                if (!marking.count(p)) { enabled = false; break; }
            if (!enabled) continue;

            limits.check_deadline();
            std::vector<Token> tokens;
            tokens.reserve(input_places.size());
            auto sorted_inputs = input_places;
            std::sort(sorted_inputs.begin(), sorted_inputs.end());
            for (const auto& p : sorted_inputs) {
                tokens.push_back(std::move(marking.at(p)));
                marking.erase(p);
            }
            Token out = detail::fire_transition(path_prefix + id, t, std::move(tokens), mode,
                                                state, seed, limits);
            for (const auto& p : net.outputs_of(id)) {
                if (marking.count(p))
                    throw ExecError("safeness violated: place '" + p + "' already holds a token");
                marking.emplace(p, out);
            }
            fired.insert(id);
            detail::check_memory(marking, limits);
            progress = true;
            break;
        }
    }

    if (marking.size() != 1 || !marking.count(net.sink))
        throw ExecError("execution did not end with a single token at the sink");
    return std::move(marking.at(net.sink));
}

// fit + predict convenience wrappers used by the evaluator

inline std::pair<Predictions, FittedState> fit_net(const McpsNet& net, const Dataset& train,
                                                   std::uint64_t seed,
                                                   const ExecLimits& limits = {}) {
    FittedState state;
    auto out = execute(net, Token::instances(train), ExecMode::fit, state, seed, limits);
    Predictions preds;
    if (out.kind == PayloadKind::predictions) preds = std::move(out.preds);
    return {std::move(preds), std::move(state)};
}

inline Predictions predict_net(const McpsNet& net, const Dataset& data, const FittedState& state,
                               std::uint64_t seed, const ExecLimits& limits = {}) {
    FittedState mutable_view = state;  // lookups only; fitted parts are shared pointers
    auto out = execute(net, Token::instances(data), ExecMode::predict, mutable_view, seed, limits);
    if (out.kind != PayloadKind::predictions)
        throw ExecError("net does not end in a predictor; sink holds transformed data");
    return std::move(out.preds);
}

}  // namespace mcpsforge
