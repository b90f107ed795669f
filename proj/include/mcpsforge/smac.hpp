#pragma once

#include "mcpsforge/tpe.hpp"

namespace mcpsforge {

// Fixed-width numeric encoding of configurations for the forest: one
// dimension per parameter path. Numerics normalize to [0,1] (log scale
// respected); categoricals carry their value index. Inactive parameters
// take a sentinel outside the active range.
class SpaceEncoder {
public:
    explicit SpaceEncoder(const SearchSpace& space) : space_(&space) {}

    std::size_t dims() const { return space_->nodes.size(); }

    bool is_categorical(std::size_t d) const {
        const auto k = space_->nodes[d].desc.kind;
        return k == ParamKind::categorical_simple || k == ParamKind::categorical_complex;
    }

    std::size_t arity(std::size_t d) const { return space_->nodes[d].desc.values.size(); }

    std::vector<double> encode(const Configuration& cfg) const {
        std::vector<double> x(dims());
        for (std::size_t d = 0; d < dims(); ++d) {
            const auto& node = space_->nodes[d];
            auto it = cfg.assignments.find(node.path);
            if (it == cfg.assignments.end()) {
                x[d] = is_categorical(d) ? -1.0 : -0.25;  // inactive sentinel
                continue;
            }
            if (is_categorical(d)) {
                const auto& vals = node.desc.values;
                x[d] = static_cast<double>(
                    std::find(vals.begin(), vals.end(), as_str(it->second)) - vals.begin());
            } else {
                const double lo = tpe_detail::internal_lo(node.desc);
                const double hi = tpe_detail::internal_hi(node.desc);
                x[d] = (tpe_detail::to_internal(node.desc, it->second) - lo) /
                       std::max(hi - lo, 1e-12);
            }
        }
        return x;
    }

private:
    const SearchSpace* space_;
};

// ── regression forest ───────────────────────────────────────────────

class RegressionTree {
public:
    void fit(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
             const std::vector<std::size_t>& rows, std::size_t min_leaf, Rng& rng) {
        nodes_.clear();
        build(x, y, rows, min_leaf, rng, 0);
    }

    double predict(const std::vector<double>& x) const {
        std::size_t node = 0;
        while (nodes_[node].dim >= 0)
            node = x[static_cast<std::size_t>(nodes_[node].dim)] <= nodes_[node].threshold
                       ? nodes_[node].left
                       : nodes_[node].right;
        return nodes_[node].value;
    }

private:
    struct Node {
        int dim = -1;
        double threshold = 0.0;
        std::size_t left = 0, right = 0;
        double value = 0.0;
    };

    std::size_t build(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                      const std::vector<std::size_t>& rows, std::size_t min_leaf, Rng& rng,
                      int depth) {
        const std::size_t id = nodes_.size();
        nodes_.emplace_back();
        double mean = 0.0;
        for (auto r : rows) mean += y[r];
        mean /= static_cast<double>(rows.size());
        nodes_[id].value = mean;
        if (depth >= 25 || rows.size() < 2 * min_leaf) return id;

        // sqrt(d) feature subsampling per split
        const std::size_t d = x.front().size();
        auto n_try = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))));
        std::vector<std::size_t> dims(d);
        std::iota(dims.begin(), dims.end(), 0);
        std::shuffle(dims.begin(), dims.end(), rng);
        dims.resize(n_try);

        double best_score = std::numeric_limits<double>::infinity();
        int best_dim = -1;
        double best_thr = 0.0;
        std::vector<std::pair<double, std::size_t>> order(rows.size());
        for (std::size_t dim : dims) {
            for (std::size_t i = 0; i < rows.size(); ++i) order[i] = {x[rows[i]][dim], rows[i]};
            std::sort(order.begin(), order.end());
            double left_sum = 0, left_sq = 0, right_sum = 0, right_sq = 0;
            for (auto [v, r] : order) {
                right_sum += y[r];
                right_sq += y[r] * y[r];
            }
            double left_n = 0, right_n = static_cast<double>(rows.size());
            for (std::size_t i = 0; i + 1 < order.size(); ++i) {
                const double yr = y[order[i].second];
                left_sum += yr;
                left_sq += yr * yr;
                left_n += 1;
                right_sum -= yr;
                right_sq -= yr * yr;
                right_n -= 1;
                if (order[i].first == order[i + 1].first) continue;
                if (left_n < static_cast<double>(min_leaf) ||
                    right_n < static_cast<double>(min_leaf))
                    continue;
                const double sse = (left_sq - left_sum * left_sum / left_n) +
                                   (right_sq - right_sum * right_sum / right_n);
                if (sse < best_score - 1e-15) {
                    best_score = sse;
                    best_dim = static_cast<int>(dim);
                    best_thr = 0.5 * (order[i].first + order[i + 1].first);
                }
            }
        }
        if (best_dim < 0) return id;

        std::vector<std::size_t> left_rows, right_rows;
        for (auto r : rows)
            (x[r][static_cast<std::size_t>(best_dim)] <= best_thr ? left_rows : right_rows)
                .push_back(r);
        if (left_rows.size() < min_leaf || right_rows.size() < min_leaf) return id;
        nodes_[id].dim = best_dim;
        nodes_[id].threshold = best_thr;
        const auto left = build(x, y, left_rows, min_leaf, rng, depth + 1);
        nodes_[id].left = left;
        const auto right = build(x, y, right_rows, min_leaf, rng, depth + 1);
        nodes_[id].right = right;
        return id;
    }

    std::vector<Node> nodes_;
};

// Random forest over encoded configurations. Each tree bootstraps the
// history and draws its own random permutation of every categorical
// dimension, so threshold splits approximate value-subset splits.
class RandomForestSurrogate {
public:
    void fit(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
             const SpaceEncoder& encoder, int n_trees, int min_leaf, Rng& rng) {
        trees_.assign(static_cast<std::size_t>(n_trees), {});
        remaps_.assign(trees_.size(), {});
        const std::size_t n = x.size();
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        for (std::size_t t = 0; t < trees_.size(); ++t) {
            remaps_[t] = make_remaps(encoder, rng);
            std::vector<std::vector<double>> xt(n);
            for (std::size_t r = 0; r < n; ++r) xt[r] = remap(x[r], remaps_[t]);
            std::vector<std::size_t> rows(n);
            for (auto& r : rows) r = pick(rng);
            trees_[t].fit(xt, y, rows, static_cast<std::size_t>(min_leaf), rng);
        }
    }

    std::pair<double, double> predict(const std::vector<double>& x) const {
        double mean = 0.0;
        std::vector<double> preds(trees_.size());
        for (std::size_t t = 0; t < trees_.size(); ++t) {
            preds[t] = trees_[t].predict(remap(x, remaps_[t]));
            mean += preds[t];
        }
        mean /= static_cast<double>(trees_.size());
        double var = 0.0;
        for (double p : preds) var += (p - mean) * (p - mean);
        var /= static_cast<double>(trees_.size());
        return {mean, var};
    }

private:
    using Remap = std::map<std::size_t, std::vector<double>>;  // dim -> code permutation

    static Remap make_remaps(const SpaceEncoder& encoder, Rng& rng) {
        Remap out;
        for (std::size_t d = 0; d < encoder.dims(); ++d) {
            if (!encoder.is_categorical(d)) continue;
            std::vector<double> perm(encoder.arity(d));
            std::iota(perm.begin(), perm.end(), 0.0);
            std::shuffle(perm.begin(), perm.end(), rng);
            out[d] = std::move(perm);
        }
        return out;
    }

    static std::vector<double> remap(std::vector<double> x, const Remap& remaps) {
        for (const auto& [d, perm] : remaps) {
            double& v = x[d];
            if (v >= 0 && static_cast<std::size_t>(v) < perm.size())
                v = perm[static_cast<std::size_t>(v)];
        }
        return x;
    }

    std::vector<RegressionTree> trees_;
    std::vector<Remap> remaps_;
};

// closed-form expected improvement below `best`, variance floored
inline double expected_improvement(double mu, double variance, double best) {
    const double sigma = std::sqrt(std::max(variance, 1e-12));
    const double z = (best - mu) / sigma;
    return (best - mu) * std_normal_cdf(z) + sigma * std_normal_pdf(z);
}

// SMAC-style suggester: forest surrogate over the full history (penalty
// observations included), candidates from fresh random samples plus the
// incumbent's one-change neighbourhood, argmax expected improvement.
// Every second suggestion is a pure random sample.
class SmacSuggester final : public Suggester {
public:
    explicit SmacSuggester(StrategyParams params = {}) : params_(params) {}

    Configuration suggest(const OptimizerState& state, const SearchSpace& space,
                          Rng& rng) override {
        if (state.ok_count() < static_cast<std::size_t>(params_.smac_startup)) {
            auto cfg = sample_config(space, rng);
            cfg.lineage = "smac_startup";
            return cfg;
        }
        if (params_.smac_interleave && state.history.size() % 2 == 1) {
            auto cfg = sample_config(space, rng);
            cfg.lineage = "smac_random";
            return cfg;
        }

        SpaceEncoder encoder(space);
        std::vector<std::vector<double>> x;
        std::vector<double> y;
        x.reserve(state.history.size());
        for (const auto& rec : state.history) {
            x.push_back(encoder.encode(rec.config));
            y.push_back(rec.cv_error);
        }
        RandomForestSurrogate forest;
        forest.fit(x, y, encoder, params_.smac_trees, params_.smac_min_leaf, rng);

        const double best = state.incumbent() ? state.incumbent()->cv_error
                                              : *std::min_element(y.begin(), y.end());

        std::vector<Configuration> pool;
        pool.reserve(static_cast<std::size_t>(params_.smac_candidates) + 32);
        for (int c = 0; c < params_.smac_candidates; ++c) pool.push_back(sample_config(space, rng));
        if (state.incumbent() != nullptr) {
            auto local = neighbors(space, state.incumbent()->config, rng);
            pool.insert(pool.end(), local.begin(), local.end());
        }

        std::size_t best_idx = 0;
        double best_ei = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < pool.size(); ++i) {
            const auto [mu, var] = forest.predict(encoder.encode(pool[i]));
            const double ei = expected_improvement(mu, var, best);
            if (ei > best_ei) {
                best_ei = ei;
                best_idx = i;
            }
        }
        auto cfg = pool[best_idx];
        cfg.lineage = "smac";
        return cfg;
    }

private:
    StrategyParams params_;
};

inline std::unique_ptr<Suggester> make_suggester(StrategyKind kind, const StrategyParams& params) {
    switch (kind) {
        case StrategyKind::random: return std::make_unique<RandomSuggester>();
        case StrategyKind::tpe: return std::make_unique<TpeSuggester>(params);
        case StrategyKind::smac: return std::make_unique<SmacSuggester>(params);
    }
    throw UsageError("unknown strategy");
}

}  // namespace mcpsforge
