#pragma once

#include "mcpsforge/optimize.hpp"

namespace mcpsforge {

namespace tpe_detail {

// numeric parameters work in an internal coordinate: log for log-scale,
// plain value otherwise (integers included)
inline double internal_lo(const ParamDescriptor& d) {
    return d.log_scale ? std::log(d.lo) : d.lo;
}
inline double internal_hi(const ParamDescriptor& d) {
    return d.log_scale ? std::log(d.hi) : d.hi;
}
inline double to_internal(const ParamDescriptor& d, const Value& v) {
    const double x = as_double(v);
    return d.log_scale ? std::log(x) : x;
}
inline Value from_internal(const ParamDescriptor& d, double x) {
    x = std::clamp(x, internal_lo(d), internal_hi(d));
    if (d.kind == ParamKind::integer)
        return static_cast<long long>(std::llround(std::clamp(
            d.log_scale ? std::exp(x) : x, d.lo, d.hi)));
    return d.log_scale ? std::exp(x) : x;
}

// 1-d kernel mixture over observed points plus one uniform prior
// component. Bandwidths are nearest-neighbour distances clipped to
// [1%, 50%] of the range.
struct Kde {
    std::vector<double> points;
    double lo = 0.0, hi = 1.0;

    double range() const { return std::max(hi - lo, 1e-12); }

    double bandwidth(std::size_t i) const {
        const double min_bw = 0.01 * range(), max_bw = 0.5 * range();
        if (points.size() < 2) return max_bw;
        double nn = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < points.size(); ++j)
            if (j != i) nn = std::min(nn, std::abs(points[i] - points[j]));
        return std::clamp(nn, min_bw, max_bw);
    }

    double sample(Rng& rng) const {
        std::uniform_int_distribution<std::size_t> pick(0, points.size());  // last = prior
        const auto idx = pick(rng);
        if (idx == points.size()) {
            std::uniform_real_distribution<double> u(lo, hi);
            return u(rng);
        }
        std::normal_distribution<double> n(points[idx], bandwidth(idx));
        return std::clamp(n(rng), lo, hi);
    }

    double log_pdf(double x) const {
        double acc = 1.0 / range();  // prior component
        for (std::size_t i = 0; i < points.size(); ++i) {
            const double bw = bandwidth(i);
            acc += std_normal_pdf((x - points[i]) / bw) / bw;
        }
        return std::log(acc / static_cast<double>(points.size() + 1));
    }

    // prior-only density when a side has no observations
    static double log_prior(double lo, double hi) { return -std::log(std::max(hi - lo, 1e-12)); }
};

struct CatCounts {
    std::vector<double> counts;  // per value index
    double total = 0.0;

    void init(std::size_t arity) { counts.assign(arity, 0.0); }
    void add(std::size_t idx) {
        counts[idx] += 1.0;
        total += 1.0;
    }
    // add-one smoothing
    double prob(std::size_t idx) const {
        return (counts[idx] + 1.0) / (total + static_cast<double>(counts.size()));
    }
    std::size_t sample(Rng& rng) const {
        std::vector<double> w(counts.size());
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = prob(i);
        std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
        return pick(rng);
    }
};

struct PathDensity {
    bool categorical = false;
    CatCounts below_cat, above_cat;
    Kde below_num, above_num;
};

}  // namespace tpe_detail

inline std::size_t tpe_below_count(double gamma, std::size_t n) {
    return static_cast<std::size_t>(std::ceil(gamma * static_cast<double>(n)));
}

// Tree-structured Parzen estimator: the history splits at the gamma
// quantile of cv error into a below set B (good) and above set A; per
// active parameter a density l is built from B and g from A, candidates
// are drawn from l and the one maximizing l/g aggregated over its active
// parameters wins.
class TpeSuggester final : public Suggester {
public:
    explicit TpeSuggester(StrategyParams params = {}) : params_(params) {}

    Configuration suggest(const OptimizerState& state, const SearchSpace& space,
                          Rng& rng) override {
        const std::size_t n = state.history.size();
        if (state.ok_count() < static_cast<std::size_t>(params_.tpe_startup) || n < 2) {
            auto cfg = sample_config(space, rng);
            cfg.lineage = "tpe_startup";
            return cfg;
        }

        // split at the gamma quantile, stable in arrival order
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return state.history[a].cv_error < state.history[b].cv_error;
        });
        const std::size_t nb = std::min(tpe_below_count(params_.tpe_gamma, n), n - 1);

        auto densities = build_densities(state, space, order, nb);

        Configuration best;
        double best_score = -std::numeric_limits<double>::infinity();
        for (int c = 0; c < params_.tpe_candidates; ++c) {
            auto cfg = draw_from_below(space, densities, rng);
            const double score = likelihood_ratio(space, densities, cfg);
            if (score > best_score) {
                best_score = score;
                best = std::move(cfg);
            }
        }
        best.lineage = "tpe";
        return best;
    }

private:
    using Densities = std::map<std::string, tpe_detail::PathDensity>;

    Densities build_densities(const OptimizerState& state, const SearchSpace& space,
                              const std::vector<std::size_t>& order, std::size_t nb) const {
        Densities out;
        for (const auto& node : space.nodes) {
            tpe_detail::PathDensity d;
            if (node.desc.kind == ParamKind::categorical_simple ||
                node.desc.kind == ParamKind::categorical_complex) {
                d.categorical = true;
                d.below_cat.init(node.desc.values.size());
                d.above_cat.init(node.desc.values.size());
            } else {
                d.below_num.lo = d.above_num.lo = tpe_detail::internal_lo(node.desc);
                d.below_num.hi = d.above_num.hi = tpe_detail::internal_hi(node.desc);
            }
            out.emplace(node.path, std::move(d));
        }
        for (std::size_t rank = 0; rank < order.size(); ++rank) {
            const bool below = rank < nb;
            const auto& rec = state.history[order[rank]];
            for (const auto& [path, value] : rec.config.assignments) {
                auto it = out.find(path);
                if (it == out.end()) continue;
                auto& d = it->second;
                if (d.categorical) {
                    const auto* node = space.node(path);
                    const auto& vals = node->desc.values;
                    const auto idx = static_cast<std::size_t>(
                        std::find(vals.begin(), vals.end(), as_str(value)) - vals.begin());
                    if (idx >= vals.size()) continue;
                    (below ? d.below_cat : d.above_cat).add(idx);
                } else {
                    const auto* node = space.node(path);
                    (below ? d.below_num : d.above_num)
                        .points.push_back(tpe_detail::to_internal(node->desc, value));
                }
            }
        }
        return out;
    }

    Configuration draw_from_below(const SearchSpace& space, const Densities& densities,
                                  Rng& rng) const {
        Configuration cfg;
        cfg.space = space.name;
        for (const auto& node : space.nodes) {
            if (!conditions_hold(node, cfg.assignments)) continue;
            const auto& d = densities.at(node.path);
            if (d.categorical) {
                cfg.assignments[node.path] = node.desc.values[d.below_cat.sample(rng)];
            } else if (d.below_num.points.empty()) {
                cfg.assignments[node.path] = sample_param(node.desc, rng);
            } else {
                cfg.assignments[node.path] =
                    tpe_detail::from_internal(node.desc, d.below_num.sample(rng));
            }
        }
        return cfg;
    }

    double likelihood_ratio(const SearchSpace& space, const Densities& densities,
                            const Configuration& cfg) const {
        double score = 0.0;
        for (const auto& [path, value] : cfg.assignments) {
            const auto& d = densities.at(path);
            const auto* node = space.node(path);
            if (d.categorical) {
                const auto& vals = node->desc.values;
                const auto idx = static_cast<std::size_t>(
                    std::find(vals.begin(), vals.end(), as_str(value)) - vals.begin());
                score += std::log(d.below_cat.prob(idx)) - std::log(d.above_cat.prob(idx));
            } else {
                const double x = tpe_detail::to_internal(node->desc, value);
                const double lo = d.below_num.lo, hi = d.below_num.hi;
                const double log_l = d.below_num.points.empty()
                                         ? tpe_detail::Kde::log_prior(lo, hi)
                                         : d.below_num.log_pdf(x);
                const double log_g = d.above_num.points.empty()
                                         ? tpe_detail::Kde::log_prior(lo, hi)
                                         : d.above_num.log_pdf(x);
                score += log_l - log_g;
            }
        }
        return score;
    }

    StrategyParams params_;
};

}  // namespace mcpsforge
