#pragma once

#include "mcpsforge/predictors.hpp"
#include "mcpsforge/preprocessors.hpp"

namespace mcpsforge {

namespace detail {

inline Predictions average_members(const std::vector<Predictions>& member_preds,
                                   const std::vector<double>& member_weights) {
    const auto& first = member_preds.front();
    const auto nc = static_cast<std::size_t>(first.n_classes);
    Predictions out;
    out.n_classes = first.n_classes;
    out.labels.resize(first.n_rows());
    out.proba.assign(first.n_rows() * nc, 0.0);
    double total = 0.0;
    for (double w : member_weights) total += w;
    for (std::size_t m = 0; m < member_preds.size(); ++m)
        for (std::size_t i = 0; i < out.proba.size(); ++i)
            out.proba[i] += member_weights[m] / total * member_preds[m].proba[i];
    for (std::size_t r = 0; r < out.labels.size(); ++r)
        out.labels[r] = argmax_lowest(&out.proba[r * nc], out.n_classes);
    return out;
}

}  // namespace detail

// ── bagging ─────────────────────────────────────────────────────────
//
// Member m trains the base predictor on round(fraction * n) rows drawn
// with replacement; fraction 1.0 trains on the data as-is, so n=1 with
// fraction 1.0 reproduces the base predictor exactly. Member scores are
// averaged.

class BaggingPredictor final : public Predictor {
public:
    BaggingPredictor(const Dataset& d, long long n, double fraction, const std::string& base_method,
                     const ParamMap& base_params, std::uint64_t seed) {
        guard_.capture(d);
        require_complete(d, "bagging");
        for (long long m = 0; m < std::max<long long>(n, 1); ++m) {
            const std::uint64_t member_seed = mix_seed(seed, static_cast<std::uint64_t>(m));
            if (fraction >= 1.0) {
                members_.push_back(
                    fit_atomic_predictor(base_method, base_params, d, member_seed));
            } else {
                auto rng = make_rng(member_seed, "bagging");
                auto rows = resample_rows(d.n_rows, fraction, true, rng);
                members_.push_back(fit_atomic_predictor(base_method, base_params,
                                                        d.subset_rows(rows), member_seed));
            }
        }
    }

    Predictions predict(const Dataset& d) const override {
        guard_.check(d, "bagging");
        std::vector<Predictions> preds;
        preds.reserve(members_.size());
        for (const auto& m : members_) preds.push_back(m->predict(d));
        return detail::average_members(preds, std::vector<double>(members_.size(), 1.0));
    }

private:
    SchemaGuard guard_;
    std::vector<std::shared_ptr<const Predictor>> members_;
};

// ── AdaBoost.M1 ─────────────────────────────────────────────────────

class AdaBoostM1Predictor final : public Predictor {
public:
    AdaBoostM1Predictor(const Dataset& d, long long rounds, bool resample,
                        const std::string& base_method, const ParamMap& base_params,
                        std::uint64_t seed) {
        guard_.capture(d);
        require_complete(d, "adaboostm1");
        n_classes_ = static_cast<int>(d.class_names.size());
        std::vector<double> w(d.n_rows, 1.0 / static_cast<double>(d.n_rows));

        for (long long t = 0; t < std::max<long long>(rounds, 1); ++t) {
            const std::uint64_t round_seed = mix_seed(seed, static_cast<std::uint64_t>(t));
            std::shared_ptr<const Predictor> model;
            if (resample) {
                auto rng = make_rng(round_seed, "boost_resample");
                std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
                std::vector<int> rows(d.n_rows);
                for (auto& r : rows) r = static_cast<int>(pick(rng));
                std::sort(rows.begin(), rows.end());
                model = fit_atomic_predictor(base_method, base_params, d.subset_rows(rows),
                                             round_seed);
            } else {
                model = fit_atomic_predictor(base_method, base_params, d, round_seed, w);
            }
            auto preds = model->predict(d);
            double err = 0.0;
            for (std::size_t r = 0; r < d.n_rows; ++r)
                if (preds.labels[r] != d.labels[r]) err += w[r];

            if (err >= 0.5) {
                if (members_.empty()) {  // keep something usable
                    members_.push_back(model);
                    alphas_.push_back(1.0);
                    weight_sums_after_round_.push_back(1.0);
                }
                break;
            }
            const double clamped = std::clamp(err, 1e-10, 1.0 - 1e-10);
            members_.push_back(model);
            alphas_.push_back(std::log((1.0 - clamped) / clamped));
            if (err <= 0.0) {
                weight_sums_after_round_.push_back(1.0);
                break;  // perfect round, no reweighting signal left
            }
            const double beta = clamped / (1.0 - clamped);
            for (std::size_t r = 0; r < d.n_rows; ++r)
                if (preds.labels[r] == d.labels[r]) w[r] *= beta;
            double s = 0.0;
            for (double x : w) s += x;
            for (double& x : w) x /= s;
            double check = 0.0;
            for (double x : w) check += x;
            weight_sums_after_round_.push_back(check);
        }
    }

    Predictions predict(const Dataset& d) const override {
        guard_.check(d, "adaboostm1");
        const auto nc = static_cast<std::size_t>(n_classes_);
        Predictions out;
        out.n_classes = n_classes_;
        out.labels.resize(d.n_rows);
        out.proba.assign(d.n_rows * nc, 0.0);
        for (std::size_t m = 0; m < members_.size(); ++m) {
            auto preds = members_[m]->predict(d);
            for (std::size_t r = 0; r < d.n_rows; ++r)
                out.proba[r * nc + static_cast<std::size_t>(preds.labels[r])] += alphas_[m];
        }
        for (std::size_t r = 0; r < d.n_rows; ++r) {
            double s = 0.0;
            for (std::size_t k = 0; k < nc; ++k) s += out.proba[r * nc + k];
            if (s > 0)
                for (std::size_t k = 0; k < nc; ++k) out.proba[r * nc + k] /= s;
            out.labels[r] = argmax_lowest(&out.proba[r * nc], out.n_classes);
        }
        return out;
    }

    std::size_t rounds_used() const { return members_.size(); }
    const std::vector<double>& weight_sums_after_round() const { return weight_sums_after_round_; }

private:
    SchemaGuard guard_;
    int n_classes_ = 0;
    std::vector<std::shared_ptr<const Predictor>> members_;
    std::vector<double> alphas_;
    std::vector<double> weight_sums_after_round_;
};

// ── random subspace ─────────────────────────────────────────────────

class RandomSubspacePredictor final : public Predictor {
public:
    RandomSubspacePredictor(const Dataset& d, long long n, double fraction,
                            const std::string& base_method, const ParamMap& base_params,
                            std::uint64_t seed) {
        guard_.capture(d);
        require_complete(d, "random_subspace");
        for (long long m = 0; m < std::max<long long>(n, 1); ++m) {
            const std::uint64_t member_seed = mix_seed(seed, static_cast<std::uint64_t>(m));
            auto rng = make_rng(member_seed, "subspace");
            auto cols = fraction >= 1.0 ? all_columns(d.n_cols())
                                        : random_column_subset(d.n_cols(), fraction, rng);
            subsets_.push_back(cols);
            members_.push_back(fit_atomic_predictor(base_method, base_params,
                                                    d.select_columns(cols), member_seed));
        }
    }

    Predictions predict(const Dataset& d) const override {
        guard_.check(d, "random_subspace");
        std::vector<Predictions> preds;
        preds.reserve(members_.size());
        for (std::size_t m = 0; m < members_.size(); ++m)
            preds.push_back(members_[m]->predict(d.select_columns(subsets_[m])));
        return detail::average_members(preds, std::vector<double>(members_.size(), 1.0));
    }

private:
    static std::vector<int> all_columns(std::size_t n) {
        std::vector<int> cols(n);
        std::iota(cols.begin(), cols.end(), 0);
        return cols;
    }

    SchemaGuard guard_;
    std::vector<std::shared_ptr<const Predictor>> members_;
    std::vector<std::vector<int>> subsets_;
};

// Combines per-branch predictions; used by the AND-join transition that
// closes a vote subnet, and directly by tests.
inline Predictions combine_votes(const std::vector<Predictions>& inputs, const std::string& rule) {
    if (inputs.empty()) throw ContractError("vote: no inputs");
    if (rule == "average")
        return detail::average_members(inputs, std::vector<double>(inputs.size(), 1.0));
    // majority over labels, ties resolved toward the lowest class index
    const auto& first = inputs.front();
    const auto nc = static_cast<std::size_t>(first.n_classes);
    Predictions out;
    out.n_classes = first.n_classes;
    out.labels.resize(first.n_rows());
    out.proba.assign(first.n_rows() * nc, 0.0);
    for (std::size_t r = 0; r < first.n_rows(); ++r) {
        for (const auto& in : inputs)
            out.proba[r * nc + static_cast<std::size_t>(in.labels[r])] += 1.0;
        for (std::size_t k = 0; k < nc; ++k) out.proba[r * nc + k] /= static_cast<double>(inputs.size());
        out.labels[r] = argmax_lowest(&out.proba[r * nc], out.n_classes);
    }
    return out;
}

}  // namespace mcpsforge
