#pragma once

#include "mcpsforge/components.hpp"
#include "mcpsforge/contracts.hpp"

namespace mcpsforge {

namespace detail {

inline Predictions constant_predictions(std::size_t n_rows, const std::vector<double>& dist) {
    Predictions p;
    p.n_classes = static_cast<int>(dist.size());
    p.labels.assign(n_rows, argmax_lowest(dist.data(), p.n_classes));
    p.proba.resize(n_rows * dist.size());
    for (std::size_t r = 0; r < n_rows; ++r)
        std::copy(dist.begin(), dist.end(), p.proba.begin() + static_cast<long>(r * dist.size()));
    return p;
}

inline std::vector<double> weighted_class_distribution(const std::vector<int>& labels,
                                                       const std::vector<double>& w,
                                                       int n_classes) {
    std::vector<double> dist(static_cast<std::size_t>(n_classes), 0.0);
    for (std::size_t i = 0; i < labels.size(); ++i) dist[static_cast<std::size_t>(labels[i])] += w[i];
    double s = 0.0;
    for (double x : dist) s += x;
    if (s > 0)
        for (double& x : dist) x /= s;
    return dist;
}

}  // namespace detail

// ── zeror: weighted majority class ──────────────────────────────────

class ZeroR final : public Predictor {
public:
    ZeroR(const Dataset& d, const std::vector<double>& weights) {
        guard_.capture(d);
        require_complete(d, "zeror");
        auto w = normalized_weights(weights, d.n_rows);
        dist_ = detail::weighted_class_distribution(d.labels, w, static_cast<int>(d.class_names.size()));
    }

    Predictions predict(const Dataset& d) const override {
        guard_.check(d, "zeror");
        require_complete(d, "zeror");
        return detail::constant_predictions(d.n_rows, dist_);
    }

private:
    SchemaGuard guard_;
    std::vector<double> dist_;
};

// ── oner: best single-attribute rule ────────────────────────────────
//
// Continuous attributes are split into `bins` equal-width buckets over the
// fit range; categorical attributes use their category index. Each bucket
// predicts its weighted majority class; the attribute with the lowest
// weighted training error wins (ties: lowest attribute index).

class OneR final : public Predictor {
public:
    OneR(const Dataset& d, long long bins, const std::vector<double>& weights) {
        guard_.capture(d);
        require_complete(d, "oner");
        const int n_classes = static_cast<int>(d.class_names.size());
        auto w = normalized_weights(weights, d.n_rows);
        fallback_ = detail::weighted_class_distribution(d.labels, w, n_classes);

        double best_err = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < d.n_cols(); ++c) {
            Rule rule = build_rule(d, c, bins, w, n_classes);
            if (rule.error < best_err) {
                best_err = rule.error;
                rule_ = std::move(rule);
            }
        }
        n_classes_ = n_classes;
    }

    Predictions predict(const Dataset& d) const override {
        guard_.check(d, "oner");
        require_complete(d, "oner");
        Predictions p;
        p.n_classes = n_classes_;
        p.labels.resize(d.n_rows);
        p.proba.assign(d.n_rows * static_cast<std::size_t>(n_classes_), 0.0);
        for (std::size_t r = 0; r < d.n_rows; ++r) {
            const int b = bucket_of(d.cell(r, rule_.column));
            const auto& dist = b >= 0 && !rule_.bucket_dist[static_cast<std::size_t>(b)].empty()
                                   ? rule_.bucket_dist[static_cast<std::size_t>(b)]
                                   : fallback_;
            p.labels[r] = argmax_lowest(dist.data(), n_classes_);
            std::copy(dist.begin(), dist.end(),
                      p.proba.begin() + static_cast<long>(r * static_cast<std::size_t>(n_classes_)));
        }
        return p;
    }

    std::size_t chosen_column() const { return rule_.column; }

private:
    struct Rule {
        std::size_t column = 0;
        bool continuous = true;
        double lo = 0.0, width = 1.0;
        int n_buckets = 1;
        std::vector<std::vector<double>> bucket_dist;  // empty dist -> fallback
        double error = std::numeric_limits<double>::infinity();
    };

    Rule build_rule(const Dataset& d, std::size_t c, long long bins, const std::vector<double>& w,
                    int n_classes) const {
        Rule rule;
        rule.column = c;
        rule.continuous = d.columns[c].kind == ColumnKind::continuous;
        if (rule.continuous) {
            double mn = d.cell(0, c), mx = mn;
            for (std::size_t r = 1; r < d.n_rows; ++r) {
                mn = std::min(mn, d.cell(r, c));
                mx = std::max(mx, d.cell(r, c));
            }
            rule.lo = mn;
            rule.n_buckets = static_cast<int>(bins);
            rule.width = mx > mn ? (mx - mn) / static_cast<double>(bins) : 1.0;
        } else {
            rule.lo = 0.0;
            rule.width = 1.0;
            rule.n_buckets = static_cast<int>(d.columns[c].categories.size()) + 1;  // + unknown
        }
        std::vector<std::vector<double>> counts(
            static_cast<std::size_t>(rule.n_buckets),
            std::vector<double>(static_cast<std::size_t>(n_classes), 0.0));
        for (std::size_t r = 0; r < d.n_rows; ++r) {
            int b = bucket_index(rule, d.cell(r, c));
            counts[static_cast<std::size_t>(b)][static_cast<std::size_t>(d.labels[r])] += w[r];
        }
        rule.error = 0.0;
        rule.bucket_dist.resize(counts.size());
        for (std::size_t b = 0; b < counts.size(); ++b) {
            double total = 0.0, top = 0.0;
            for (double x : counts[b]) total += x;
            if (total <= 0.0) continue;  // leave empty -> fallback at predict
            for (double& x : counts[b]) x /= total;
            top = *std::max_element(counts[b].begin(), counts[b].end());
            rule.error += total * (1.0 - top);
            rule.bucket_dist[b] = counts[b];
        }
        return rule;
    }

    static int bucket_index(const Rule& rule, double v) {
        if (rule.continuous) {
            int b = static_cast<int>(std::floor((v - rule.lo) / rule.width));
            return std::clamp(b, 0, rule.n_buckets - 1);
        }
        int b = static_cast<int>(v);
        return b >= 0 && b < rule.n_buckets ? b : rule.n_buckets - 1;
    }

    int bucket_of(double v) const { return bucket_index(rule_, v); }

    SchemaGuard guard_;
    Rule rule_;
    std::vector<double> fallback_;
    int n_classes_ = 0;
};

// ── single axis-aligned split ───────────────────────────────────────

namespace detail {

struct SplitScan {
    std::size_t column = 0;
    double threshold = 0.0;
    double score = std::numeric_limits<double>::infinity();  // weighted gini
    bool found = false;
};

inline double gini_of(const std::vector<double>& counts, double total) {
    if (total <= 0.0) return 0.0;
    double g = 1.0;
    for (double x : counts) g -= (x / total) * (x / total);
    return g;
}

// Best threshold split over the given rows; categorical codes are treated
// as ordered values, which is adequate at this scale.
inline SplitScan best_split(const Dataset& d, const std::vector<int>& rows,
                            const std::vector<double>& w, int n_classes, std::size_t min_leaf) {
    SplitScan best;
    std::vector<std::pair<double, int>> order(rows.size());
    std::vector<double> left(static_cast<std::size_t>(n_classes)),
        right(static_cast<std::size_t>(n_classes));
    for (std::size_t c = 0; c < d.n_cols(); ++c) {
        for (std::size_t i = 0; i < rows.size(); ++i)
            order[i] = {d.cell(static_cast<std::size_t>(rows[i]), c), rows[i]};
        std::sort(order.begin(), order.end());
        std::fill(left.begin(), left.end(), 0.0);
        std::fill(right.begin(), right.end(), 0.0);
        double left_total = 0.0, right_total = 0.0;
        for (auto [v, r] : order) {
            right[static_cast<std::size_t>(d.labels[static_cast<std::size_t>(r)])] +=
                w[static_cast<std::size_t>(r)];
            right_total += w[static_cast<std::size_t>(r)];
        }
        for (std::size_t i = 0; i + 1 < order.size(); ++i) {
            const auto r = static_cast<std::size_t>(order[i].second);
            left[static_cast<std::size_t>(d.labels[r])] += w[r];
            left_total += w[r];
            right[static_cast<std::size_t>(d.labels[r])] -= w[r];
            right_total -= w[r];
            if (order[i].first == order[i + 1].first) continue;
            if (i + 1 < min_leaf || order.size() - i - 1 < min_leaf) continue;
            const double score = left_total * gini_of(left, left_total) +
                                 right_total * gini_of(right, right_total);
            if (score < best.score - 1e-15) {
                best.score = score;
                best.column = c;
                best.threshold = 0.5 * (order[i].first + order[i + 1].first);
                best.found = true;
            }
        }
    }
    return best;
}

}  // namespace detail

class DecisionStump final : public Predictor {
public:
    DecisionStump(const Dataset& d, const std::vector<double>& weights) {
        guard_.capture(d);
        require_complete(d, "decision_stump");
        const int n_classes = static_cast<int>(d.class_names.size());
        auto w = normalized_weights(weights, d.n_rows);
        std::vector<int> rows(d.n_rows);
        std::iota(rows.begin(), rows.end(), 0);
        auto split = detail::best_split(d, rows, w, n_classes, 1);
        root_dist_ = detail::weighted_class_distribution(d.labels, w, n_classes);
        if (split.found) {
            has_split_ = true;
            column_ = split.column;
            threshold_ = split.threshold;
            left_dist_.assign(static_cast<std::size_t>(n_classes), 0.0);
            right_dist_.assign(static_cast<std::size_t>(n_classes), 0.0);
            double lt = 0, rt = 0;
            for (std::size_t r = 0; r < d.n_rows; ++r) {
                if (d.cell(r, column_) <= threshold_) {
                    left_dist_[static_cast<std::size_t>(d.labels[r])] += w[r];
                    lt += w[r];
                } else {
                    right_dist_[static_cast<std::size_t>(d.labels[r])] += w[r];
                    rt += w[r];
                }
            }
            for (double& x : left_dist_) x /= std::max(lt, 1e-300);
            for (double& x : right_dist_) x /= std::max(rt, 1e-300);
        }
        n_classes_ = n_classes;
    }

    Predictions predict(const Dataset& d) const override {
        guard_.check(d, "decision_stump");
        require_complete(d, "decision_stump");
        Predictions p;
        p.n_classes = n_classes_;
        p.labels.resize(d.n_rows);
        p.proba.resize(d.n_rows * static_cast<std::size_t>(n_classes_));
        for (std::size_t r = 0; r < d.n_rows; ++r) {
            const auto& dist = !has_split_          ? root_dist_
                               : d.cell(r, column_) <= threshold_ ? left_dist_
                                                                  : right_dist_;
            p.labels[r] = argmax_lowest(dist.data(), n_classes_);
            std::copy(dist.begin(), dist.end(),
                      p.proba.begin() + static_cast<long>(r * static_cast<std::size_t>(n_classes_)));
        }
        return p;
    }

private:
    SchemaGuard guard_;
    bool has_split_ = false;
    std::size_t column_ = 0;
    double threshold_ = 0.0;
    std::vector<double> root_dist_, left_dist_, right_dist_;
    int n_classes_ = 0;
};

// ── k nearest neighbours ────────────────────────────────────────────

class Knn final : public Predictor {
public:
    Knn(const Dataset& d, long long k, bool distance_weighted, const std::vector<double>& weights)
        : train_(d),
          k_(static_cast<std::size_t>(std::max<long long>(k, 1))),
          distance_weighted_(distance_weighted) {
        guard_.capture(d);
        require_complete(d, "knn");
        w_ = normalized_weights(weights, d.n_rows);
        n_classes_ = static_cast<int>(d.class_names.size());
    }

    Predictions predict(const Dataset& d) const override {
        guard_.check(d, "knn");
        require_complete(d, "knn");
        Predictions p;
        p.n_classes = n_classes_;
        p.labels.resize(d.n_rows);
        p.proba.assign(d.n_rows * static_cast<std::size_t>(n_classes_), 0.0);
        const std::size_t k = std::min(k_, train_.n_rows);
        std::vector<std::pair<double, int>> dist(train_.n_rows);
        for (std::size_t r = 0; r < d.n_rows; ++r) {
            for (std::size_t t = 0; t < train_.n_rows; ++t)
                dist[t] = {distance(d, r, t), static_cast<int>(t)};
            std::partial_sort(dist.begin(), dist.begin() + static_cast<long>(k), dist.end());
            std::vector<double> votes(static_cast<std::size_t>(n_classes_), 0.0);
            for (std::size_t i = 0; i < k; ++i) {
                const auto t = static_cast<std::size_t>(dist[i].second);
                const double wt =
                    w_[t] * (distance_weighted_ ? 1.0 / (dist[i].first + 1e-12) : 1.0);
                votes[static_cast<std::size_t>(train_.labels[t])] += wt;
            }
            double s = 0.0;
            for (double v : votes) s += v;
            if (s > 0)
                for (double& v : votes) v /= s;
            p.labels[r] = argmax_lowest(votes.data(), n_classes_);
            std::copy(votes.begin(), votes.end(),
                      p.proba.begin() + static_cast<long>(r * static_cast<std::size_t>(n_classes_)));
        }
        return p;
    }

private:
    double distance(const Dataset& q, std::size_t qr, std::size_t tr) const {
        double s = 0.0;
        for (std::size_t c = 0; c < q.n_cols(); ++c) {
            if (q.columns[c].kind == ColumnKind::continuous) {
                const double diff = q.cell(qr, c) - train_.cell(tr, c);
                s += diff * diff;
            } else {
                s += q.cell(qr, c) != train_.cell(tr, c) ? 1.0 : 0.0;
            }
        }
        return std::sqrt(s);
    }

    SchemaGuard guard_;
    Dataset train_;
    std::vector<double> w_;
    std::size_t k_;
    bool distance_weighted_;
    int n_classes_ = 0;
};

// ── naive bayes ─────────────────────────────────────────────────────
//
// Gaussian likelihoods for continuous columns (variance floored by the
// smoothing constant), additive smoothing for categorical counts.

class NaiveBayes final : public Predictor {
public:
    NaiveBayes(const Dataset& d, double smoothing, const std::vector<double>& weights)
        : smoothing_(std::max(smoothing, 1e-12)) {
        guard_.capture(d);
        require_complete(d, "naive_bayes");
        n_classes_ = static_cast<int>(d.class_names.size());
        const auto nc = static_cast<std::size_t>(n_classes_);
        auto w = normalized_weights(weights, d.n_rows);
        prior_ = detail::weighted_class_distribution(d.labels, w, n_classes_);
        for (double& p : prior_) p = std::max(p, 1e-12);

        mean_.assign(nc, std::vector<double>(d.n_cols(), 0.0));
        var_.assign(nc, std::vector<double>(d.n_cols(), 0.0));
        cat_logp_.assign(nc, std::vector<std::vector<double>>(d.n_cols()));
        std::vector<double> class_mass(nc, 0.0);
        for (std::size_t r = 0; r < d.n_rows; ++r)
            class_mass[static_cast<std::size_t>(d.labels[r])] += w[r];

        for (std::size_t c = 0; c < d.n_cols(); ++c) {
            if (d.columns[c].kind == ColumnKind::continuous) {
                for (std::size_t r = 0; r < d.n_rows; ++r)
                    mean_[static_cast<std::size_t>(d.labels[r])][c] += w[r] * d.cell(r, c);
                for (std::size_t k = 0; k < nc; ++k)
                    mean_[k][c] /= std::max(class_mass[k], 1e-300);
                for (std::size_t r = 0; r < d.n_rows; ++r) {
                    const auto k = static_cast<std::size_t>(d.labels[r]);
                    const double diff = d.cell(r, c) - mean_[k][c];
                    var_[k][c] += w[r] * diff * diff;
                }
                for (std::size_t k = 0; k < nc; ++k)
                    var_[k][c] = var_[k][c] / std::max(class_mass[k], 1e-300) + smoothing_;
            } else {
                const auto arity = d.columns[c].categories.size() + 1;  // + unknown
                for (std::size_t k = 0; k < nc; ++k)
                    cat_logp_[k][c].assign(arity, smoothing_);
                for (std::size_t r = 0; r < d.n_rows; ++r) {
                    auto v = static_cast<std::size_t>(d.cell(r, c));
                    if (v >= arity) v = arity - 1;
                    cat_logp_[static_cast<std::size_t>(d.labels[r])][c][v] += w[r];
                }
                for (std::size_t k = 0; k < nc; ++k) {
                    double total = 0.0;
                    for (double x : cat_logp_[k][c]) total += x;
                    for (double& x : cat_logp_[k][c]) x = std::log(x / total);
                }
            }
        }
    }

    Predictions predict(const Dataset& d) const override {
        guard_.check(d, "naive_bayes");
        require_complete(d, "naive_bayes");
        const auto nc = static_cast<std::size_t>(n_classes_);
        Predictions p;
        p.n_classes = n_classes_;
        p.labels.resize(d.n_rows);
        p.proba.resize(d.n_rows * nc);
        std::vector<double> logp(nc);
        for (std::size_t r = 0; r < d.n_rows; ++r) {
            for (std::size_t k = 0; k < nc; ++k) {
                logp[k] = std::log(prior_[k]);
                for (std::size_t c = 0; c < d.n_cols(); ++c) {
                    if (d.columns[c].kind == ColumnKind::continuous) {
                        const double diff = d.cell(r, c) - mean_[k][c];
                        logp[k] += -0.5 * std::log(2.0 * M_PI * var_[k][c]) -
                                   diff * diff / (2.0 * var_[k][c]);
                    } else {
                        auto v = static_cast<std::size_t>(d.cell(r, c));
                        if (v >= cat_logp_[k][c].size()) v = cat_logp_[k][c].size() - 1;
                        logp[k] += cat_logp_[k][c][v];
                    }
                }
            }
            const double mx = *std::max_element(logp.begin(), logp.end());
            double s = 0.0;
            for (std::size_t k = 0; k < nc; ++k) {
                p.proba[r * nc + k] = std::exp(logp[k] - mx);
                s += p.proba[r * nc + k];
            }
            for (std::size_t k = 0; k < nc; ++k) p.proba[r * nc + k] /= s;
            p.labels[r] = argmax_lowest(&p.proba[r * nc], n_classes_);
        }
        return p;
    }

private:
    SchemaGuard guard_;
    double smoothing_;
    int n_classes_ = 0;
    std::vector<double> prior_;
    std::vector<std::vector<double>> mean_, var_;
    std::vector<std::vector<std::vector<double>>> cat_logp_;
};

// ── multinomial logistic regression ─────────────────────────────────
//
// Full-batch gradient descent on softmax cross-entropy with an L2
// penalty. Features are used as-is: scaling is the pipeline's job.

class LogisticRegression final : public Predictor {
public:
    LogisticRegression(const Dataset& d, double l2, long long epochs, double rate,
                       const std::vector<double>& weights)
        : l2_(l2) {
        guard_.capture(d);
        require_complete(d, "logistic");
        n_classes_ = static_cast<int>(d.class_names.size());
        const auto nc = static_cast<std::size_t>(n_classes_);
        const std::size_t dim = d.n_cols() + 1;  // + bias
        auto w = normalized_weights(weights, d.n_rows);
        coef_.assign(nc * dim, 0.0);
        std::vector<double> grad(nc * dim), probs(nc);
        for (long long e = 0; e < epochs; ++e) {
            std::fill(grad.begin(), grad.end(), 0.0);
            for (std::size_t r = 0; r < d.n_rows; ++r) {
                scores(d, r, probs);
                for (std::size_t k = 0; k < nc; ++k) {
                    const double delta =
                        (probs[k] - (static_cast<int>(k) == d.labels[r] ? 1.0 : 0.0)) * w[r];
                    for (std::size_t c = 0; c < d.n_cols(); ++c)
                        grad[k * dim + c] += delta * d.cell(r, c);
                    grad[k * dim + dim - 1] += delta;
                }
            }
            for (std::size_t k = 0; k < nc; ++k)
                for (std::size_t j = 0; j < dim; ++j) {
                    const double penalty = j + 1 < dim ? l2_ * coef_[k * dim + j] : 0.0;
                    coef_[k * dim + j] -= rate * (grad[k * dim + j] + penalty);
                }
        }
    }

    Predictions predict(const Dataset& d) const override {
        guard_.check(d, "logistic");
        require_complete(d, "logistic");
        const auto nc = static_cast<std::size_t>(n_classes_);
        Predictions p;
        p.n_classes = n_classes_;
        p.labels.resize(d.n_rows);
        p.proba.resize(d.n_rows * nc);
        std::vector<double> probs(nc);
        for (std::size_t r = 0; r < d.n_rows; ++r) {
            scores(d, r, probs);
            std::copy(probs.begin(), probs.end(), p.proba.begin() + static_cast<long>(r * nc));
            p.labels[r] = argmax_lowest(probs.data(), n_classes_);
        }
        return p;
    }

private:
    void scores(const Dataset& d, std::size_t r, std::vector<double>& out) const {
        const auto nc = static_cast<std::size_t>(n_classes_);
        const std::size_t dim = d.n_cols() + 1;
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < nc; ++k) {
            double z = coef_[k * dim + dim - 1];
            for (std::size_t c = 0; c < d.n_cols(); ++c) z += coef_[k * dim + c] * d.cell(r, c);
            out[k] = z;
            mx = std::max(mx, z);
        }
        double s = 0.0;
        for (std::size_t k = 0; k < nc; ++k) {
            out[k] = std::exp(out[k] - mx);
            s += out[k];
        }
        for (std::size_t k = 0; k < nc; ++k) out[k] /= s;
    }

    SchemaGuard guard_;
    double l2_;
    int n_classes_ = 0;
    std::vector<double> coef_;  // n_classes x (n_cols + 1)
};

// ── CART-style decision tree ────────────────────────────────────────

class DecisionTree final : public Predictor {
public:
    DecisionTree(const Dataset& d, long long max_depth, long long min_leaf,
                 const std::vector<double>& weights)
        : max_depth_(static_cast<int>(max_depth)),
          min_leaf_(static_cast<std::size_t>(std::max<long long>(min_leaf, 1))) {
        guard_.capture(d);
        require_complete(d, "tree");
        n_classes_ = static_cast<int>(d.class_names.size());
        auto w = normalized_weights(weights, d.n_rows);
        std::vector<int> rows(d.n_rows);
        std::iota(rows.begin(), rows.end(), 0);
        build(d, rows, w, 0);
    }

    Predictions predict(const Dataset& d) const override {
        guard_.check(d, "tree");
        require_complete(d, "tree");
        const auto nc = static_cast<std::size_t>(n_classes_);
        Predictions p;
        p.n_classes = n_classes_;
        p.labels.resize(d.n_rows);
        p.proba.resize(d.n_rows * nc);
        for (std::size_t r = 0; r < d.n_rows; ++r) {
            std::size_t node = 0;
            while (!nodes_[node].leaf)
                node = d.cell(r, nodes_[node].column) <= nodes_[node].threshold
                           ? nodes_[node].left
                           : nodes_[node].right;
            const auto& dist = nodes_[node].dist;
            std::copy(dist.begin(), dist.end(), p.proba.begin() + static_cast<long>(r * nc));
            p.labels[r] = argmax_lowest(dist.data(), n_classes_);
        }
        return p;
    }

private:
    struct Node {
        bool leaf = true;
        std::size_t column = 0;
        double threshold = 0.0;
        std::size_t left = 0, right = 0;
        std::vector<double> dist;
    };

    std::size_t build(const Dataset& d, const std::vector<int>& rows, const std::vector<double>& w,
                      int depth) {
        const std::size_t id = nodes_.size();
        nodes_.emplace_back();
        std::vector<int> labels;
        std::vector<double> ww;
        labels.reserve(rows.size());
        ww.reserve(rows.size());
        for (int r : rows) {
            labels.push_back(d.labels[static_cast<std::size_t>(r)]);
            ww.push_back(w[static_cast<std::size_t>(r)]);
        }
        auto dist = detail::weighted_class_distribution(labels, ww, n_classes_);
        nodes_[id].dist = dist;

        const bool pure = *std::max_element(dist.begin(), dist.end()) >= 1.0 - 1e-12;
        if (depth >= max_depth_ || rows.size() < 2 * min_leaf_ || pure) return id;
        auto split = detail::best_split(d, rows, w, n_classes_, min_leaf_);
        if (!split.found) return id;

        std::vector<int> left_rows, right_rows;
        for (int r : rows)
            (d.cell(static_cast<std::size_t>(r), split.column) <= split.threshold ? left_rows
                                                                                  : right_rows)
                .push_back(r);
        if (left_rows.size() < min_leaf_ || right_rows.size() < min_leaf_) return id;
        nodes_[id].leaf = false;
        nodes_[id].column = split.column;
        nodes_[id].threshold = split.threshold;
        const auto left = build(d, left_rows, w, depth + 1);
        nodes_[id].left = left;
        const auto right = build(d, right_rows, w, depth + 1);
        nodes_[id].right = right;
        return id;
    }

    SchemaGuard guard_;
    int max_depth_;
    std::size_t min_leaf_;
    int n_classes_ = 0;
    std::vector<Node> nodes_;
};

// ── atomic predictor dispatch ───────────────────────────────────────

inline std::shared_ptr<const Predictor> fit_atomic_predictor(const std::string& method,
                                                             const ParamMap& params,
                                                             const Dataset& data,
                                                             std::uint64_t /*seed*/,
                                                             const std::vector<double>& weights = {}) {
    if (data.n_rows == 0) throw ContractError(method + ": empty training data");
    if (data.class_names.empty()) throw ContractError(method + ": training data has no classes");
    require_complete(data, method);
    if (method == "zeror") return std::make_shared<ZeroR>(data, weights);
    if (method == "oner")
        return std::make_shared<OneR>(data, param_or<long long>(params, "bins", 6), weights);
    if (method == "decision_stump") return std::make_shared<DecisionStump>(data, weights);
    if (method == "knn")
        return std::make_shared<Knn>(data, param_or<long long>(params, "k", 5),
                                     param_or<bool>(params, "weighted", false), weights);
    if (method == "naive_bayes")
        return std::make_shared<NaiveBayes>(data, param_or<double>(params, "smoothing", 1e-6),
                                            weights);
    if (method == "logistic")
        return std::make_shared<LogisticRegression>(
            data, param_or<double>(params, "l2", 1e-3), param_or<long long>(params, "epochs", 50),
            param_or<double>(params, "rate", 0.1), weights);
    if (method == "tree")
        return std::make_shared<DecisionTree>(data, param_or<long long>(params, "max_depth", 6),
                                              param_or<long long>(params, "min_leaf", 2), weights);
    throw ContractError("unknown predictor: " + method);
}

}  // namespace mcpsforge
