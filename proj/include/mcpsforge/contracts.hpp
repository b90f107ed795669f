#pragma once

#include "mcpsforge/dataset.hpp"

namespace mcpsforge {

// One predicted label per row, plus per-class scores used by averaging
// combiners.
struct Predictions {
    std::vector<int> labels;
    std::vector<double> proba;  // row-major, n_rows * n_classes
    int n_classes = 0;

    std::size_t n_rows() const { return labels.size(); }
    double score(std::size_t r, int cls) const {
        return proba[r * static_cast<std::size_t>(n_classes) + static_cast<std::size_t>(cls)];
    }
};

inline int argmax_lowest(const double* scores, int n) {
    int best = 0;
    for (int c = 1; c < n; ++c)
        if (scores[c] > scores[best]) best = c;
    return best;
}

inline void require_complete(const Dataset& d, const std::string& who) {
    if (d.missing_count() > 0)
        throw ContractError(who + ": input contains missing values");
}

// Fit-time column schema, checked on every apply/predict.
struct SchemaGuard {
    std::vector<std::pair<std::string, ColumnKind>> schema;

    void capture(const Dataset& d) {
        schema.clear();
        for (const auto& c : d.columns) schema.emplace_back(c.name, c.kind);
    }
    void check(const Dataset& d, const std::string& who) const {
        if (d.columns.size() != schema.size())
            throw ContractError(who + ": column count differs from fit time");
        for (std::size_t i = 0; i < schema.size(); ++i)
            if (d.columns[i].name != schema[i].first || d.columns[i].kind != schema[i].second)
                throw ContractError(who + ": column '" + d.columns[i].name +
                                    "' differs from fit-time schema");
    }
};

// A fitted preprocessor. apply() is predict-mode: pure, row-preserving.
class Transform {
public:
    virtual ~Transform() = default;
    virtual Dataset apply(const Dataset& d) const = 0;
};

// A fitted predictor (atomic or ensemble).
class Predictor {
public:
    virtual ~Predictor() = default;
    virtual Predictions predict(const Dataset& d) const = 0;
};

struct FittedComponent {
    std::string method;
    std::shared_ptr<const Transform> transform;
    std::shared_ptr<const Predictor> predictor;

    bool is_predictor() const { return predictor != nullptr; }
};

// Instance weights: empty means uniform. Normalized views are taken where
// algorithms need a distribution.
inline std::vector<double> normalized_weights(const std::vector<double>& w, std::size_t n) {
    std::vector<double> out;
    if (w.empty()) {
        out.assign(n, 1.0 / static_cast<double>(n));
        return out;
    }
    if (w.size() != n) throw ContractError("instance weight vector length mismatch");
    double s = 0.0;
    for (double x : w) s += x;
    if (s <= 0.0) throw ContractError("instance weights must have positive mass");
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = w[i] / s;
    return out;
}

}  // namespace mcpsforge
