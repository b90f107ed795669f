#pragma once

#include <Eigen/Dense>

#include "mcpsforge/components.hpp"
#include "mcpsforge/contracts.hpp"

namespace mcpsforge {

namespace detail {

inline std::vector<double> column_values(const Dataset& d, std::size_t c) {
    std::vector<double> out;
    out.reserve(d.n_rows);
    for (std::size_t r = 0; r < d.n_rows; ++r)
        if (!d.is_missing(r, c)) out.push_back(d.cell(r, c));
    return out;
}

}  // namespace detail

class IdentityTransform final : public Transform {
public:
    Dataset apply(const Dataset& d) const override { return d; }
};

// ── missing value handling ──────────────────────────────────────────

// Continuous columns are filled per strategy; categorical columns always
// take the fit-time mode. Filled cells leave the missing mask.
class ImputeConstant final : public Transform {
public:
    ImputeConstant(const Dataset& fit_data, const std::string& strategy) {
        guard_.capture(fit_data);
        fill_.resize(fit_data.n_cols(), 0.0);
        for (std::size_t c = 0; c < fit_data.n_cols(); ++c) {
            if (fit_data.columns[c].kind == ColumnKind::categorical) {
                fill_[c] = mode_of(fit_data, c);
                continue;
            }
            auto vals = detail::column_values(fit_data, c);
            if (vals.empty()) continue;  // all-missing column: fill with 0
            std::sort(vals.begin(), vals.end());
            if (strategy == "zero") fill_[c] = 0.0;
            else if (strategy == "mean") fill_[c] = mean_of(vals);
            else if (strategy == "median") fill_[c] = quantile_sorted(vals, 0.5);
            else if (strategy == "min") fill_[c] = vals.front();
            else if (strategy == "max") fill_[c] = vals.back();
            else throw ContractError("replace_constant: unknown strategy '" + strategy + "'");
        }
    }

    Dataset apply(const Dataset& d) const override {
        guard_.check(d, "replace_constant");
        Dataset out = d;
        for (std::size_t r = 0; r < out.n_rows; ++r)
            for (std::size_t c = 0; c < out.n_cols(); ++c)
                if (out.is_missing(r, c)) out.set_cell(r, c, fill_[c], false);
        return out;
    }

private:
    static double mode_of(const Dataset& d, std::size_t c) {
        std::map<int, int> counts;
        for (std::size_t r = 0; r < d.n_rows; ++r)
            if (!d.is_missing(r, c)) counts[static_cast<int>(d.cell(r, c))]++;
        int best = 0, best_n = -1;
        for (auto [v, n] : counts)
            if (n > best_n) best = v, best_n = n;
        return best;
    }

    SchemaGuard guard_;
    std::vector<double> fill_;
};

// ── outlier removal ─────────────────────────────────────────────────

// Fit-time only: rows with a continuous value outside
// [Q1 - m*IQR, Q3 + m*IQR] are dropped. Quartiles use linear
// interpolation (type 7). Predict-time apply preserves rows.
class IqrRemove final : public Transform {
public:
    IqrRemove(const Dataset& fit_data, double multiplier) {
        guard_.capture(fit_data);
        lo_.assign(fit_data.n_cols(), -std::numeric_limits<double>::infinity());
        hi_.assign(fit_data.n_cols(), std::numeric_limits<double>::infinity());
        for (std::size_t c = 0; c < fit_data.n_cols(); ++c) {
            if (fit_data.columns[c].kind != ColumnKind::continuous) continue;
            auto vals = detail::column_values(fit_data, c);
            if (vals.size() < 4) continue;
            std::sort(vals.begin(), vals.end());
            const double q1 = quantile_sorted(vals, 0.25);
            const double q3 = quantile_sorted(vals, 0.75);
            const double iqr = q3 - q1;
            lo_[c] = q1 - multiplier * iqr;
            hi_[c] = q3 + multiplier * iqr;
        }
    }

    Dataset fit_output(const Dataset& d) const {
        std::vector<int> keep;
        for (std::size_t r = 0; r < d.n_rows; ++r)
            if (!is_outlier_row(d, r)) keep.push_back(static_cast<int>(r));
        if (keep.empty())  // refuse to drop everything
            return d;
        return d.subset_rows(keep);
    }

    Dataset apply(const Dataset& d) const override {
        guard_.check(d, "iqr_remove");
        return d;
    }

    bool is_outlier_row(const Dataset& d, std::size_t r) const {
        for (std::size_t c = 0; c < d.n_cols(); ++c) {
            if (d.columns[c].kind != ColumnKind::continuous || d.is_missing(r, c)) continue;
            const double v = d.cell(r, c);
            if (v < lo_[c] || v > hi_[c]) return true;
        }
        return false;
    }

private:
    SchemaGuard guard_;
    std::vector<double> lo_, hi_;
};

// ── data transformation ─────────────────────────────────────────────

// shift/scale per continuous column: x -> (x - shift) * scale + offset
class AffineTransform final : public Transform {
public:
    enum class Kind { center, standardize, normalize };

    AffineTransform(const Dataset& fit_data, Kind kind, double lo = 0.0, double hi = 1.0) {
        guard_.capture(fit_data);
        const auto n = fit_data.n_cols();
        shift_.assign(n, 0.0);
        scale_.assign(n, 1.0);
        offset_.assign(n, 0.0);
        for (std::size_t c = 0; c < n; ++c) {
            if (fit_data.columns[c].kind != ColumnKind::continuous) continue;
            auto vals = detail::column_values(fit_data, c);
            if (vals.empty()) continue;
            switch (kind) {
                case Kind::center:
                    shift_[c] = mean_of(vals);
                    break;
                case Kind::standardize: {
                    shift_[c] = mean_of(vals);
                    const double sd = sample_std(vals);
                    scale_[c] = sd > 0.0 ? 1.0 / sd : 1.0;
                    break;
                }
                case Kind::normalize: {
                    const auto [mn, mx] = std::minmax_element(vals.begin(), vals.end());
                    shift_[c] = *mn;
                    scale_[c] = *mx > *mn ? (hi - lo) / (*mx - *mn) : 0.0;
                    offset_[c] = lo;
                    break;
                }
            }
        }
    }

    Dataset apply(const Dataset& d) const override {
        guard_.check(d, "transformation");
        Dataset out = d;
        for (std::size_t c = 0; c < out.n_cols(); ++c) {
            if (out.columns[c].kind != ColumnKind::continuous) continue;
            for (std::size_t r = 0; r < out.n_rows; ++r)
                if (!out.is_missing(r, c))
                    out.set_cell(r, c, (out.cell(r, c) - shift_[c]) * scale_[c] + offset_[c]);
        }
        return out;
    }

private:
    SchemaGuard guard_;
    std::vector<double> shift_, scale_, offset_;
};

// ── dimensionality reduction ────────────────────────────────────────

class SelectColumns final : public Transform {
public:
    SelectColumns(const Dataset& fit_data, std::vector<int> cols, std::string who)
        : cols_(std::move(cols)), who_(std::move(who)) {
        guard_.capture(fit_data);
    }

    Dataset apply(const Dataset& d) const override {
        guard_.check(d, who_);
        return d.select_columns(cols_);
    }

    const std::vector<int>& columns() const { return cols_; }

private:
    SchemaGuard guard_;
    std::vector<int> cols_;
    std::string who_;
};

inline std::vector<int> random_column_subset(std::size_t n_cols, double fraction, Rng& rng) {
    auto m = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n_cols)));
    m = std::clamp<std::size_t>(m, 1, n_cols);
    std::vector<int> idx(n_cols);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(m);
    std::sort(idx.begin(), idx.end());
    return idx;
}

// Projection onto the leading principal components covering
// `variance_kept` of the total variance. Rows with missing cells are
// skipped when fitting and come out fully masked when projected.
class PcaTransform final : public Transform {
public:
    PcaTransform(const Dataset& fit_data, double variance_kept) {
        guard_.capture(fit_data);
        const auto d = static_cast<Eigen::Index>(fit_data.n_cols());
        std::vector<std::size_t> complete;
        for (std::size_t r = 0; r < fit_data.n_rows; ++r) {
            bool ok = true;
            for (std::size_t c = 0; c < fit_data.n_cols(); ++c)
                if (fit_data.is_missing(r, c)) { ok = false; break; }
            if (ok) complete.push_back(r);
        }
        if (complete.size() < 2)
            throw ContractError("pca: fewer than 2 complete rows to fit on");

        Eigen::MatrixXd x(static_cast<Eigen::Index>(complete.size()), d);
        for (std::size_t i = 0; i < complete.size(); ++i)
            for (Eigen::Index c = 0; c < d; ++c)
                x(static_cast<Eigen::Index>(i), c) =
                    fit_data.cell(complete[i], static_cast<std::size_t>(c));
        mean_ = x.colwise().mean();
        x.rowwise() -= mean_.transpose();
        Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(complete.size() - 1);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);

        // eigenvalues ascending; walk from the top until enough variance
        const auto& evals = eig.eigenvalues();
        double total = std::max(evals.sum(), 1e-300);
        double acc = 0.0;
        Eigen::Index m = 0;
        for (Eigen::Index i = d - 1; i >= 0; --i) {
            acc += std::max(evals(i), 0.0);
            ++m;
            if (acc / total >= variance_kept - 1e-12) break;
        }
        basis_.resize(d, m);
        for (Eigen::Index j = 0; j < m; ++j) basis_.col(j) = eig.eigenvectors().col(d - 1 - j);
    }

    Dataset apply(const Dataset& d) const override {
        guard_.check(d, "pca");
        const auto m = static_cast<std::size_t>(basis_.cols());
        Dataset out;
        out.name = d.name;
        out.labels = d.labels;
        out.class_names = d.class_names;
        out.row_ids = d.row_ids;
        out.columns.resize(m);
        for (std::size_t j = 0; j < m; ++j)
            out.columns[j] = {"pc" + std::to_string(j), ColumnKind::continuous, {}};
        out.n_rows = d.n_rows;
        out.cells.assign(d.n_rows * m, 0.0);
        out.missing.assign(d.n_rows * m, 0);
        Eigen::VectorXd row(basis_.rows());
        for (std::size_t r = 0; r < d.n_rows; ++r) {
            bool complete = true;
            for (std::size_t c = 0; c < d.n_cols(); ++c)
                if (d.is_missing(r, c)) { complete = false; break; }
            if (!complete) {
                for (std::size_t j = 0; j < m; ++j) out.set_cell(r, j, 0.0, true);
                continue;
            }
            for (std::size_t c = 0; c < d.n_cols(); ++c)
                row(static_cast<Eigen::Index>(c)) = d.cell(r, c) - mean_(static_cast<Eigen::Index>(c));
            Eigen::VectorXd proj = basis_.transpose() * row;
            for (std::size_t j = 0; j < m; ++j) out.set_cell(r, j, proj(static_cast<Eigen::Index>(j)));
        }
        return out;
    }

    // Inverse projection back to the centered input space.
    Eigen::MatrixXd reconstruct(const Dataset& projected) const {
        Eigen::MatrixXd y(static_cast<Eigen::Index>(projected.n_rows), basis_.cols());
        for (std::size_t r = 0; r < projected.n_rows; ++r)
            for (Eigen::Index j = 0; j < basis_.cols(); ++j)
                y(static_cast<Eigen::Index>(r), j) = projected.cell(r, static_cast<std::size_t>(j));
        return y * basis_.transpose();
    }

    Eigen::Index n_components() const { return basis_.cols(); }
    const Eigen::VectorXd& mean() const { return mean_; }

private:
    SchemaGuard guard_;
    Eigen::VectorXd mean_;
    Eigen::MatrixXd basis_;  // d x m
};

inline std::vector<int> correlation_top_columns(const Dataset& d, long long m) {
    std::vector<std::pair<double, int>> scored;
    for (std::size_t c = 0; c < d.n_cols(); ++c) {
        double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
        std::size_t n = 0;
        for (std::size_t r = 0; r < d.n_rows; ++r) {
            if (d.is_missing(r, c)) continue;
            const double x = d.cell(r, c), y = d.labels[r];
            sx += x; sy += y; sxx += x * x; syy += y * y; sxy += x * y;
            ++n;
        }
        double score = 0.0;
        if (n >= 2) {
            const double nn = static_cast<double>(n);
            const double cov = sxy - sx * sy / nn;
            const double vx = sxx - sx * sx / nn, vy = syy - sy * sy / nn;
            if (vx > 0 && vy > 0) score = std::abs(cov / std::sqrt(vx * vy));
        }
        scored.emplace_back(-score, static_cast<int>(c));  // stable: high score, low index first
    }
    std::sort(scored.begin(), scored.end());
    auto keep = std::min<std::size_t>(static_cast<std::size_t>(std::max<long long>(m, 1)),
                                      scored.size());
    std::vector<int> cols;
    for (std::size_t i = 0; i < keep; ++i) cols.push_back(scored[i].second);
    std::sort(cols.begin(), cols.end());
    return cols;
}

// ── sampling (fit-time row selection) ───────────────────────────────

inline std::vector<int> resample_rows(std::size_t n_rows, double fraction, bool replace, Rng& rng) {
    auto m = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n_rows)));
    m = std::clamp<std::size_t>(m, 1, n_rows);
    std::vector<int> rows;
    if (replace) {
        std::uniform_int_distribution<std::size_t> pick(0, n_rows - 1);
        rows.reserve(m);
        for (std::size_t i = 0; i < m; ++i) rows.push_back(static_cast<int>(pick(rng)));
    } else {
        rows.resize(n_rows);
        std::iota(rows.begin(), rows.end(), 0);
        std::shuffle(rows.begin(), rows.end(), rng);
        rows.resize(m);
    }
    std::sort(rows.begin(), rows.end());
    return rows;
}

inline std::vector<int> periodic_rows(std::size_t n_rows, long long interval) {
    std::vector<int> rows;
    for (std::size_t r = 0; r < n_rows; r += static_cast<std::size_t>(std::max<long long>(interval, 1)))
        rows.push_back(static_cast<int>(r));
    return rows;
}

}  // namespace mcpsforge
