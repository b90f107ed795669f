#pragma once

#include "mcpsforge/optimize.hpp"

namespace mcpsforge {

// ── weighted Hamming similarity ─────────────────────────────────────
//
// d(F,G) = 1 - sum(w_i * delta_i) / sum(w_i), delta_i = 0 iff the method
// ids at position i match. Preprocessing positions weigh 1, the predictor
// 2 and the meta-predictor 1.5.

inline std::vector<double> similarity_weights(const std::string& space_name) {
    if (space_name == "new") return {2.0, 1.5};
    if (space_name == "full") return {1.0, 1.0, 1.0, 1.0, 1.0, 2.0, 1.5};
    throw AnalysisError("no similarity weights for space '" + space_name + "'");
}

inline double similarity(const std::vector<std::string>& f, const std::vector<std::string>& g,
                         const std::vector<double>& w) {
    if (f.size() != g.size() || f.size() != w.size())
        throw AnalysisError("similarity needs equal-length sequences and weights (got " +
                            std::to_string(f.size()) + ", " + std::to_string(g.size()) + ", " +
                            std::to_string(w.size()) + ")");
    double hit = 0.0, total = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        total += w[i];
        if (f[i] != g[i]) hit += w[i];
    }
    if (total <= 0.0) throw AnalysisError("similarity weights must have positive mass");
    return 1.0 - hit / total;
}

// one feasible run, reduced to what the post-hoc analyses need
struct AnalyzedRun {
    std::string id;
    double cv_error = 0.0;
    double holdout_error = 0.0;
    std::vector<std::string> sequence;  // slot-aligned method ids
};

struct SimilarityMatrix {
    std::vector<std::string> run_ids;
    std::vector<double> values;  // row-major n*n
    std::vector<double> weights;
    double mean_pairwise = 1.0;       // average over i < j
    double performance_variance = 0.0;  // sample variance of holdout errors

    std::size_t size() const { return run_ids.size(); }
    double at(std::size_t i, std::size_t j) const { return values[i * size() + j]; }
};

inline SimilarityMatrix similarity_matrix(const std::vector<AnalyzedRun>& runs,
                                          const std::vector<double>& weights) {
    if (runs.empty()) throw AnalysisError("similarity matrix needs at least one run");
    SimilarityMatrix m;
    m.weights = weights;
    const std::size_t n = runs.size();
    m.values.assign(n * n, 1.0);
    std::vector<double> holdouts;
    for (const auto& r : runs) {
        m.run_ids.push_back(r.id);
        holdouts.push_back(r.holdout_error);
    }
    double pair_sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            const double d = similarity(runs[i].sequence, runs[j].sequence, weights);
            m.values[i * n + j] = d;
            m.values[j * n + i] = d;
            if (j > i) {
                pair_sum += d;
                pairs++;
            }
        }
    m.mean_pairwise = pairs > 0 ? pair_sum / static_cast<double>(pairs) : 1.0;
    m.performance_variance = sample_variance(holdouts);
    return m;
}

// ── complete-linkage hierarchical clustering ────────────────────────

struct Dendrogram {
    struct Merge {
        int a = 0, b = 0;       // cluster ids: < n are leaves, >= n internal
        double distance = 0.0;  // complete-linkage merge distance (1 - d)
        int size = 0;           // leaves under the merged cluster
        double cv_mean = 0.0, cv_std = 0.0;  // error stats over member runs
    };
    std::vector<std::string> leaves;
    std::vector<Merge> merges;
};

inline Dendrogram cluster(const SimilarityMatrix& matrix,
                          const std::vector<double>& cv_errors = {}) {
    const std::size_t n = matrix.size();
    if (n < 2) throw AnalysisError("clustering needs at least 2 runs");
    if (!cv_errors.empty() && cv_errors.size() != n)
        throw AnalysisError("cv error annotation length mismatch");

    Dendrogram dendro;
    dendro.leaves = matrix.run_ids;

    struct Cluster {
        int id;
        std::vector<int> members;  // leaf indices
    };
    std::vector<Cluster> active;
    for (std::size_t i = 0; i < n; ++i) active.push_back({static_cast<int>(i), {static_cast<int>(i)}});
    int next_id = static_cast<int>(n);

    auto linkage = [&](const Cluster& x, const Cluster& y) {
        double worst = 0.0;
        for (int a : x.members)
            for (int b : y.members)
                worst = std::max(worst, 1.0 - matrix.at(static_cast<std::size_t>(a),
                                                        static_cast<std::size_t>(b)));
        return worst;
    };

    while (active.size() > 1) {
        std::size_t bi = 0, bj = 1;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < active.size(); ++i)
            for (std::size_t j = i + 1; j < active.size(); ++j) {
                const double d = linkage(active[i], active[j]);
                if (d < best - 1e-15) {
                    best = d;
                    bi = i;
                    bj = j;
                }
            }
        Dendrogram::Merge merge;
        merge.a = active[bi].id;
        merge.b = active[bj].id;
        merge.distance = best;
        Cluster joined;
        joined.id = next_id++;
        joined.members = active[bi].members;
        joined.members.insert(joined.members.end(), active[bj].members.begin(),
                              active[bj].members.end());
        merge.size = static_cast<int>(joined.members.size());
        if (!cv_errors.empty()) {
            std::vector<double> errs;
            for (int leaf : joined.members) errs.push_back(cv_errors[static_cast<std::size_t>(leaf)]);
            merge.cv_mean = mean_of(errs);
            merge.cv_std = sample_std(errs);
        }
        dendro.merges.push_back(merge);
        active.erase(active.begin() + static_cast<long>(bj));
        active.erase(active.begin() + static_cast<long>(bi));
        active.push_back(std::move(joined));
    }
    return dendro;
}

// Newick text; children ordered smaller-cluster-first, branch lengths are
// height differences between parent and child merges.
inline std::string to_newick(const Dendrogram& dendro) {
    const auto n = dendro.leaves.size();
    std::function<std::pair<std::string, double>(int)> render =
        [&](int id) -> std::pair<std::string, double> {
        if (id < static_cast<int>(n)) return {dendro.leaves[static_cast<std::size_t>(id)], 0.0};
        const auto& merge = dendro.merges[static_cast<std::size_t>(id) - n];
        auto left = render(merge.a);
        auto right = render(merge.b);
        const auto size_of = [&](int child) {
            return child < static_cast<int>(n)
                       ? 1
                       : dendro.merges[static_cast<std::size_t>(child) - n].size;
        };
        if (size_of(merge.a) > size_of(merge.b)) std::swap(left, right);
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6f", std::max(merge.distance - left.second, 0.0));
        std::string a = left.first + ":" + buf;
        std::snprintf(buf, sizeof buf, "%.6f", std::max(merge.distance - right.second, 0.0));
        std::string b = right.first + ":" + buf;
        return {"(" + a + "," + b + ")", merge.distance};
    };
    if (dendro.merges.empty()) return dendro.leaves.empty() ? ";" : dendro.leaves[0] + ";";
    return render(static_cast<int>(n + dendro.merges.size() - 1)).first + ";";
}

// ── bootstrap estimator ─────────────────────────────────────────────
//
// B times: draw `pick` runs (with replacement by default), keep the one
// with the lowest cv error (ties: lowest run index), record its metric.
// Returns the mean with 2.5/97.5 percentile bounds.

struct BootstrapEstimate {
    double mean = 0.0;
    double ci_low = 0.0, ci_high = 0.0;
    long samples = 0;  // B
    int pick = 0;
};

inline BootstrapEstimate bootstrap(const std::vector<std::pair<double, double>>& records,
                                   int pick, long samples, std::uint64_t seed,
                                   bool with_replacement = true) {
    if (records.empty()) throw AnalysisError("bootstrap needs at least one run");
    if (pick < 1) throw AnalysisError("bootstrap pick must be at least 1");
    const std::size_t n = records.size();
    if (!with_replacement && static_cast<std::size_t>(pick) > n)
        throw AnalysisError("cannot draw " + std::to_string(pick) + " distinct runs from " +
                            std::to_string(n));

    auto rng = make_rng(seed, "bootstrap");
    std::uniform_int_distribution<std::size_t> draw(0, n - 1);
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), 0);

    std::vector<double> picked;
    picked.reserve(static_cast<std::size_t>(samples));
    double sum = 0.0;
    for (long b = 0; b < samples; ++b) {
        std::size_t winner = n;
        if (with_replacement) {
            for (int p = 0; p < pick; ++p) {
                const auto idx = draw(rng);
                if (winner == n || records[idx].first < records[winner].first ||
                    (records[idx].first == records[winner].first && idx < winner))
                    winner = idx;
            }
        } else {
            for (int p = 0; p < pick; ++p) {  // partial Fisher-Yates
                std::uniform_int_distribution<std::size_t> rest(static_cast<std::size_t>(p), n - 1);
                std::swap(pool[static_cast<std::size_t>(p)], pool[rest(rng)]);
                const auto idx = pool[static_cast<std::size_t>(p)];
                if (winner == n || records[idx].first < records[winner].first ||
                    (records[idx].first == records[winner].first && idx < winner))
                    winner = idx;
            }
        }
        picked.push_back(records[winner].second);
        sum += records[winner].second;
    }
    BootstrapEstimate est;
    est.samples = samples;
    est.pick = pick;
    est.mean = sum / static_cast<double>(samples);
    std::sort(picked.begin(), picked.end());
    est.ci_low = quantile_sorted(picked, 0.025);
    est.ci_high = quantile_sorted(picked, 0.975);
    return est;
}

// ── trajectory analysis ─────────────────────────────────────────────

// best-so-far value at time t: last improvement at or before t, worst
// possible before the first one
inline double trajectory_at(const Trajectory& traj, double t) {
    double value = kPenaltyError;
    for (const auto& point : traj) {
        if (point.wall_time > t) break;
        value = point.best_cv_error;
    }
    return value;
}

struct TrajectoryEnvelope {
    std::vector<double> grid;
    std::vector<double> low, median, high;  // pointwise over runs
};

inline TrajectoryEnvelope trajectory_envelope(const std::vector<Trajectory>& runs,
                                              std::size_t grid_points = 128) {
    if (runs.empty()) throw AnalysisError("trajectory envelope needs at least one run");
    double t_max = 0.0;
    for (const auto& traj : runs)
        if (!traj.empty()) t_max = std::max(t_max, traj.back().wall_time);
    if (t_max <= 0.0) t_max = 1.0;

    TrajectoryEnvelope env;
    for (std::size_t i = 0; i < grid_points; ++i) {
        const double t = t_max * static_cast<double>(i) / static_cast<double>(grid_points - 1);
        env.grid.push_back(t);
        std::vector<double> values;
        values.reserve(runs.size());
        for (const auto& traj : runs) values.push_back(trajectory_at(traj, t));
        std::sort(values.begin(), values.end());
        env.low.push_back(values.front());
        env.high.push_back(values.back());
        env.median.push_back(quantile_sorted(values, 0.5));
    }
    return env;
}

}  // namespace mcpsforge
