#include <catch2/catch_amalgamated.hpp>

#include "mcpsforge/analyze.hpp"

using namespace mcpsforge;

namespace {

std::vector<std::string> full_seq(const std::string& predictor, const std::string& meta,
                                  const std::string& transform = "none") {
    return {"none", "none", transform, "none", "none", predictor, meta};
}

}  // namespace

TEST_CASE("identical sequences have similarity one") {
    auto w = similarity_weights("full");
    auto f = full_seq("knn", "bagging", "standardize");
    REQUIRE(similarity(f, f, w) == 1.0);
}

TEST_CASE("default weight vectors give the hand-derived similarity values") {
    // NEW: W = {2, 1.5}; differ only in the meta-predictor
    auto wn = similarity_weights("new");
    REQUIRE(wn == std::vector<double>{2.0, 1.5});
    const double d_new = similarity({"knn", "bagging"}, {"knn", "adaboostm1"}, wn);
    REQUIRE(d_new == Catch::Approx(1.0 - 1.5 / 3.5).margin(1e-12));

    // FULL: W = {1,1,1,1,1,2,1.5}; differ only in the predictor
    auto wf = similarity_weights("full");
    REQUIRE(wf == std::vector<double>{1, 1, 1, 1, 1, 2, 1.5});
    const double d_full =
        similarity(full_seq("knn", "bagging"), full_seq("tree", "bagging"), wf);
    REQUIRE(d_full == Catch::Approx(1.0 - 2.0 / 8.5).margin(1e-12));
}

TEST_CASE("similarity is symmetric and bounded on random sequences") {
    auto rng = make_rng(17);
    const std::vector<std::string> methods = {"a", "b", "c", "none"};
    std::uniform_int_distribution<std::size_t> pick(0, methods.size() - 1);
    auto w = similarity_weights("full");
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<std::string> f(7), g(7);
        for (auto& m : f) m = methods[pick(rng)];
        for (auto& m : g) m = methods[pick(rng)];
        const double d1 = similarity(f, g, w), d2 = similarity(g, f, w);
        REQUIRE(d1 == d2);
        REQUIRE(d1 >= 0.0);
        REQUIRE(d1 <= 1.0);
        REQUIRE(similarity(f, f, w) == 1.0);
    }
}

TEST_CASE("length mismatch is an analysis error") {
    auto w = similarity_weights("new");
    REQUIRE_THROWS_AS(similarity({"a", "b", "c"}, {"a", "b"}, w), AnalysisError);
}

TEST_CASE("similarity matrix over identical incumbents is all ones") {
    std::vector<AnalyzedRun> runs;
    for (int i = 0; i < 25; ++i)
        runs.push_back({"seed" + std::to_string(i), 0.2, 0.25, full_seq("knn", "bagging")});
    auto m = similarity_matrix(runs, similarity_weights("full"));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j) REQUIRE(m.at(i, j) == 1.0);
    REQUIRE(m.mean_pairwise == 1.0);
    REQUIRE(m.performance_variance == 0.0);
}

TEST_CASE("a two-run matrix carries the pairwise value symmetrically") {
    std::vector<AnalyzedRun> runs = {
        {"a", 0.1, 0.12, full_seq("knn", "bagging")},
        {"b", 0.2, 0.22, full_seq("tree", "bagging")},
    };
    auto m = similarity_matrix(runs, similarity_weights("full"));
    REQUIRE(m.at(0, 1) == Catch::Approx(1.0 - 2.0 / 8.5).margin(1e-12));
    REQUIRE(m.at(1, 0) == m.at(0, 1));
    REQUIRE(m.at(0, 0) == 1.0);
    REQUIRE(m.mean_pairwise == Catch::Approx(1.0 - 2.0 / 8.5));
}

TEST_CASE("complete linkage merges trace the hand-worked example") {
    // 3 leaves with pairwise distances {0.1, 0.9, 0.9}: first merge at
    // 0.1, the final merge at the complete-linkage maximum 0.9
    SimilarityMatrix m;
    m.run_ids = {"x", "y", "z"};
    m.values = {
        1.0, 0.9, 0.1,  //
        0.9, 1.0, 0.1,  //
        0.1, 0.1, 1.0,
    };
    // distances: d(x,y) = 0.1, d(x,z) = 0.9, d(y,z) = 0.9
    auto dendro = cluster(m, {0.1, 0.2, 0.3});
    REQUIRE(dendro.merges.size() == 2);
    REQUIRE(dendro.merges[0].distance == Catch::Approx(0.1));
    REQUIRE(dendro.merges[0].a == 0);
    REQUIRE(dendro.merges[0].b == 1);
    REQUIRE(dendro.merges[1].distance == Catch::Approx(0.9));
    REQUIRE(dendro.merges[1].size == 3);
    // annotation: mean/std of the cv errors underneath
    REQUIRE(dendro.merges[0].cv_mean == Catch::Approx(0.15));
    auto newick = to_newick(dendro);
    REQUIRE(newick.find("z") != std::string::npos);
    REQUIRE(newick.back() == ';');
}

TEST_CASE("all-identical leaves merge at distance zero") {
    std::vector<AnalyzedRun> runs;
    for (int i = 0; i < 6; ++i)
        runs.push_back({"r" + std::to_string(i), 0.1, 0.1, full_seq("knn", "none")});
    auto dendro = cluster(similarity_matrix(runs, similarity_weights("full")));
    REQUIRE(dendro.merges.size() == 5);  // leaves - 1
    for (const auto& merge : dendro.merges) REQUIRE(merge.distance == 0.0);
}

TEST_CASE("complete-linkage merge distances are non-decreasing on random matrices") {
    auto rng = make_rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 3 + static_cast<std::size_t>(trial % 8);
        SimilarityMatrix m;
        m.values.assign(n * n, 1.0);
        for (std::size_t i = 0; i < n; ++i) {
            m.run_ids.push_back("r" + std::to_string(i));
            for (std::size_t j = i + 1; j < n; ++j) {
                const double d = u(rng);
                m.values[i * n + j] = d;
                m.values[j * n + i] = d;
            }
        }
        auto dendro = cluster(m);
        REQUIRE(dendro.merges.size() == n - 1);
        for (std::size_t i = 1; i < dendro.merges.size(); ++i)
            REQUIRE(dendro.merges[i].distance >= dendro.merges[i - 1].distance - 1e-12);
    }
}

TEST_CASE("clustering a single run is an analysis error") {
    std::vector<AnalyzedRun> runs = {{"only", 0.1, 0.1, full_seq("knn", "none")}};
    REQUIRE_THROWS_AS(cluster(similarity_matrix(runs, similarity_weights("full"))),
                      AnalysisError);
}

TEST_CASE("bootstrap with pick=1 estimates the plain mean") {
    std::vector<std::pair<double, double>> records = {
        {0.3, 0.5}, {0.1, 0.4}, {0.2, 0.6}, {0.4, 0.1}};
    auto est = bootstrap(records, 1, 100000, 42);
    const double plain = (0.5 + 0.4 + 0.6 + 0.1) / 4.0;
    REQUIRE(std::abs(est.mean - plain) < 0.005);
    REQUIRE(est.ci_low <= est.mean);
    REQUIRE(est.mean <= est.ci_high);
}

TEST_CASE("bootstrap matches the exhaustive oracle for 3 runs and pick 2") {
    // ordered draws (i,j) in {0,1,2}^2: winner = argmin cv, tie -> lower
    // index; expectation computed by direct enumeration
    std::vector<std::pair<double, double>> records = {{0.3, 0.50}, {0.1, 0.40}, {0.2, 0.60}};
    double expected = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            std::size_t win = records[i].first <= records[j].first ? i : j;
            if (records[i].first == records[j].first) win = std::min(i, j);
            expected += records[win].second / 9.0;
        }
    const long B = 100000;
    auto est = bootstrap(records, 2, B, 7);
    // Monte-Carlo standard error of a bounded metric
    double variance = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            std::size_t win = records[i].first <= records[j].first ? i : j;
            variance += (records[win].second - expected) * (records[win].second - expected) / 9.0;
        }
    const double se = std::sqrt(variance / static_cast<double>(B));
    REQUIRE(std::abs(est.mean - expected) < 3.0 * se + 1e-12);
    REQUIRE(std::abs(est.mean - expected) < 0.005);
}

TEST_CASE("bootstrap is deterministic per seed and supports without-replacement draws") {
    std::vector<std::pair<double, double>> records = {
        {0.3, 0.5}, {0.1, 0.4}, {0.2, 0.6}, {0.4, 0.1}, {0.15, 0.3}};
    auto a = bootstrap(records, 4, 20000, 9);
    auto b = bootstrap(records, 4, 20000, 9);
    REQUIRE(a.mean == b.mean);
    REQUIRE(a.ci_low == b.ci_low);
    auto c = bootstrap(records, 4, 20000, 9, false);
    REQUIRE(std::isfinite(c.mean));
    REQUIRE_THROWS_AS(bootstrap(records, 6, 100, 0, false), AnalysisError);
}

TEST_CASE("doubling the sample count shrinks the Monte-Carlo error") {
    // convergence on the 3-run oracle case: average absolute deviation
    // from the exact expectation over a family of seeds roughly halves
    // in variance terms when B doubles (allowing generous slack)
    std::vector<std::pair<double, double>> records = {{0.3, 0.50}, {0.1, 0.40}, {0.2, 0.60}};
    double expected = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            std::size_t win = records[i].first <= records[j].first ? i : j;
            expected += records[win].second / 9.0;
        }
    auto mse_at = [&](long B) {
        double acc = 0.0;
        const int reps = 30;
        for (int s = 0; s < reps; ++s) {
            auto est = bootstrap(records, 2, B, static_cast<std::uint64_t>(1000 + s));
            acc += (est.mean - expected) * (est.mean - expected);
        }
        return acc / reps;
    };
    const double coarse = mse_at(2000), fine = mse_at(4000);
    REQUIRE(fine < coarse * 0.9);  // expect ~0.5, allow sampling slack
}

TEST_CASE("trajectory value is a left step function") {
    Trajectory traj = {{1.0, 0.5}, {2.0, 0.3}};
    REQUIRE(trajectory_at(traj, 0.5) == 1.0);  // before the first point
    REQUIRE(trajectory_at(traj, 1.0) == 0.5);
    REQUIRE(trajectory_at(traj, 1.5) == 0.5);
    REQUIRE(trajectory_at(traj, 2.0) == 0.3);
    REQUIRE(trajectory_at(traj, 99.0) == 0.3);
}

TEST_CASE("a single run's envelope is the run itself") {
    Trajectory traj = {{0.5, 0.6}, {1.5, 0.2}};
    auto env = trajectory_envelope({traj}, 16);
    for (std::size_t i = 0; i < env.grid.size(); ++i) {
        const double v = trajectory_at(traj, env.grid[i]);
        REQUIRE(env.low[i] == v);
        REQUIRE(env.median[i] == v);
        REQUIRE(env.high[i] == v);
    }
}

TEST_CASE("envelope medians are non-increasing") {
    auto rng = make_rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Trajectory> runs;
    for (int r = 0; r < 9; ++r) {
        Trajectory traj;
        double best = 1.0, t = 0.0;
        for (int i = 0; i < 12; ++i) {
            t += u(rng);
            best *= u(rng);
            traj.push_back({t, best});
        }
        runs.push_back(std::move(traj));
    }
    auto env = trajectory_envelope(runs, 64);
    for (std::size_t i = 1; i < env.median.size(); ++i) {
        REQUIRE(env.median[i] <= env.median[i - 1] + 1e-12);
        REQUIRE(env.low[i] <= env.low[i - 1] + 1e-12);
        REQUIRE(env.high[i] <= env.high[i - 1] + 1e-12);
    }
}
