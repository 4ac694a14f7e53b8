#include <doctest.h>

#include <wmf/errors.hpp>
#include <wmf/glm.hpp>
#include <wmf/rng.hpp>
#include <wmf/simulate.hpp>

#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>

using namespace wmf;

namespace {

GlmDataset logistic_instance(int n, int p, const std::vector<double>& beta,
                             std::uint64_t seed) {
    Rng rng(seed);
    GlmDataset d;
    d.X = oracle::random_matrix(n, p, rng);
    Vector b = Vector::Zero(p);
    for (size_t j = 0; j < beta.size(); ++j) b[static_cast<int>(j)] = beta[j];
    const Vector eta = d.X * b;
    d.y.resize(n);
    for (int i = 0; i < n; ++i) {
        const double prob = 1.0 / (1.0 + std::exp(-eta[i]));
        d.y[i] = (rng.uniform01() < prob) ? 1.0 : 0.0;
    }
    return d;
}

double logistic_deviance_at(const GlmDataset& d, double b0, const Vector& slopes) {
    double dev = 0.0;
    for (int i = 0; i < d.n(); ++i) {
        const double eta = b0 + d.X.row(i).dot(slopes);
        const double log1pe = (eta > 30) ? eta : std::log1p(std::exp(eta));
        dev += 2.0 * (log1pe - d.y[i] * eta);
    }
    return dev;
}

}  // namespace

TEST_CASE("sis_screen keeps everything when d_n = p") {
    Rng rng(7);
    const Matrix X = oracle::random_matrix(50, 6, rng);
    Vector y = X.col(2);
    const ScreenResult r = sis_screen(X, y, 6);
    CHECK(r.kept.size() == 6);
    CHECK(r.kept.front() == 2);  // perfect correlation ranks first
}

TEST_CASE("sis_screen ranking matches the correlation oracle") {
    Rng rng(13);
    const Matrix X = oracle::random_matrix(40, 5, rng);
    Vector y = 2.0 * X.col(1) - X.col(4);
    for (int i = 0; i < 40; ++i) y[i] += 0.5 * rng.normal();

    const ScreenResult r = sis_screen(X, y, 3);
    std::vector<std::pair<double, int>> ranked;
    for (int j = 0; j < 5; ++j)
        ranked.emplace_back(-std::abs(oracle::pearson(X.col(j), y)), j);
    std::stable_sort(ranked.begin(), ranked.end());
    for (int k = 0; k < 3; ++k) CHECK(r.kept[k] == ranked[k].second);
    for (int j = 0; j < 5; ++j)
        CHECK(r.scores[j] ==
              doctest::Approx(std::abs(oracle::pearson(X.col(j), y))).epsilon(1e-10));
}

TEST_CASE("sis_screen scores constant columns zero and keeps min(d_n, p)") {
    Rng rng(19);
    Matrix X = oracle::random_matrix(30, 4, rng);
    X.col(2).setConstant(3.0);
    Vector y = X.col(0);
    const ScreenResult r = sis_screen(X, y, 10);
    CHECK(r.kept.size() == 4);  // min(d_n, p)
    CHECK(r.scores[2] == 0.0);
    CHECK(r.kept.back() == 2);  // zero score sinks to the bottom
}

TEST_CASE("sis retention: true variables survive screening at p = 2n") {
    int survived = 0;
    for (int run = 0; run < 50; ++run) {
        const int n = 200, p = 400;
        Rng rng(9000 + run);
        Matrix X(n, p);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < p; ++j) X(i, j) = rng.normal();
        Vector y = 2.0 * X.col(0) + 2.5 * X.col(1) + 3.0 * X.col(2);
        for (int i = 0; i < n; ++i) y[i] += rng.normal();
        const ScreenResult r = sis_screen(X, y, default_dn(n));
        const bool all = std::count(r.kept.begin(), r.kept.end(), 0) &&
                         std::count(r.kept.begin(), r.kept.end(), 1) &&
                         std::count(r.kept.begin(), r.kept.end(), 2);
        if (all) ++survived;
    }
    CHECK(survived >= 48);  // scaled-down version of the 95/100 criterion
}

TEST_CASE("logistic_mle: intercept-only closed form") {
    GlmDataset d;
    d.X.resize(12, 0);
    d.y = Vector::Zero(12);
    for (int i = 0; i < 3; ++i) d.y[i] = 1.0;  // ybar = 1/4
    const CoefficientVector fit = logistic_mle(d);
    REQUIRE(fit.intercept.has_value());
    CHECK(*fit.intercept == doctest::Approx(std::log(0.25 / 0.75)).epsilon(1e-8));
}

TEST_CASE("logistic_mle matches the explicit-inverse Newton oracle") {
    const GlmDataset d = logistic_instance(80, 3, {1.0, -0.7}, 23);
    const CoefficientVector fit = logistic_mle(d);
    const Vector ref = oracle::logistic_newton(d.X, d.y);
    REQUIRE(fit.intercept.has_value());
    CHECK(std::abs(*fit.intercept - ref[0]) < 1e-6);
    for (int j = 0; j < 3; ++j) CHECK(std::abs(fit.values[j] - ref[j + 1]) < 1e-6);
}

TEST_CASE("logistic_mle null-model slopes concentrate near zero") {
    int ok = 0;
    for (int run = 0; run < 100; ++run) {
        GlmDataset d = logistic_instance(400, 2, {}, 700 + run);  // y independent of X
        const CoefficientVector fit = logistic_mle(d);
        if (fit.values.cwiseAbs().maxCoeff() < 0.3) ++ok;
    }
    CHECK(ok >= 95);
}

TEST_CASE("logistic_mle flags separable data") {
    GlmDataset d;
    d.X.resize(20, 1);
    d.y.resize(20);
    for (int i = 0; i < 20; ++i) {
        d.X(i, 0) = i - 10 + 0.5;
        d.y[i] = (d.X(i, 0) > 0) ? 1.0 : 0.0;  // perfectly separated
    }
    CHECK_THROWS_AS(logistic_mle(d), Separation);
    // the ridge-stabilized variant stays finite on the same data
    const CoefficientVector ridge = logistic_ridge(d, 1e-2);
    CHECK(std::isfinite(ridge.values[0]));
}

TEST_CASE("glm path: entry lambda, unpenalized limit, deviance monotone") {
    const GlmDataset d = logistic_instance(150, 5, {1.5, -1.0}, 31);
    const Vector w = Vector::Ones(5);
    const auto grid = glm_lambda_grid(d, w);
    REQUIRE(grid.size() == 100);
    for (size_t k = 1; k < grid.size(); ++k) CHECK(grid[k] < grid[k - 1]);

    const SolutionPath path = logistic_adaptive_lasso_path(d, w, grid);
    REQUIRE(!path.points.empty());
    CHECK(path.points.front().active_set.empty());  // all-zero slopes at lambda_max

    // lambda -> 0 approaches the MLE
    Vector tiny_grid_beta = path.points.back().coefficients;
    const CoefficientVector mle = logistic_mle(d);
    CHECK((tiny_grid_beta - mle.values).lpNorm<Eigen::Infinity>() < 5e-2);

    double prev = std::numeric_limits<double>::infinity();
    for (const auto& pt : path.points) {
        const double dev = logistic_deviance_at(d, pt.intercept, pt.coefficients);
        CHECK(dev <= prev + 1e-8);
        prev = dev;
    }
}

TEST_CASE("glm path solutions satisfy the penalized-likelihood KKT conditions") {
    const GlmDataset d = logistic_instance(120, 4, {1.2, -0.8}, 41);
    Vector w(4);
    w << 1.0, 0.7, 1.3, 2.0;
    const auto grid = glm_lambda_grid(d, w);
    const SolutionPath path = logistic_adaptive_lasso_path(d, w, grid);
    const double lmax = grid.front();
    for (const auto& pt : path.points) {
        // gradient of the negative log-likelihood at the knot
        Vector prob(d.n());
        for (int i = 0; i < d.n(); ++i) {
            const double eta = pt.intercept + d.X.row(i).dot(pt.coefficients);
            prob[i] = 1.0 / (1.0 + std::exp(-eta));
        }
        const Vector g = d.X.transpose() * (d.y - prob);
        CHECK(std::abs((d.y - prob).sum()) < 1e-6 * std::max(1.0, lmax));
        for (int j = 0; j < 4; ++j) {
            if (pt.coefficients[j] != 0.0) {
                const double target =
                    pt.lambda * w[j] * (pt.coefficients[j] > 0 ? 1.0 : -1.0);
                CHECK(std::abs(g[j] - target) < 1e-6 * std::max(1.0, lmax));
            } else {
                CHECK(std::abs(g[j]) <= pt.lambda * w[j] + 1e-6 * std::max(1.0, lmax));
            }
        }
    }
}

TEST_CASE("glm_mcv: perfect classifier, intercept-only oracle, rate bounds") {
    // far-separated signal through one column
    GlmDataset d;
    d.X.resize(60, 2);
    Rng rng(47);
    for (int i = 0; i < 60; ++i) {
        d.X(i, 0) = (i % 2 == 0) ? 5.0 + rng.uniform01() : -5.0 - rng.uniform01();
        d.X(i, 1) = rng.normal();
    }
    d.y.resize(60);
    for (int i = 0; i < 60; ++i) d.y[i] = (d.X(i, 0) > 0) ? 1.0 : 0.0;
    const double miss = glm_mcv(d, {0}, 5, "misclass", 3);
    CHECK(miss == 0.0);

    const GlmDataset noisy = logistic_instance(100, 3, {0.8}, 53);
    const double rate = glm_mcv(noisy, {0, 1}, 5, "misclass", 7);
    CHECK(rate >= 0.0);
    CHECK(rate <= 1.0);
    CHECK(glm_mcv(noisy, {0, 1}, 5, "deviance", 7) >= 0.0);

    // intercept-only deviance against the closed-form fold loop
    const std::uint64_t seed = 11;
    const int K = 4;
    const double ours = glm_mcv(noisy, {}, K, "deviance", seed);
    const auto fold = make_folds(noisy.n(), K, seed);
    double total = 0.0;
    for (int f = 0; f < K; ++f) {
        double train_sum = 0.0;
        int train_n = 0;
        for (int i = 0; i < noisy.n(); ++i)
            if (fold[i] != f) {
                train_sum += noisy.y[i];
                ++train_n;
            }
        const double pbar =
            std::min(1.0 - 1e-12, std::max(1e-12, train_sum / train_n));
        for (int i = 0; i < noisy.n(); ++i)
            if (fold[i] == f)
                total += -2.0 * (noisy.y[i] * std::log(pbar) +
                                 (1.0 - noisy.y[i]) * std::log1p(-pbar));
    }
    CHECK(ours == doctest::Approx(total / noisy.n()).epsilon(1e-9));
}

TEST_CASE("glm_wmf_select: strong signal recovers the support, deterministic") {
    const ScenarioSpec spec = make_scenario(0);
    GlmDataset d = generate_glm_scenario(spec, 400, 2024);
    CvConfig cfg;
    cfg.K = 5;
    const SelectionResult a = glm_wmf_select(d, 30, cfg, 17);
    const SelectionResult b = glm_wmf_select(d, 30, cfg, 17);
    CHECK(a.dimension == b.dimension);
    CHECK(a.model == b.model);
    CHECK(a.method == "glm-wmf");

    // amplified coefficients drive the Bayes error toward zero
    GlmDataset loud = logistic_instance(600, 6, {6.0, -6.0, 6.0}, 67);
    const SelectionResult r = glm_wmf_select(loud, 25, cfg, 5);
    CHECK(r.model == IndexSet{0, 1, 2});
}

TEST_CASE("classify applies a strict threshold") {
    Vector prob(4);
    prob << 0.2, 0.7, 0.5, 1.0;
    const std::vector<int> out = classify(prob, 0.5);
    CHECK(out == std::vector<int>{0, 1, 0, 1});
    const std::vector<int> all_ones = classify(Vector::Ones(3), 0.5);
    CHECK(all_ones == std::vector<int>{1, 1, 1});
}

TEST_CASE("default_dn follows floor(n / log n)") {
    CHECK(default_dn(200) == static_cast<int>(200.0 / std::log(200.0)));
    CHECK(default_dn(1000) == static_cast<int>(1000.0 / std::log(1000.0)));
}
