#include <doctest.h>

#include <wmf/rng.hpp>
#include <wmf/selection.hpp>
#include <wmf/simulate.hpp>

#include "support/oracles.hpp"

#include <cmath>
#include <set>

using namespace wmf;

TEST_CASE("scenario_dims reproduces the reference dimension table") {
    struct Row {
        int id, n, p, p0;
    };
    const Row rows[] = {
        {1, 100, 10, 3},  {1, 300, 10, 3},  {1, 500, 10, 3},
        {2, 100, 10, 3},  {2, 300, 17, 8},  {2, 500, 22, 13},
        {3, 100, 32, 3},  {3, 300, 72, 8},  {3, 500, 106, 13},
        {4, 100, 10, 3},  {4, 300, 17, 6},  {4, 500, 22, 9},
        {5, 100, 32, 6},  {5, 300, 72, 9},  {5, 500, 106, 12},
        {6, 100, 32, 6},  {6, 300, 72, 9},  {6, 500, 106, 12},
    };
    for (const Row& r : rows) {
        const ScenarioDims d = scenario_dims(make_scenario(r.id), r.n);
        CAPTURE(r.id);
        CAPTURE(r.n);
        CHECK(d.p == r.p);
        CHECK(d.p0 == r.p0);
        CHECK(d.beta.size() == r.p);
        int nz = 0;
        for (int j = 0; j < d.beta.size(); ++j)
            if (d.beta[j] != 0.0) ++nz;
        CHECK(nz == r.p0);
    }
}

TEST_CASE("scenario 1 base pattern and population signal-to-noise") {
    const ScenarioSpec spec = make_scenario(1);
    const ScenarioDims d = scenario_dims(spec, 300);
    REQUIRE(d.p == 10);
    CHECK(d.beta[0] == 3.0);
    CHECK(d.beta[1] == 1.5);
    CHECK(d.beta[2] == 0.0);
    CHECK(d.beta[3] == 0.0);
    CHECK(d.beta[4] == 2.0);

    // quadratic form beta' Sigma beta / sigma^2 with Sigma_ij = 0.3^|i-j|
    double quad = 0.0;
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j)
            quad += d.beta[i] * d.beta[j] * std::pow(0.3, std::abs(i - j));
    const double snr = quad / (spec.sigma * spec.sigma);
    CHECK(snr == doctest::Approx(2.02).epsilon(0.005));
}

TEST_CASE("generate_scenario: noiseless limit and recorded truth") {
    ScenarioSpec spec = make_scenario(1);
    spec.sigma = 0.0;
    const Dataset d = generate_scenario(spec, 120, 7);
    REQUIRE(d.truth.has_value());
    const ScenarioDims dims = scenario_dims(spec, 120);
    CHECK((d.y - d.X * dims.beta).lpNorm<Eigen::Infinity>() < 1e-12);
    IndexSet expected;
    for (int j = 0; j < dims.beta.size(); ++j)
        if (dims.beta[j] != 0.0) expected.push_back(j);
    CHECK(*d.truth == expected);
}

TEST_CASE("generated columns carry the AR covariance") {
    const ScenarioSpec spec = make_scenario(1);
    const int n = 20000;
    const Dataset d = generate_scenario(spec, n, 99);
    for (int a = 0; a < 5; ++a) {
        for (int b = a; b < 5; ++b) {
            const double cov =
                (d.X.col(a).array() - d.X.col(a).mean())
                    .cwiseProduct(d.X.col(b).array() - d.X.col(b).mean())
                    .sum() /
                (n - 1);
            CHECK(cov == doctest::Approx(std::pow(0.3, b - a)).epsilon(0.1));
            CHECK(std::abs(cov - std::pow(0.3, b - a)) < 0.03);
        }
    }
}

TEST_CASE("scenario 6 blocks: near-1 within, near-0 between") {
    const ScenarioSpec spec = make_scenario(6);
    const Dataset d = generate_scenario(spec, 500, 11);
    REQUIRE(d.p() == 106);
    const double within = oracle::pearson(d.X.col(0), d.X.col(1));
    const double within2 = oracle::pearson(d.X.col(3), d.X.col(5));
    const double between = oracle::pearson(d.X.col(0), d.X.col(4));
    CHECK(within > 0.95);
    CHECK(within2 > 0.95);
    CHECK(std::abs(between) < 0.1);
}

TEST_CASE("glm example reuses the scenario-1 design through the logit link") {
    const ScenarioSpec spec = make_scenario(0);
    CHECK(spec.logistic);
    const GlmDataset d = generate_glm_scenario(spec, 200, 5);
    CHECK(d.p() == 10);
    std::set<double> values(d.y.data(), d.y.data() + d.y.size());
    for (double v : values) CHECK((v == 0.0 || v == 1.0));
    CHECK(values.size() == 2);
}

TEST_CASE("compute_metrics arithmetic") {
    const IndexSet truth = {0, 1, 4};
    std::vector<IndexSet> perfect(8, truth);
    const MetricsSummary m = compute_metrics(perfect, truth);
    CHECK(m.proportion_correct == 1.0);
    CHECK(m.avg_false_nonzeros == 0.0);
    CHECK(m.avg_false_zeros == 0.0);
    CHECK(m.avg_model_size == 3.0);

    std::vector<IndexSet> extra(4, IndexSet{0, 1, 2, 4});
    const MetricsSummary me = compute_metrics(extra, truth);
    CHECK(me.proportion_correct == 0.0);
    CHECK(me.avg_false_nonzeros == 1.0);
    CHECK(me.avg_false_zeros == 0.0);
    CHECK(me.avg_model_size == 4.0);
}

TEST_CASE("compute_metrics matches a set-arithmetic oracle on random selections") {
    Rng rng(31);
    const IndexSet truth = {1, 3, 5};
    std::vector<IndexSet> selections;
    for (int r = 0; r < 40; ++r) {
        IndexSet s;
        for (int j = 0; j < 8; ++j)
            if (rng.uniform01() < 0.4) s.push_back(j);
        if (s.empty()) s.push_back(0);
        selections.push_back(s);
    }
    const MetricsSummary m = compute_metrics(selections, truth);

    double fn = 0, fz = 0, size = 0;
    int exact = 0;
    for (const auto& s : selections) {
        std::set<int> sel(s.begin(), s.end()), tr(truth.begin(), truth.end());
        int extra = 0, missing = 0;
        for (int j : sel)
            if (!tr.count(j)) ++extra;
        for (int j : tr)
            if (!sel.count(j)) ++missing;
        fn += extra;
        fz += missing;
        size += s.size();
        if (extra == 0 && missing == 0) ++exact;
    }
    const double R = selections.size();
    CHECK(m.avg_false_nonzeros == doctest::Approx(fn / R).epsilon(1e-12));
    CHECK(m.avg_false_zeros == doctest::Approx(fz / R).epsilon(1e-12));
    CHECK(m.avg_model_size == doctest::Approx(size / R).epsilon(1e-12));
    CHECK(m.proportion_correct == doctest::Approx(exact / R).epsilon(1e-12));

    // identity: avg size = p0 + FN - FZ
    CHECK(m.avg_model_size ==
          doctest::Approx(3.0 + m.avg_false_nonzeros - m.avg_false_zeros)
              .epsilon(1e-12));
}

TEST_CASE("run_replications: degenerate aggregation and determinism") {
    const ScenarioSpec spec = make_scenario(1);
    HarnessConfig cfg;
    cfg.penalty = PenaltySpec{PenaltyScheme::alasso, 1.0, 0.0};
    cfg.scheme = BootstrapScheme{BootstrapScheme::Kind::paired, {}};
    cfg.B = 15;
    cfg.cv.K = 5;

    const auto one = run_replications(spec, {"bic"}, {100}, 1, 42, cfg);
    REQUIRE(one.size() == 1);
    CHECK(one[0].replications == 1);
    CHECK(one[0].method == "bic");
    CHECK(one[0].n == 100);
    CHECK(one[0].scenario == 1);
    // single run: metrics are those of one selection
    CHECK((one[0].proportion_correct == 0.0 || one[0].proportion_correct == 1.0));

    const auto a = run_replications(spec, {"bic", "mf"}, {100}, 3, 42, cfg);
    const auto b = run_replications(spec, {"bic", "mf"}, {100}, 3, 42, cfg);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].proportion_correct == b[i].proportion_correct);
        CHECK(a[i].avg_model_size == b[i].avg_model_size);
        CHECK(a[i].completed == b[i].completed);
    }
}

TEST_CASE("run_replications is invariant to the thread count") {
    const ScenarioSpec spec = make_scenario(1);
    HarnessConfig cfg;
    cfg.penalty = PenaltySpec{PenaltyScheme::alasso, 1.0, 0.0};
    cfg.scheme = BootstrapScheme{BootstrapScheme::Kind::paired, {}};
    cfg.B = 10;
    cfg.cv.K = 5;
    cfg.threads = 1;
    const auto seq = run_replications(spec, {"wmf"}, {100}, 4, 7, cfg);
    cfg.threads = 3;
    const auto par = run_replications(spec, {"wmf"}, {100}, 4, 7, cfg);
    REQUIRE(seq.size() == par.size());
    for (size_t i = 0; i < seq.size(); ++i) {
        CHECK(seq[i].proportion_correct == par[i].proportion_correct);
        CHECK(seq[i].avg_false_nonzeros == par[i].avg_false_nonzeros);
        CHECK(seq[i].avg_false_zeros == par[i].avg_false_zeros);
        CHECK(seq[i].avg_model_size == par[i].avg_model_size);
    }
}

TEST_CASE("metrics identity holds on harness output") {
    const ScenarioSpec spec = make_scenario(1);
    HarnessConfig cfg;
    cfg.penalty = PenaltySpec{PenaltyScheme::alasso, 1.0, 0.0};
    cfg.scheme = BootstrapScheme{BootstrapScheme::Kind::paired, {}};
    cfg.B = 10;
    cfg.cv.K = 5;
    const auto out = run_replications(spec, {"bic", "cp"}, {100}, 5, 99, cfg);
    const ScenarioDims dims = scenario_dims(spec, 100);
    for (const auto& m : out) {
        if (m.completed == 0) continue;
        CHECK(m.avg_model_size ==
              doctest::Approx(dims.p0 + m.avg_false_nonzeros - m.avg_false_zeros)
                  .epsilon(1e-9));
        if (m.proportion_correct == 1.0) {
            CHECK(m.avg_false_nonzeros == 0.0);
            CHECK(m.avg_false_zeros == 0.0);
        }
    }
}

TEST_CASE("tune_lambda2_bic returns a grid value") {
    const ScenarioSpec spec = make_scenario(1);
    const Dataset d = generate_scenario(spec, 100, 3);
    PenaltySpec penalty{PenaltyScheme::aenet, 1.0, 0.0};
    const std::vector<double> grid = {0.0, 0.5, 5.0};
    const double l2 = tune_lambda2_bic(d, penalty, grid);
    CHECK((l2 == 0.0 || l2 == 0.5 || l2 == 5.0));
}
