#include <benchmark/benchmark.h>

#include <wmf/estimators.hpp>
#include <wmf/glm.hpp>
#include <wmf/path.hpp>
#include <wmf/rng.hpp>
#include <wmf/selection.hpp>
#include <wmf/simulate.hpp>

using namespace wmf;

namespace {

Dataset scenario_data(int scenario, int n, std::uint64_t seed) {
    return generate_scenario(make_scenario(scenario), n, seed);
}

void BM_lars_path(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Dataset d = scenario_data(1, n, 7);
    const Vector w = adaptive_weights(pilot_fit(d), 1.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(lars_lasso_path(d, w, default_max_steps(d)));
}
BENCHMARK(BM_lars_path)->Arg(100)->Arg(300)->Arg(500);

void BM_larsen_path(benchmark::State& state) {
    const Dataset d = scenario_data(5, static_cast<int>(state.range(0)), 11);
    const Vector w = adaptive_weights(pilot_fit(d), 1.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(larsen_path(d, 1.0, w, default_max_steps(d)));
}
BENCHMARK(BM_larsen_path)->Arg(100)->Arg(300);

void BM_cd_solve(benchmark::State& state) {
    const Dataset d = scenario_data(3, static_cast<int>(state.range(0)), 13);
    const Vector w = Vector::Ones(d.p());
    const double scale = (d.X.transpose() * d.y).cwiseAbs().maxCoeff();
    for (auto _ : state)
        benchmark::DoNotOptimize(cd_solve(d, w, 0.1 * scale, 0.5, 1e-8 * scale));
}
BENCHMARK(BM_cd_solve)->Arg(100)->Arg(300);

void BM_mf_table(benchmark::State& state) {
    const Dataset d = scenario_data(1, 100, 17);
    const PenaltySpec penalty{PenaltyScheme::alasso, 1.0, 0.0};
    const BootstrapScheme scheme{BootstrapScheme::Kind::paired, {}};
    const int B = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(mf_table(d, penalty, scheme, B, 23));
}
BENCHMARK(BM_mf_table)->Arg(25)->Arg(100);

void BM_mcv_error(benchmark::State& state) {
    const Dataset d = scenario_data(1, static_cast<int>(state.range(0)), 29);
    for (auto _ : state) benchmark::DoNotOptimize(mcv_error(d, {0, 1, 4}, 10, 5));
}
BENCHMARK(BM_mcv_error)->Arg(100)->Arg(500);

void BM_wmf_select(benchmark::State& state) {
    const Dataset d = scenario_data(1, 100, 31);
    const PenaltySpec penalty{PenaltyScheme::alasso, 1.0, 0.0};
    const BootstrapScheme scheme{BootstrapScheme::Kind::paired, {}};
    CvConfig cfg;
    for (auto _ : state)
        benchmark::DoNotOptimize(wmf_select(d, penalty, scheme, 100, cfg, 37));
}
BENCHMARK(BM_wmf_select);

void BM_glm_path(benchmark::State& state) {
    const GlmDataset d =
        generate_glm_scenario(make_scenario(0), static_cast<int>(state.range(0)), 41);
    const Vector w = Vector::Ones(d.p());
    const auto grid = glm_lambda_grid(d, w);
    for (auto _ : state)
        benchmark::DoNotOptimize(logistic_adaptive_lasso_path(d, w, grid));
}
BENCHMARK(BM_glm_path)->Arg(200)->Arg(500);

void BM_sis_screen(benchmark::State& state) {
    const int n = 200, p = static_cast<int>(state.range(0));
    Rng rng(43);
    Matrix X(n, p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) X(i, j) = rng.normal();
    Vector y = X.col(0) + X.col(1);
    for (int i = 0; i < n; ++i) y[i] += rng.normal();
    for (auto _ : state) benchmark::DoNotOptimize(sis_screen(X, y, default_dn(n)));
}
BENCHMARK(BM_sis_screen)->Arg(400)->Arg(2000);

}  // namespace

BENCHMARK_MAIN();
