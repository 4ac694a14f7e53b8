#include "wmf/simulate.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <optional>
#include <thread>

#include "wmf/errors.hpp"
#include "wmf/estimators.hpp"
#include "wmf/rng.hpp"

namespace wmf {

namespace {

double lchoose(int p, int k) {
    return std::lgamma(p + 1.0) - std::lgamma(k + 1.0) - std::lgamma(p - k + 1.0);
}

double path_best_bic(const Dataset& data, const SolutionPath& path) {
    const int n = data.n();
    double best = std::numeric_limits<double>::infinity();
    for (const auto& tp : path.points) {
        const double sse = (data.y - data.X * tp.coefficients).squaredNorm();
        const double bic = n * std::log(std::max(sse / n, 1e-300)) +
                           static_cast<double>(tp.active_set.size()) * std::log(n);
        best = std::min(best, bic);
    }
    return best;
}

double logistic_deviance(const GlmDataset& data, const TransitionPoint& tp) {
    Vector eta = data.X * tp.coefficients;
    eta.array() += tp.intercept;
    double s = 0.0;
    for (int i = 0; i < data.n(); ++i) {
        const double e = eta[i];
        const double log1pexp = e > 30.0 ? e : std::log1p(std::exp(e));
        s += 2.0 * (log1pexp - data.y[i] * e);
    }
    return s;
}

} // namespace

ScenarioSpec make_scenario(int id) {
    ScenarioSpec s;
    s.id = id;
    switch (id) {
        case 1:
            s.p_rule = ScenarioSpec::PRule::fixed;
            s.p_fixed = 10;
            s.rho = 0.3;
            s.sigma = 3.0;
            s.base_beta = {3.0, 1.5, 0.0, 0.0, 2.0};
            s.base_p0 = 3;
            break;
        case 2:
            s.p_rule = ScenarioSpec::PRule::sqrt_n;
            s.rho = 0.3;
            s.sigma = 3.0;
            s.base_beta = {3.0, 1.5, 0.0, 0.0, 2.0};
            s.base_p0 = 3;
            s.growth_step = 40;
            s.growth_block = 1;
            s.growth_value = 1.0;
            break;
        case 3:
            s.p_rule = ScenarioSpec::PRule::pow34;
            s.rho = 0.3;
            s.sigma = 3.0;
            s.base_beta = {3.0, 1.5, 0.0, 0.0, 2.0};
            s.base_p0 = 3;
            s.growth_step = 40;
            s.growth_block = 1;
            s.growth_value = 2.0;
            break;
        case 4:
            s.p_rule = ScenarioSpec::PRule::sqrt_n;
            s.rho = 0.5;
            s.sigma = 3.0;
            s.base_beta = {2.0, 2.0, 2.0};
            s.base_p0 = 3;
            s.growth_step = 200;
            s.growth_block = 3;
            s.growth_value = 1.0;
            break;
        case 5:
            s.p_rule = ScenarioSpec::PRule::pow34;
            s.rho = 0.5;
            s.sigma = 5.0;
            s.base_beta = {2.0, 2.0, 2.0, 2.0, 2.0, 2.0};
            s.base_p0 = 6;
            s.growth_step = 200;
            s.growth_block = 3;
            s.growth_value = 2.0;
            break;
        case 6:
            s.p_rule = ScenarioSpec::PRule::pow34;
            s.block_cov = true;
            s.sigma = 5.0;
            s.base_beta = {2.0, 2.0, 2.0, 2.0, 2.0, 2.0};
            s.base_p0 = 6;
            s.growth_step = 200;
            s.growth_block = 3;
            s.growth_value = 2.0;
            break;
        case 0:  // logistic example: scenario-1 design through a logit link
            s.p_rule = ScenarioSpec::PRule::fixed;
            s.p_fixed = 10;
            s.rho = 0.3;
            s.logistic = true;
            s.base_beta = {3.0, 1.5, 0.0, 0.0, 2.0};
            s.base_p0 = 3;
            break;
        default:
            throw InputError("make_scenario: id must be 0..6");
    }
    return s;
}

ScenarioDims scenario_dims(const ScenarioSpec& spec, int n) {
    ScenarioDims d;
    switch (spec.p_rule) {
        case ScenarioSpec::PRule::fixed:
            d.p = spec.p_fixed;
            break;
        case ScenarioSpec::PRule::sqrt_n:
            d.p = static_cast<int>(std::floor(std::sqrt(static_cast<double>(n))));
            break;
        case ScenarioSpec::PRule::pow34:
            d.p = static_cast<int>(std::llround(std::pow(static_cast<double>(n), 0.75)));
            break;
    }
    d.beta = Vector::Zero(d.p);
    for (std::size_t j = 0; j < spec.base_beta.size(); ++j)
        d.beta[static_cast<int>(j)] = spec.base_beta[j];
    int pos = static_cast<int>(spec.base_beta.size());
    if (spec.growth_step > 0 && n > 100) {
        const int increments = (n - 100) / spec.growth_step;
        for (int k = 0; k < increments; ++k)
            for (int m = 0; m < spec.growth_block && pos < d.p; ++m)
                d.beta[pos++] = spec.growth_value;
    }
    d.p0 = 0;
    for (int j = 0; j < d.p; ++j) d.p0 += d.beta[j] != 0.0;
    return d;
}

namespace {

Matrix draw_design(const ScenarioSpec& spec, const ScenarioDims& dims, int n,
                   Rng& rng) {
    const int p = dims.p;
    Matrix X(n, p);
    if (spec.block_cov) {
        const int blocks = dims.p0 / 3;
        for (int i = 0; i < n; ++i) {
            for (int b = 0; b < blocks; ++b) {
                const double f = rng.normal();
                for (int m = 0; m < 3; ++m)
                    X(i, 3 * b + m) = f + 0.05 * rng.normal();
            }
            for (int j = dims.p0; j < p; ++j) X(i, j) = rng.normal();
        }
        return X;
    }
    Matrix sigma(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) sigma(i, j) = std::pow(spec.rho, std::abs(i - j));
    const Matrix L = Eigen::LLT<Matrix>(sigma).matrixL();
    Vector z(p);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) z[j] = rng.normal();
        X.row(i) = (L * z).transpose();
    }
    return X;
}

} // namespace

Dataset generate_scenario(const ScenarioSpec& spec, int n, std::uint64_t seed) {
    const ScenarioDims dims = scenario_dims(spec, n);
    Rng rng(seed);
    Dataset data;
    data.X = draw_design(spec, dims, n, rng);
    data.y = data.X * dims.beta;
    for (int i = 0; i < n; ++i) data.y[i] += spec.sigma * rng.normal();
    IndexSet truth;
    for (int j = 0; j < dims.p; ++j)
        if (dims.beta[j] != 0.0) truth.push_back(j);
    data.truth = truth;
    return data;
}

GlmDataset generate_glm_scenario(const ScenarioSpec& spec, int n, std::uint64_t seed) {
    const ScenarioDims dims = scenario_dims(spec, n);
    Rng rng(seed);
    GlmDataset data;
    data.X = draw_design(spec, dims, n, rng);
    const Vector eta = data.X * dims.beta;
    data.y.resize(n);
    for (int i = 0; i < n; ++i) {
        const double prob = 1.0 / (1.0 + std::exp(-eta[i]));
        data.y[i] = rng.uniform01() < prob ? 1.0 : 0.0;
    }
    return data;
}

MetricsSummary compute_metrics(const std::vector<IndexSet>& selections,
                               const IndexSet& truth) {
    if (selections.empty()) throw InputError("compute_metrics: no selections");
    MetricsSummary m;
    m.completed = static_cast<int>(selections.size());
    m.replications = m.completed;
    double correct = 0.0, fn = 0.0, fz = 0.0, size = 0.0;
    for (const IndexSet& sel : selections) {
        IndexSet extra, missing;
        std::set_difference(sel.begin(), sel.end(), truth.begin(), truth.end(),
                            std::back_inserter(extra));
        std::set_difference(truth.begin(), truth.end(), sel.begin(), sel.end(),
                            std::back_inserter(missing));
        correct += extra.empty() && missing.empty();
        fn += static_cast<double>(extra.size());
        fz += static_cast<double>(missing.size());
        size += static_cast<double>(sel.size());
    }
    m.proportion_correct = correct / m.completed;
    m.avg_false_nonzeros = fn / m.completed;
    m.avg_false_zeros = fz / m.completed;
    m.avg_model_size = size / m.completed;
    return m;
}

double tune_lambda2_bic(const Dataset& data, const PenaltySpec& penalty,
                        const std::vector<double>& grid) {
    if (grid.empty()) throw InputError("tune_lambda2_bic: empty grid");
    double best_l2 = grid.front();
    double best_bic = std::numeric_limits<double>::infinity();
    for (double l2 : grid) {
        PenaltySpec ps = penalty;
        ps.lambda2 = l2;
        const double bic = path_best_bic(data, fit_path(data, ps, default_max_steps(data)));
        if (bic < best_bic || (bic == best_bic && l2 > best_l2)) {
            best_bic = bic;
            best_l2 = l2;
        }
    }
    return best_l2;
}

SelectionResult glm_criterion_select(const GlmDataset& data,
                                     const SolutionPath& path,
                                     const std::string& criterion) {
    if (path.points.empty()) throw InputError("glm_criterion_select: empty path");
    const int n = data.n(), p = data.p();
    int best = -1;
    double best_val = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < path.points.size(); ++k) {
        const double dev = logistic_deviance(data, path.points[k]);
        const int size = static_cast<int>(path.points[k].active_set.size());
        double val;
        if (criterion == "bic")
            val = dev + size * std::log(n);
        else if (criterion == "ebic")
            val = dev + size * std::log(n) + lchoose(p, size);
        else if (criterion == "gic")
            val = dev + std::log(std::log(static_cast<double>(n))) *
                            std::log(static_cast<double>(p)) * size;
        else
            throw UnknownCriterion("glm_criterion_select: unknown criterion '" +
                                   criterion + "'");
        if (val < best_val) {
            best_val = val;
            best = static_cast<int>(k);
        }
    }
    SelectionResult res;
    res.method = criterion;
    res.dimension = static_cast<int>(path.points[best].active_set.size());
    res.model = path.points[best].active_set;
    res.lambda = path.points[best].lambda;
    return res;
}

namespace {

bool needs_table(const std::string& m) { return m == "wmf" || m == "mf"; }

// One replicate of every requested method on a shared dataset.
std::vector<std::optional<IndexSet>> run_linear_replicate(
    const ScenarioSpec& spec, const std::vector<std::string>& methods, int n,
    int n_index, int replicate, std::uint64_t master_seed, const HarnessConfig& cfg) {
    std::vector<std::optional<IndexSet>> out(methods.size());
    const Dataset data =
        generate_scenario(spec, n, derive_seed(master_seed, replicate, n_index));
    const std::uint64_t boot_master =
        derive_seed(master_seed, replicate, 1000 + n_index);

    PenaltySpec penalty = cfg.penalty;
    if (penalty.has_ridge() && !cfg.lambda2_grid.empty())
        penalty.lambda2 = tune_lambda2_bic(data, penalty, cfg.lambda2_grid);

    std::optional<DimensionTable> table;
    std::optional<SolutionPath> path;
    for (std::size_t m = 0; m < methods.size(); ++m) {
        try {
            if (needs_table(methods[m]) && !table)
                table = mf_table(data, penalty, cfg.scheme, cfg.B, boot_master);
            if (!needs_table(methods[m]) && !path)
                path = fit_path(data, penalty, default_max_steps(data));
            if (methods[m] == "wmf") {
                out[m] = wmf_from_table(data, *table, penalty, cfg.cv,
                                        derive_seed(boot_master, 0, 1))
                             .model;
            } else if (methods[m] == "mf") {
                out[m] = mf_select(*table).model;
            } else {
                CvConfig cv = cfg.cv;
                cv.seed = derive_seed(boot_master, 0, 2);
                out[m] = criterion_select(data, *path, methods[m], cv).model;
            }
        } catch (const Error&) {
            out[m] = std::nullopt;
        }
    }
    return out;
}

std::vector<std::optional<IndexSet>> run_glm_replicate(
    const ScenarioSpec& spec, const std::vector<std::string>& methods, int n,
    int n_index, int replicate, std::uint64_t master_seed, const HarnessConfig& cfg) {
    std::vector<std::optional<IndexSet>> out(methods.size());
    const GlmDataset data =
        generate_glm_scenario(spec, n, derive_seed(master_seed, replicate, n_index));
    const std::uint64_t boot_master =
        derive_seed(master_seed, replicate, 1000 + n_index);

    std::optional<DimensionTable> table;
    std::optional<SolutionPath> path;
    for (std::size_t m = 0; m < methods.size(); ++m) {
        try {
            if (methods[m] == "wmf" || methods[m] == "mf") {
                if (!table) table = glm_mf_table(data, cfg.gamma, cfg.B, boot_master);
                if (methods[m] == "mf")
                    out[m] = mf_select(*table).model;
                else
                    out[m] = glm_wmf_from_table(data, *table, cfg.cv,
                                                derive_seed(boot_master, 0, 1))
                                 .model;
            } else {
                if (!path) {
                    CoefficientVector pilot;
                    try {
                        pilot = logistic_mle(data);
                    } catch (const NumericError&) {
                        pilot = logistic_ridge(data, 1e-4);
                    }
                    Vector w(data.p());
                    for (int j = 0; j < data.p(); ++j)
                        w[j] = std::pow(std::max(std::abs(pilot.values[j]), 1e-8),
                                        -cfg.gamma);
                    path = logistic_adaptive_lasso_path(data, w,
                                                        glm_lambda_grid(data, w));
                }
                out[m] = glm_criterion_select(data, *path, methods[m]).model;
            }
        } catch (const Error&) {
            out[m] = std::nullopt;
        }
    }
    return out;
}

} // namespace

std::vector<MetricsSummary> run_replications(const ScenarioSpec& spec,
                                             const std::vector<std::string>& methods,
                                             const std::vector<int>& n_list, int R,
                                             std::uint64_t master_seed,
                                             const HarnessConfig& cfg) {
    if (R < 1) throw InputError("run_replications: R must be >= 1");
    std::vector<MetricsSummary> summaries;
    for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
        const int n = n_list[ni];
        const ScenarioDims dims = scenario_dims(spec, n);
        IndexSet truth;
        for (int j = 0; j < dims.p; ++j)
            if (dims.beta[j] != 0.0) truth.push_back(j);

        // slot per (replicate, method); workers fill disjoint replicates
        std::vector<std::vector<std::optional<IndexSet>>> slots(R);
        auto work = [&](int first, int stride) {
            for (int r = first; r < R; r += stride)
                slots[r] = spec.logistic
                               ? run_glm_replicate(spec, methods, n,
                                                   static_cast<int>(ni), r,
                                                   master_seed, cfg)
                               : run_linear_replicate(spec, methods, n,
                                                      static_cast<int>(ni), r,
                                                      master_seed, cfg);
        };
        const int threads = std::max(1, std::min(cfg.threads, R));
        if (threads == 1) {
            work(0, 1);
        } else {
            std::vector<std::thread> pool;
            for (int t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
            for (auto& th : pool) th.join();
        }

        for (std::size_t m = 0; m < methods.size(); ++m) {
            std::vector<IndexSet> selections;
            for (int r = 0; r < R; ++r)
                if (slots[r][m]) selections.push_back(*slots[r][m]);
            MetricsSummary summary =
                selections.empty() ? MetricsSummary{} : compute_metrics(selections, truth);
            summary.scenario = spec.id;
            summary.n = n;
            summary.method = methods[m];
            summary.replications = R;
            summaries.push_back(summary);
        }
    }
    return summaries;
}

} // namespace wmf
