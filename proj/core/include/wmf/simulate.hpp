#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wmf/glm.hpp"
#include "wmf/selection.hpp"
#include "wmf/types.hpp"

namespace wmf {

// Data-generating process: y = X beta + sigma eps with AR(rho) Gaussian rows,
// or scenario 6's shared-factor blocks, or the logistic example. The support
// grows with n per the schedule (base pattern at n = 100, then `growth_block`
// coefficients of `growth_value` appended every `growth_step` units of n).
struct ScenarioSpec {
    int id = 1;  // 1..6; 0 = logistic example
    enum class PRule { fixed, sqrt_n, pow34 };
    PRule p_rule = PRule::fixed;
    int p_fixed = 10;
    double rho = 0.3;
    bool block_cov = false;  // true covariates as f + 0.05 e blocks, noise iid
    double sigma = 3.0;
    bool logistic = false;

    std::vector<double> base_beta;  // leading coefficients at n = 100
    int base_p0 = 3;
    int growth_step = 0;            // 0 = fixed support
    int growth_block = 1;
    double growth_value = 1.0;
};

ScenarioSpec make_scenario(int id);

struct ScenarioDims {
    int p = 0;
    int p0 = 0;
    Vector beta;
};

ScenarioDims scenario_dims(const ScenarioSpec& spec, int n);

Dataset generate_scenario(const ScenarioSpec& spec, int n, std::uint64_t seed);

GlmDataset generate_glm_scenario(const ScenarioSpec& spec, int n, std::uint64_t seed);

struct MetricsSummary {
    int scenario = 0;
    int n = 0;
    std::string method;
    int replications = 0;  // attempted
    int completed = 0;     // contributing to the averages
    double proportion_correct = 0.0;
    double avg_false_nonzeros = 0.0;
    double avg_false_zeros = 0.0;
    double avg_model_size = 0.0;
};

MetricsSummary compute_metrics(const std::vector<IndexSet>& selections,
                               const IndexSet& truth);

// Per-dataset ridge-level choice for the elastic-net penalty: the grid value
// whose path contains the lowest-BIC knot (ties to the larger lambda2).
double tune_lambda2_bic(const Dataset& data, const PenaltySpec& penalty,
                        const std::vector<double>& grid);

struct HarnessConfig {
    PenaltySpec penalty;
    BootstrapScheme scheme;
    CvConfig cv;
    int B = 100;
    std::vector<double> lambda2_grid;  // nonempty: tune aenet lambda2 per dataset
    double gamma = 1.0;                // logistic pipeline weight exponent
    int threads = 1;
};

// For each (n, replicate): generate one dataset from
// derive_seed(master, replicate, n-index) and run every method on it.
// Failures are excluded from that method's averages. Results are identical
// for any thread count (per-replicate derived seeds, indexed aggregation).
std::vector<MetricsSummary> run_replications(const ScenarioSpec& spec,
                                             const std::vector<std::string>& methods,
                                             const std::vector<int>& n_list, int R,
                                             std::uint64_t master_seed,
                                             const HarnessConfig& cfg);

// Deviance-based information criteria on a logistic path's knots:
// bic = deviance + k log n, ebic adds log C(p,k), gic uses
// log(log n) log(p) k.
SelectionResult glm_criterion_select(const GlmDataset& data,
                                     const SolutionPath& path,
                                     const std::string& criterion);

} // namespace wmf
