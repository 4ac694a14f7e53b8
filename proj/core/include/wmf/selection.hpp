#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wmf/path.hpp"
#include "wmf/resample.hpp"
#include "wmf/types.hpp"

namespace wmf {

// Bootstrap model-frequency tally: counts[j-1] maps each distinct model of
// size j to the number of bootstrap paths whose last visit to size j produced
// it. A path that never reaches size j contributes nothing there.
struct DimensionTable {
    int B = 0;
    int p = 0;
    int failed = 0;  // replicates dropped because the path solver threw
    std::vector<std::map<IndexSet, int>> counts;

    bool empty() const;
    int mf(int dim) const;                       // max count at this size, 0 if unvisited
    const IndexSet* top_model(int dim) const;    // ties -> lexicographically smallest
};

struct DimensionDiagnostic {
    int dim = 0;
    double mf_freq = 0.0;   // MF_j / B
    double mcv = std::numeric_limits<double>::quiet_NaN();
    double weight = 0.0;    // estimated posterior probability of this size
    double wmf = 0.0;       // weight * MF_j
};

struct SelectionResult {
    int dimension = 0;
    IndexSet model;
    std::string method;
    std::vector<DimensionDiagnostic> diagnostics;  // rows for dims 1..p-1
    double sigma2 = std::numeric_limits<double>::quiet_NaN();
    double lambda = std::numeric_limits<double>::quiet_NaN();  // criterion methods
};

struct CvConfig {
    int K = 10;
    double c = 1.0;                 // weight temperature, in [1, 2]
    std::optional<double> sigma2;   // noise-variance override
    std::uint64_t seed = 0;         // fold-partition seed for criterion CV
    bool penalized_refit = false;   // MCV refits the penalized estimator, not OLS
};

// Algorithm: draw B bootstrap datasets, fit the configured path on each
// (adaptive weights recomputed per sample), tally last_model_of_size for
// every size. Deterministic given master_seed.
DimensionTable mf_table(const Dataset& data, const PenaltySpec& penalty,
                        const BootstrapScheme& scheme, int B,
                        std::uint64_t master_seed);

// Maximum-frequency rule over sizes 1..p-1 (full model excluded); ties go to
// the highest dimension.
SelectionResult mf_select(const DimensionTable& table);

// K-fold cross-validated prediction error of the OLS refit restricted to
// `model`: (1/n) sum over folds of the held-out squared error. The partition
// is a seeded random equipartition.
double mcv_error(const Dataset& data, const IndexSet& model, int K,
                 std::uint64_t seed);

// Penalized-refit variant: each training fold refits the configured path on
// the model's columns and predicts with the solution at the last knot of
// full support.
double mcv_error_penalized(const Dataset& data, const IndexSet& model,
                           const PenaltySpec& penalty, int K, std::uint64_t seed);

// Softmax of -errors[i] / (c sigma^2) with max-subtraction; NaN entries get
// weight 0 and are excluded from normalization.
std::vector<double> dimension_weights(const std::vector<double>& errors,
                                      const CvConfig& cfg, const Dataset& data);

// Full-model OLS residual variance SSE/(n-p) when feasible, otherwise
// BIC-tuned ridge variance SSE/(n-df); floored at 1e-12.
double sigma2_estimate(const Dataset& data);

// The weighted rule: tally bootstrap model frequencies, weight each size by
// the estimated posterior probability from the multi-fold CV error of its
// top model, and pick the size maximizing weight * frequency (ties toward
// the higher dimension).
SelectionResult wmf_select(const Dataset& data, const PenaltySpec& penalty,
                           const BootstrapScheme& scheme, int B,
                           const CvConfig& cfg, std::uint64_t master_seed);

// The weighting/argmax stage alone, for callers that already hold a table.
SelectionResult wmf_from_table(const Dataset& data, const DimensionTable& table,
                               const PenaltySpec& penalty, const CvConfig& cfg,
                               std::uint64_t cv_seed);

// Comparator criteria evaluated at the path's transition points:
// bic, ebic (xi = 0.5), gic, cp, cv-min, cv-1se.
SelectionResult criterion_select(const Dataset& data, const SolutionPath& path,
                                 const std::string& criterion, const CvConfig& cfg);

// Seeded equipartition into K folds: returns fold id per row.
std::vector<int> make_folds(int n, int K, std::uint64_t seed);

} // namespace wmf
