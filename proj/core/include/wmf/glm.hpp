#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wmf/path.hpp"
#include "wmf/selection.hpp"
#include "wmf/types.hpp"

namespace wmf {

struct GlmDataset {
    Matrix X;
    Vector y;  // entries in {0,1}, at least one of each

    int n() const { return static_cast<int>(X.rows()); }
    int p() const { return static_cast<int>(X.cols()); }
};

struct ScreenResult {
    IndexSet kept;       // size min(d_n, p), sorted by descending score
    Vector scores;       // |corr(X_j, y)| per column; 0 for constant columns
};

// Default screening size: floor(n / log n).
int default_dn(int n);

// Marginal-correlation screening: rank by |corr(X_j, y)| on standardized
// columns, keep the top d_n (ties to the lower index).
ScreenResult sis_screen(const Matrix& X, const Vector& y, int d_n);

// Newton/IRLS logistic maximum likelihood with unpenalized intercept.
// Throws Separation when the iterates diverge (norm above 1e3).
CoefficientVector logistic_mle(const GlmDataset& data);

// Ridge-stabilized variant (slope penalty lambda2) for separable folds.
CoefficientVector logistic_ridge(const GlmDataset& data, double lambda2);

// 100 log-spaced grid values from lambda_max = max_j |X_j'(y - ybar)| / w_j
// down to 1e-4 lambda_max.
std::vector<double> glm_lambda_grid(const GlmDataset& data, const Vector& weights);

// Warm-started coordinate descent for -loglik + lambda sum_j w_j |b_j| along
// a descending grid; knots are recorded where the active-set size changes.
// Point intercepts ride along in TransitionPoint::intercept.
SolutionPath logistic_adaptive_lasso_path(const GlmDataset& data,
                                          const Vector& weights,
                                          const std::vector<double>& lambda_grid);

// K-fold CV of the given loss ("deviance" or "misclass") with an unpenalized
// logistic refit per training fold; separable folds fall back to the
// ridge-stabilized fit (lambda2 = 1e-4).
double glm_mcv(const GlmDataset& data, const IndexSet& model, int K,
               const std::string& loss, std::uint64_t seed);

// Maximum-frequency table from B paired bootstrap replicates of the logistic
// path (pilot and weights recomputed per replicate).
DimensionTable glm_mf_table(const GlmDataset& data, double gamma, int B,
                            std::uint64_t master_seed);

// The weighted rule for logistic models: bootstrap frequencies weighted by
// exp(-T_j / (c * Dhat)) with T_j the deviance CV error of the top model of
// size j and Dhat the full-model CV mean deviance.
SelectionResult glm_wmf_select(const GlmDataset& data, int B, const CvConfig& cfg,
                               std::uint64_t master_seed, double gamma = 1.0);

// Weighting/argmax stage on a prebuilt table.
SelectionResult glm_wmf_from_table(const GlmDataset& data,
                                   const DimensionTable& table,
                                   const CvConfig& cfg, std::uint64_t cv_seed);

// Elementwise I(p > threshold); the boundary maps to 0.
std::vector<int> classify(const Vector& probabilities, double threshold);

} // namespace wmf
