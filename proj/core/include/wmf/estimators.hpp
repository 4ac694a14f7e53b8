#pragma once

#include <utility>
#include <vector>

#include "wmf/types.hpp"

namespace wmf {

// Condition bound above which X'X is treated as numerically singular.
inline constexpr double kConditionBound = 1e12;

// Floor applied to |pilot_j| before the reciprocal-power weight.
inline constexpr double kWeightFloor = 1e-8;

// Least-squares fit. Requires n > p and a well-conditioned Gram matrix;
// throws SingularDesign otherwise.
CoefficientVector ols_fit(const Dataset& data);

// argmin ||y - Xb||^2 + lambda2 ||b||^2. lambda2 = 0 falls back to ols_fit.
CoefficientVector ridge_fit(const Dataset& data, double lambda2);

// Ridge fit at the grid value minimizing
//   BIC(l2) = n log(SSE/n) + df(l2) log(n),  df = tr[X (X'X + l2 I)^{-1} X'].
// Ties go to the larger lambda2. Returns (fit, chosen lambda2).
std::pair<CoefficientVector, double> ridge_tune_bic(const Dataset& data,
                                                    const std::vector<double>& grid);

// w_j = max(|pilot_j|, kWeightFloor)^{-gamma}.
Vector adaptive_weights(const CoefficientVector& pilot, double gamma);

// Pilot for the adaptive weights: OLS when n > 1.5 p and the design is
// well conditioned, otherwise BIC-tuned ridge over {1e-3, ..., 1e3}.
CoefficientVector pilot_fit(const Dataset& data);

// In-place mean removal for intercept handling at the data-ingestion layer.
// Returns (column means, y mean) so predictions can restore the intercept.
std::pair<Vector, double> center_columns(Dataset& data);

// Condition number of X'X via its eigenvalue range (inf when singular).
double gram_condition(const Matrix& X);

} // namespace wmf
