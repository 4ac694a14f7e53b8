#pragma once

#include <optional>
#include <vector>

#include "wmf/types.hpp"

namespace wmf {

// One knot of a piecewise-linear regularization path. The active set is the
// support of `coefficients`: a variable entering at this lambda is still at
// exactly zero, a variable dropping here has just reached zero, so monotone
// paths have |active_set| == step.
struct TransitionPoint {
    int step = 0;
    double lambda = 0.0;
    IndexSet active_set;
    Vector coefficients;          // original (unweighted) coordinates
    double intercept = 0.0;       // nonzero only for GLM paths
};

// Path convention: the knot parameter lambda is the KKT threshold of
//   ||y - X b||^2 + lambda2 ||b||^2 + 2 lambda sum_j w_j |b_j|,
// i.e. active j satisfy X_j'(y - Xb) - lambda2 b_j = lambda w_j sgn(b_j) and
// inactive j satisfy |X_j'(y - Xb)| <= lambda w_j.
struct SolutionPath {
    std::vector<TransitionPoint> points;
    PenaltySpec scheme;
    int max_steps = 0;
    // Elastic-net paths store coefficients premultiplied by (1 + lambda2/n);
    // divide by this factor to recover the naive (KKT-satisfying) solution.
    double enet_factor = 1.0;

    bool empty() const { return points.empty(); }
};

inline int default_max_steps(const Dataset& data) {
    return std::min(data.p(), data.n() - 1);
}

// Weighted-LASSO homotopy (LARS with drops) computed by the standard
// reduction: run a plain path on the rescaled columns X_j / w_j and map the
// knots back via b_j = b*_j / w_j. Records at most max_steps knots beyond the
// all-zero entry point.
SolutionPath lars_lasso_path(const Dataset& data, const Vector& weights,
                             int max_steps);

// Elastic-net path via the homotopy on the ridge-augmented data
// [X; sqrt(lambda2) I], [y; 0]; recorded coefficients carry the (1+lambda2/n)
// rescale. lambda2 == 0 delegates to lars_lasso_path unchanged.
SolutionPath larsen_path(const Dataset& data, double lambda2,
                         const Vector& weights, int max_steps);

// Closed-form weighted-LASSO solution for orthonormal designs:
//   b_j = sgn(X_j'y) (|X_j'y| - lambda w_j)_+.
// Throws NotOrthogonal unless X'X = I within 1e-8.
CoefficientVector soft_threshold_orthogonal(const Dataset& data,
                                            const Vector& weights, double lambda);

// Independent fixed-lambda solver (cyclic coordinate descent) for
//   ||y - X b||^2 + lambda2 ||b||^2 + 2 lambda1 sum_j w_j |b_j|.
// Runs until the KKT residual falls below tol; NoConvergence after max_sweeps.
CoefficientVector cd_solve(const Dataset& data, const Vector& weights,
                           double lambda1, double lambda2, double tol,
                           int max_sweeps = 100000);

// Exact solution at any lambda by interpolating the bracketing knots.
// Above the entry lambda returns zeros; below the last knot (step-capped
// paths) returns the last knot's coefficients.
Vector coefficients_at(const SolutionPath& path, double lambda);

// Active set at the last knot of size k; empty optional when the path never
// visits that size.
std::optional<IndexSet> last_model_of_size(const SolutionPath& path, int k);

// Pilot -> adaptive weights -> path, honoring the penalty scheme. Plain
// schemes use unit weights; ridge schemes pass penalty.lambda2 through.
SolutionPath fit_path(const Dataset& data, const PenaltySpec& penalty,
                      int max_steps);

} // namespace wmf
