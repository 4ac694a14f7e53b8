#include <cmath>

#include "wmf/errors.hpp"
#include "wmf/path.hpp"

namespace wmf {

namespace {

double soft(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

// Largest stationarity violation of
//   ||y - Xb||^2 + lambda2 ||b||^2 + 2 lambda1 sum_j w_j |b_j|.
double kkt_residual(const Matrix& X, const Vector& beta, const Vector& grad,
                    const Vector& weights, double lambda1, double lambda2) {
    double worst = 0.0;
    for (int j = 0; j < beta.size(); ++j) {
        double v;
        if (beta[j] != 0.0)
            v = std::abs(grad[j] - lambda2 * beta[j] -
                         lambda1 * weights[j] * (beta[j] > 0.0 ? 1.0 : -1.0));
        else
            v = std::max(0.0, std::abs(grad[j]) - lambda1 * weights[j]);
        worst = std::max(worst, v);
    }
    return worst;
}

} // namespace

CoefficientVector cd_solve(const Dataset& data, const Vector& weights,
                           double lambda1, double lambda2, double tol,
                           int max_sweeps) {
    if (lambda1 < 0.0 || lambda2 < 0.0)
        throw InputError("cd_solve: penalties must be >= 0");
    if (!(tol > 0.0)) throw InputError("cd_solve: tol must be > 0");
    if (!data.X.allFinite() || !data.y.allFinite())
        throw NonFiniteInput("cd_solve: non-finite data");

    const int p = data.p();
    const Vector colsq = data.X.colwise().squaredNorm();
    Vector beta = Vector::Zero(p);
    Vector r = data.y;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        for (int j = 0; j < p; ++j) {
            const double denom = colsq[j] + lambda2;
            if (denom <= 0.0) continue;
            const double zj = data.X.col(j).dot(r) + colsq[j] * beta[j];
            const double bj = soft(zj, lambda1 * weights[j]) / denom;
            if (bj != beta[j]) {
                r -= (bj - beta[j]) * data.X.col(j);
                beta[j] = bj;
            }
        }
        const Vector grad = data.X.transpose() * r;
        if (kkt_residual(data.X, beta, grad, weights, lambda1, lambda2) <= tol) {
            CoefficientVector out;
            out.values = beta;
            return out;
        }
    }
    throw NoConvergence("cd_solve: KKT residual above tol after max sweeps");
}

} // namespace wmf
