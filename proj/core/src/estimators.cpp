#include "wmf/estimators.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

#include "wmf/errors.hpp"

namespace wmf {

namespace {

void require_finite(const Dataset& data) {
    if (!data.X.allFinite() || !data.y.allFinite())
        throw NonFiniteInput("dataset contains non-finite values");
}

} // namespace

double gram_condition(const Matrix& X) {
    const Matrix gram = X.transpose() * X;
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (lo <= 0.0 || hi <= 0.0) return std::numeric_limits<double>::infinity();
    return hi / lo;
}

CoefficientVector ols_fit(const Dataset& data) {
    require_finite(data);
    if (data.n() <= data.p())
        throw SingularDesign("ols_fit requires n > p");
    const Matrix gram = data.X.transpose() * data.X;
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > kConditionBound)
        throw SingularDesign("ols_fit: X'X numerically singular");
    Eigen::LLT<Matrix> llt(gram);
    CoefficientVector beta;
    beta.values = llt.solve(data.X.transpose() * data.y);
    return beta;
}

CoefficientVector ridge_fit(const Dataset& data, double lambda2) {
    if (lambda2 < 0.0) throw InputError("ridge_fit: lambda2 must be >= 0");
    if (lambda2 == 0.0) return ols_fit(data);
    require_finite(data);
    Matrix gram = data.X.transpose() * data.X;
    gram.diagonal().array() += lambda2;
    Eigen::LLT<Matrix> llt(gram);
    CoefficientVector beta;
    beta.values = llt.solve(data.X.transpose() * data.y);
    return beta;
}

std::pair<CoefficientVector, double> ridge_tune_bic(const Dataset& data,
                                                    const std::vector<double>& grid) {
    if (grid.empty()) throw InputError("ridge_tune_bic: empty grid");
    require_finite(data);
    const int n = data.n();
    const Matrix gram = data.X.transpose() * data.X;
    const Vector xty = data.X.transpose() * data.y;
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
    const Vector eig = es.eigenvalues();

    double best_bic = std::numeric_limits<double>::infinity();
    double best_l2 = -1.0;
    Vector best_beta;
    for (double l2 : grid) {
        if (l2 < 0.0) throw InputError("ridge_tune_bic: negative grid value");
        if (l2 == 0.0 && (eig.minCoeff() <= 0.0 ||
                          eig.maxCoeff() / eig.minCoeff() > kConditionBound))
            continue;
        Matrix reg = gram;
        reg.diagonal().array() += l2;
        const Vector beta = Eigen::LLT<Matrix>(reg).solve(xty);
        const double sse = (data.y - data.X * beta).squaredNorm();
        double df = 0.0;
        for (int i = 0; i < eig.size(); ++i) df += eig[i] / (eig[i] + l2);
        const double bic = n * std::log(std::max(sse / n, 1e-300)) + df * std::log(n);
        // <= keeps the larger lambda2 on ties (grid scanned in any order).
        if (bic < best_bic || (bic == best_bic && l2 > best_l2)) {
            best_bic = bic;
            best_l2 = l2;
            best_beta = beta;
        }
    }
    if (best_l2 < 0.0)
        throw SingularDesign("ridge_tune_bic: no grid value gave a valid fit");
    CoefficientVector cv;
    cv.values = best_beta;
    return {cv, best_l2};
}

Vector adaptive_weights(const CoefficientVector& pilot, double gamma) {
    if (gamma < 0.0) throw InputError("adaptive_weights: gamma must be >= 0");
    Vector w(pilot.values.size());
    for (int j = 0; j < w.size(); ++j) {
        const double mag = std::max(std::abs(pilot.values[j]), kWeightFloor);
        w[j] = std::pow(mag, -gamma);
    }
    return w;
}

CoefficientVector pilot_fit(const Dataset& data) {
    if (data.n() > 1.5 * data.p() && gram_condition(data.X) <= kConditionBound)
        return ols_fit(data);
    static const std::vector<double> grid = {1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3};
    return ridge_tune_bic(data, grid).first;
}

std::pair<Vector, double> center_columns(Dataset& data) {
    const Vector xbar = data.X.colwise().mean();
    const double ybar = data.y.mean();
    data.X.rowwise() -= xbar.transpose();
    data.y.array() -= ybar;
    return {xbar, ybar};
}

} // namespace wmf
