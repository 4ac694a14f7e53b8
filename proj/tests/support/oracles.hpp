#pragma once

#include <cstdint>
#include <vector>

#include <wmf/rng.hpp>
#include <wmf/types.hpp>

// Independent reference implementations used to cross-check the library.
// Everything here deliberately avoids the library's own numerical routes:
// SVD/explicit inverses instead of Cholesky solves, raw loops instead of the
// production code paths.
namespace oracle {

// Least squares through the SVD pseudo-inverse.
wmf::Vector lstsq_svd(const wmf::Matrix& X, const wmf::Vector& y);

// Ridge through an explicit matrix inverse.
wmf::Vector ridge_inverse(const wmf::Matrix& X, const wmf::Vector& y, double l2);

// BIC of a ridge fit with the hat-matrix trace computed entrywise.
double ridge_bic(const wmf::Matrix& X, const wmf::Vector& y, double l2);

// Largest violation of the stationarity conditions of
//   ||y-Xb||^2 + l2||b||^2 + 2 l1 sum w_j |b_j|
// computed with scalar loops only.
double kkt_violation(const wmf::Matrix& X, const wmf::Vector& y,
                     const wmf::Vector& w, double l1, double l2,
                     const wmf::Vector& beta);

// K-fold CV of the OLS refit, folds supplied by the caller, solved by SVD.
double mcv_by_hand(const wmf::Matrix& X, const wmf::Vector& y,
                   const std::vector<int>& model, const std::vector<int>& fold,
                   int K);

// Softmax of -t_i/scale evaluated naively in long double.
std::vector<double> softmax_naive(const std::vector<double>& t, double scale);

// Two-pass Pearson correlation.
double pearson(const wmf::Vector& a, const wmf::Vector& b);

// Logistic Newton iteration with explicit Hessian inverse; returns the
// (intercept, slopes) vector.
wmf::Vector logistic_newton(const wmf::Matrix& X, const wmf::Vector& y);

// Deterministic test-instance helpers.
wmf::Matrix random_matrix(int n, int p, wmf::Rng& rng);
wmf::Matrix random_orthonormal(int n, int p, wmf::Rng& rng);  // X'X = I, needs n >= p

struct Instance {
    wmf::Dataset data;
    wmf::Vector beta;
};
// Gaussian design, sparse coefficients in the leading positions, N(0, sd^2) noise.
Instance random_instance(int n, int p, int support, double sd, wmf::Rng& rng);

} // namespace oracle
