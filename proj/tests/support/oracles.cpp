#include "support/oracles.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>

namespace oracle {

wmf::Vector lstsq_svd(const wmf::Matrix& X, const wmf::Vector& y) {
    Eigen::JacobiSVD<wmf::Matrix> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return svd.solve(y);
}

wmf::Vector ridge_inverse(const wmf::Matrix& X, const wmf::Vector& y, double l2) {
    const int p = static_cast<int>(X.cols());
    const wmf::Matrix A =
        X.transpose() * X + l2 * wmf::Matrix::Identity(p, p);
    return A.inverse() * (X.transpose() * y);
}

double ridge_bic(const wmf::Matrix& X, const wmf::Vector& y, double l2) {
    const int n = static_cast<int>(X.rows());
    const int p = static_cast<int>(X.cols());
    const wmf::Matrix A =
        (X.transpose() * X + l2 * wmf::Matrix::Identity(p, p)).inverse();
    const wmf::Matrix hat = X * A * X.transpose();
    const wmf::Vector beta = A * (X.transpose() * y);
    const double sse = (y - X * beta).squaredNorm();
    return n * std::log(sse / n) + hat.trace() * std::log(n);
}

double kkt_violation(const wmf::Matrix& X, const wmf::Vector& y,
                     const wmf::Vector& w, double l1, double l2,
                     const wmf::Vector& beta) {
    const int n = static_cast<int>(X.rows());
    const int p = static_cast<int>(X.cols());
    double worst = 0.0;
    for (int j = 0; j < p; ++j) {
        double corr = 0.0;
        for (int i = 0; i < n; ++i) {
            double ri = y[i];
            for (int k = 0; k < p; ++k) ri -= X(i, k) * beta[k];
            corr += X(i, j) * ri;
        }
        corr -= l2 * beta[j];
        double v;
        if (beta[j] > 0.0)
            v = std::abs(corr - l1 * w[j]);
        else if (beta[j] < 0.0)
            v = std::abs(corr + l1 * w[j]);
        else
            v = std::max(0.0, std::abs(corr) - l1 * w[j]);
        worst = std::max(worst, v);
    }
    return worst;
}

double mcv_by_hand(const wmf::Matrix& X, const wmf::Vector& y,
                   const std::vector<int>& model, const std::vector<int>& fold,
                   int K) {
    const int n = static_cast<int>(X.rows());
    double total = 0.0;
    for (int f = 0; f < K; ++f) {
        std::vector<int> train, test;
        for (int i = 0; i < n; ++i) (fold[i] == f ? test : train).push_back(i);
        wmf::Matrix Xtr(train.size(), model.size());
        wmf::Vector ytr(train.size());
        for (std::size_t r = 0; r < train.size(); ++r) {
            for (std::size_t c = 0; c < model.size(); ++c)
                Xtr(static_cast<int>(r), static_cast<int>(c)) = X(train[r], model[c]);
            ytr[static_cast<int>(r)] = y[train[r]];
        }
        const wmf::Vector beta = lstsq_svd(Xtr, ytr);
        for (int i : test) {
            double pred = 0.0;
            for (std::size_t c = 0; c < model.size(); ++c)
                pred += X(i, model[c]) * beta[static_cast<int>(c)];
            total += (y[i] - pred) * (y[i] - pred);
        }
    }
    return total / n;
}

std::vector<double> softmax_naive(const std::vector<double>& t, double scale) {
    long double denom = 0.0L;
    for (double v : t) denom += std::exp(static_cast<long double>(-v / scale));
    std::vector<double> out(t.size());
    for (std::size_t i = 0; i < t.size(); ++i)
        out[i] = static_cast<double>(std::exp(static_cast<long double>(-t[i] / scale)) / denom);
    return out;
}

double pearson(const wmf::Vector& a, const wmf::Vector& b) {
    const int n = static_cast<int>(a.size());
    double ma = 0.0, mb = 0.0;
    for (int i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (int i = 0; i < n; ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

wmf::Vector logistic_newton(const wmf::Matrix& X, const wmf::Vector& y) {
    const int n = static_cast<int>(X.rows());
    const int p = static_cast<int>(X.cols());
    wmf::Matrix Xa(n, p + 1);
    Xa.col(0).setOnes();
    if (p > 0) Xa.rightCols(p) = X;
    wmf::Vector beta = wmf::Vector::Zero(p + 1);
    for (int iter = 0; iter < 100; ++iter) {
        const wmf::Vector eta = Xa * beta;
        wmf::Vector mu(n), wgt(n);
        for (int i = 0; i < n; ++i) {
            mu[i] = 1.0 / (1.0 + std::exp(-eta[i]));
            wgt[i] = std::max(mu[i] * (1.0 - mu[i]), 1e-10);
        }
        const wmf::Vector grad = Xa.transpose() * (y - mu);
        if (grad.lpNorm<Eigen::Infinity>() < 1e-10) break;
        const wmf::Matrix H = Xa.transpose() * wgt.asDiagonal() * Xa;
        beta += H.inverse() * grad;
    }
    return beta;
}

wmf::Matrix random_matrix(int n, int p, wmf::Rng& rng) {
    wmf::Matrix X(n, p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) X(i, j) = rng.normal();
    return X;
}

wmf::Matrix random_orthonormal(int n, int p, wmf::Rng& rng) {
    const wmf::Matrix raw = random_matrix(n, p, rng);
    Eigen::HouseholderQR<wmf::Matrix> qr(raw);
    wmf::Matrix Q = qr.householderQ() * wmf::Matrix::Identity(n, p);
    return Q;
}

Instance random_instance(int n, int p, int support, double sd, wmf::Rng& rng) {
    Instance inst;
    inst.data.X = random_matrix(n, p, rng);
    inst.beta = wmf::Vector::Zero(p);
    for (int j = 0; j < support; ++j)
        inst.beta[j] = (j % 2 == 0 ? 1.0 : -1.0) * (2.0 + j);
    inst.data.y = inst.data.X * inst.beta;
    for (int i = 0; i < n; ++i) inst.data.y[i] += sd * rng.normal();
    return inst;
}

} // namespace oracle
