#include "wmf/glm.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>

#include "wmf/errors.hpp"
#include "wmf/resample.hpp"
#include "wmf/rng.hpp"

namespace wmf {

namespace {

constexpr double kDivergenceNorm = 1e3;
constexpr double kProbClamp = 1e-12;

void validate(const GlmDataset& data) {
    if (!data.X.allFinite() || !data.y.allFinite())
        throw NonFiniteInput("glm: non-finite data");
    bool any0 = false, any1 = false;
    for (int i = 0; i < data.n(); ++i) {
        if (data.y[i] == 0.0) any0 = true;
        else if (data.y[i] == 1.0) any1 = true;
        else throw InputError("glm: response must be 0/1");
    }
    if (!any0 || !any1) throw InputError("glm: response needs both classes");
}

Vector sigmoid(const Vector& eta) {
    return (1.0 / (1.0 + (-eta.array()).exp())).matrix();
}

double neg_loglik(const Vector& eta, const Vector& y) {
    // -sum_i [y_i eta_i - log(1 + exp(eta_i))], computed overflow-safe
    double s = 0.0;
    for (int i = 0; i < eta.size(); ++i) {
        const double e = eta[i];
        const double log1pexp = e > 30.0 ? e : std::log1p(std::exp(e));
        s += log1pexp - y[i] * e;
    }
    return s;
}

// IRLS on the augmented design [1 X], optional ridge on the slope block.
CoefficientVector irls(const GlmDataset& data, double lambda2) {
    validate(data);
    const int n = data.n(), p = data.p();
    Matrix Xa(n, p + 1);
    Xa.col(0).setOnes();
    if (p > 0) Xa.rightCols(p) = data.X;

    Vector beta = Vector::Zero(p + 1);
    beta[0] = std::log(data.y.mean() / (1.0 - data.y.mean()));
    double obj = neg_loglik(Xa * beta, data.y) +
                 0.5 * lambda2 * beta.tail(p).squaredNorm();
    for (int iter = 0; iter < 200; ++iter) {
        // an essentially perfect unpenalized fit only happens under separation
        if (lambda2 == 0.0 && obj < 1e-8 * n)
            throw Separation("logistic fit: fitted probabilities saturate");
        const Vector eta = Xa * beta;
        const Vector mu = sigmoid(eta);
        Vector grad = Xa.transpose() * (data.y - mu);
        grad.tail(p) -= lambda2 * beta.tail(p);
        if (grad.lpNorm<Eigen::Infinity>() < 1e-8) {
            CoefficientVector out;
            out.intercept = beta[0];
            out.values = beta.tail(p);
            return out;
        }
        const Vector w = (mu.array() * (1.0 - mu.array())).max(1e-10).matrix();
        Matrix H = Xa.transpose() * w.asDiagonal() * Xa;
        H.bottomRightCorner(p, p).diagonal().array() += lambda2;
        const Vector step = Eigen::LDLT<Matrix>(H).solve(grad);
        double t = 1.0;
        for (int half = 0; half < 40; ++half, t *= 0.5) {
            const Vector cand = beta + t * step;
            const double cand_obj = neg_loglik(Xa * cand, data.y) +
                                    0.5 * lambda2 * cand.tail(p).squaredNorm();
            if (cand_obj <= obj + 1e-14 * std::abs(obj)) {
                beta = cand;
                obj = cand_obj;
                break;
            }
        }
        if (beta.norm() > kDivergenceNorm)
            throw Separation("logistic fit diverged (separable data?)");
    }
    throw NoConvergence("logistic fit: IRLS did not converge");
}

Matrix submatrix(const Matrix& X, const IndexSet& cols) {
    Matrix out(X.rows(), static_cast<int>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i) out.col(static_cast<int>(i)) = X.col(cols[i]);
    return out;
}

double deviance_loss(const Vector& prob, const Vector& y) {
    double s = 0.0;
    for (int i = 0; i < y.size(); ++i) {
        const double pc = std::clamp(prob[i], kProbClamp, 1.0 - kProbClamp);
        s += -2.0 * (y[i] * std::log(pc) + (1.0 - y[i]) * std::log(1.0 - pc));
    }
    return s;
}

} // namespace

int default_dn(int n) {
    return static_cast<int>(std::floor(n / std::log(static_cast<double>(n))));
}

ScreenResult sis_screen(const Matrix& X, const Vector& y, int d_n) {
    if (d_n < 1) throw InputError("sis_screen: d_n must be >= 1");
    const int n = static_cast<int>(X.rows()), p = static_cast<int>(X.cols());
    ScreenResult res;
    res.scores.resize(p);
    const double ybar = y.mean();
    const double ysd = std::sqrt((y.array() - ybar).square().sum());
    for (int j = 0; j < p; ++j) {
        const double xbar = X.col(j).mean();
        const Eigen::ArrayXd xc = X.col(j).array() - xbar;
        const double xsd = std::sqrt(xc.square().sum());
        if (xsd == 0.0 || ysd == 0.0) {
            res.scores[j] = 0.0;  // constant column: no marginal signal
            continue;
        }
        res.scores[j] = std::abs((xc * (y.array() - ybar)).sum() / (xsd * ysd));
    }
    std::vector<int> order(p);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return res.scores[a] > res.scores[b];  // stable: ties keep lower index
    });
    order.resize(std::min(d_n, p));
    res.kept = order;
    return res;
}

CoefficientVector logistic_mle(const GlmDataset& data) {
    if (data.n() <= data.p())
        throw SingularDesign("logistic_mle requires n > p");
    return irls(data, 0.0);
}

CoefficientVector logistic_ridge(const GlmDataset& data, double lambda2) {
    if (lambda2 <= 0.0) throw InputError("logistic_ridge: lambda2 must be > 0");
    return irls(data, lambda2);
}

std::vector<double> glm_lambda_grid(const GlmDataset& data, const Vector& weights) {
    validate(data);
    const Vector resid0 = data.y.array() - data.y.mean();
    double lmax = 0.0;
    for (int j = 0; j < data.p(); ++j)
        lmax = std::max(lmax, std::abs(data.X.col(j).dot(resid0)) / weights[j]);
    std::vector<double> grid(100);
    const double lmin = 1e-4 * lmax;
    for (int k = 0; k < 100; ++k)
        grid[k] = lmax * std::pow(lmin / lmax, k / 99.0);
    return grid;
}

SolutionPath logistic_adaptive_lasso_path(const GlmDataset& data,
                                          const Vector& weights,
                                          const std::vector<double>& lambda_grid) {
    validate(data);
    const int n = data.n(), p = data.p();
    if (weights.size() != p || (weights.array() <= 0.0).any())
        throw InputError("logistic path: weights must be positive, length p");
    for (std::size_t k = 0; k + 1 < lambda_grid.size(); ++k)
        if (!(lambda_grid[k] > lambda_grid[k + 1]))
            throw InputError("logistic path: grid must be strictly descending");
    if (lambda_grid.empty() || lambda_grid.back() <= 0.0)
        throw InputError("logistic path: grid must be positive and nonempty");

    Vector beta = Vector::Zero(p);
    double b0 = std::log(data.y.mean() / (1.0 - data.y.mean()));

    SolutionPath path;
    path.scheme.scheme = PenaltyScheme::alasso;
    path.max_steps = static_cast<int>(lambda_grid.size());
    const double kkt_tol = 1e-8 * std::max(1.0, lambda_grid.front());

    bool diverged = false;
    for (std::size_t g = 0; g < lambda_grid.size() && !diverged; ++g) {
        const double lam = lambda_grid[g];
        bool converged = false;
        for (int outer = 0; outer < 500 && !converged; ++outer) {
            Vector eta = data.X * beta;
            eta.array() += b0;
            const Vector mu = sigmoid(eta);
            const Vector w = (mu.array() * (1.0 - mu.array())).max(1e-10).matrix();
            const Vector z = eta + ((data.y - mu).array() / w.array()).matrix();
            // one full cycle of penalized weighted least squares
            Vector r = z - eta;
            for (int j = 0; j < p; ++j) {
                const double wx2 = (w.array() * data.X.col(j).array().square()).sum();
                if (wx2 <= 0.0) continue;
                const double zj =
                    (w.array() * data.X.col(j).array() * r.array()).sum() + wx2 * beta[j];
                double bj = zj;
                const double thr = lam * weights[j];
                bj = bj > thr ? (bj - thr) / wx2 : (bj < -thr ? (bj + thr) / wx2 : 0.0);
                if (bj != beta[j]) {
                    r -= (bj - beta[j]) * data.X.col(j);
                    beta[j] = bj;
                }
            }
            const double wsum = w.sum();
            const double db0 = (w.array() * r.array()).sum() / wsum;
            b0 += db0;
            r.array() -= db0;
            if (beta.norm() > kDivergenceNorm) {
                diverged = true;  // separable tail: truncate at the last stable knot
                break;
            }
            // exact KKT check on the true (non-quadratic) objective
            Vector eta2 = data.X * beta;
            eta2.array() += b0;
            const Vector grad = data.X.transpose() * (data.y - sigmoid(eta2));
            const double g0 = (data.y - sigmoid(eta2)).sum();
            double viol = std::abs(g0);
            for (int j = 0; j < p; ++j) {
                if (beta[j] != 0.0)
                    viol = std::max(viol, std::abs(grad[j] - lam * weights[j] *
                                                                 (beta[j] > 0 ? 1.0 : -1.0)));
                else
                    viol = std::max(viol, std::max(0.0, std::abs(grad[j]) - lam * weights[j]));
            }
            converged = viol <= kkt_tol;
        }
        if (diverged || !converged) break;  // keep the knots fitted so far

        TransitionPoint tp;
        tp.step = static_cast<int>(path.points.size());
        tp.lambda = lam;
        tp.coefficients = beta;
        tp.intercept = b0;
        for (int j = 0; j < p; ++j)
            if (beta[j] != 0.0) tp.active_set.push_back(j);
        path.points.push_back(std::move(tp));
    }
    return path;
}

double glm_mcv(const GlmDataset& data, const IndexSet& model, int K,
               const std::string& loss, std::uint64_t seed) {
    validate(data);
    if (loss != "deviance" && loss != "misclass")
        throw UnknownCriterion("glm_mcv: loss must be deviance or misclass");
    const int n = data.n();
    const std::vector<int> fold = make_folds(n, K, seed);
    const Matrix Xm = submatrix(data.X, model);
    double total = 0.0;
    for (int f = 0; f < K; ++f) {
        int test_count = 0;
        for (int i = 0; i < n; ++i) test_count += fold[i] == f;
        GlmDataset train;
        train.X.resize(n - test_count, Xm.cols());
        train.y.resize(n - test_count);
        int r = 0;
        for (int i = 0; i < n; ++i) {
            if (fold[i] == f) continue;
            train.X.row(r) = Xm.row(i);
            train.y[r++] = data.y[i];
        }
        CoefficientVector fit;
        try {
            fit = logistic_mle(train);
        } catch (const NumericError&) {
            std::clog << "glm_mcv: fold " << f << " separable, ridge-stabilized refit\n";
            fit = logistic_ridge(train, 1e-4);
        }
        Vector eta(test_count);
        Vector ytest(test_count);
        int t = 0;
        for (int i = 0; i < n; ++i)
            if (fold[i] == f) {
                eta[t] = Xm.row(i).dot(fit.values) + *fit.intercept;
                ytest[t++] = data.y[i];
            }
        const Vector prob = sigmoid(eta);
        if (loss == "deviance") {
            total += deviance_loss(prob, ytest);
        } else {
            for (int i = 0; i < test_count; ++i)
                total += (prob[i] > 0.5 ? 1.0 : 0.0) != ytest[i];
        }
    }
    return total / n;
}

DimensionTable glm_mf_table(const GlmDataset& data, double gamma, int B,
                            std::uint64_t master_seed) {
    validate(data);
    if (B < 1) throw InputError("glm_mf_table: B must be >= 1");
    DimensionTable table;
    table.B = B;
    table.p = data.p();
    table.counts.resize(data.p());
    for (int b = 0; b < B; ++b) {
        try {
            Rng rng(derive_seed(master_seed, b, 0));
            GlmDataset boot;
            boot.X.resize(data.n(), data.p());
            boot.y.resize(data.n());
            for (int i = 0; i < data.n(); ++i) {
                const int k = static_cast<int>(
                    rng.uniform_below(static_cast<std::uint64_t>(data.n())));
                boot.X.row(i) = data.X.row(k);
                boot.y[i] = data.y[k];
            }
            CoefficientVector pilot;
            try {
                pilot = logistic_mle(boot);
            } catch (const NumericError&) {
                pilot = logistic_ridge(boot, 1e-4);
            }
            Vector w(data.p());
            for (int j = 0; j < data.p(); ++j)
                w[j] = std::pow(std::max(std::abs(pilot.values[j]), 1e-8), -gamma);
            const SolutionPath path =
                logistic_adaptive_lasso_path(boot, w, glm_lambda_grid(boot, w));
            for (int j = 1; j <= data.p(); ++j)
                if (auto model = last_model_of_size(path, j))
                    ++table.counts[j - 1][*model];
        } catch (const Error&) {
            ++table.failed;
        }
    }
    return table;
}

SelectionResult glm_wmf_select(const GlmDataset& data, int B, const CvConfig& cfg,
                               std::uint64_t master_seed, double gamma) {
    const DimensionTable table = glm_mf_table(data, gamma, B, master_seed);
    return glm_wmf_from_table(data, table, cfg, derive_seed(master_seed, 0, 1));
}

SelectionResult glm_wmf_from_table(const GlmDataset& data,
                                   const DimensionTable& table,
                                   const CvConfig& cfg, std::uint64_t cv_seed) {
    if (table.empty()) throw EmptyTable("glm_wmf_select: no tallied models");
    const int p = data.p();

    std::vector<double> errors(p - 1, std::numeric_limits<double>::quiet_NaN());
    for (int j = 1; j <= p - 1; ++j)
        if (const IndexSet* model = table.top_model(j))
            errors[j - 1] = glm_mcv(data, *model, cfg.K, "deviance", cv_seed);

    IndexSet full(p);
    std::iota(full.begin(), full.end(), 0);
    const double dhat = glm_mcv(data, full, cfg.K, "deviance", cv_seed);
    if (!(dhat > 0.0)) throw NonPositiveSigma("glm_wmf_select: zero deviance scale");
    const double scale = cfg.c * dhat;

    double lo = std::numeric_limits<double>::infinity();
    for (double e : errors)
        if (std::isfinite(e)) lo = std::min(lo, e);
    std::vector<double> weights(errors.size(), 0.0);
    double wsum = 0.0;
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (!std::isfinite(errors[i])) continue;
        weights[i] = std::exp(-(errors[i] - lo) / scale);
        wsum += weights[i];
    }

    SelectionResult res;
    res.method = "glm-wmf";
    res.sigma2 = dhat;
    int best_dim = 0;
    double best_wmf = -1.0;
    for (int j = 1; j <= p - 1; ++j) {
        const double wj = wsum > 0.0 ? weights[j - 1] / wsum : 0.0;
        DimensionDiagnostic d;
        d.dim = j;
        d.mf_freq = static_cast<double>(table.mf(j)) / table.B;
        d.mcv = errors[j - 1];
        d.weight = wj;
        d.wmf = wj * table.mf(j);
        res.diagnostics.push_back(d);
        if (table.mf(j) > 0 && d.wmf >= best_wmf) {
            best_wmf = d.wmf;
            best_dim = j;
        }
    }
    if (best_dim == 0) throw EmptyTable("glm_wmf_select: no selectable dimension");
    res.dimension = best_dim;
    res.model = *table.top_model(best_dim);
    return res;
}

std::vector<int> classify(const Vector& probabilities, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0))
        throw InputError("classify: threshold must be in (0,1)");
    std::vector<int> out(probabilities.size());
    for (int i = 0; i < probabilities.size(); ++i)
        out[i] = probabilities[i] > threshold ? 1 : 0;
    return out;
}

} // namespace wmf
