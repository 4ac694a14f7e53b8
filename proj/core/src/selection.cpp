#include "wmf/selection.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "wmf/errors.hpp"
#include "wmf/estimators.hpp"
#include "wmf/rng.hpp"

namespace wmf {

namespace {

constexpr double kSigmaFloor = 1e-12;

Matrix submatrix(const Matrix& X, const IndexSet& cols) {
    Matrix out(X.rows(), static_cast<int>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i) out.col(static_cast<int>(i)) = X.col(cols[i]);
    return out;
}

Vector restricted_ols(const Matrix& Xm, const Vector& y) {
    Eigen::LDLT<Matrix> ldlt(Xm.transpose() * Xm);
    const Vector d = ldlt.vectorD();
    if (ldlt.info() != Eigen::Success || d.minCoeff() <= d.maxCoeff() * 1e-12)
        throw SingularDesign("restricted OLS refit: singular Gram matrix");
    return ldlt.solve(Xm.transpose() * y);
}

double lchoose(int p, int k) {
    return std::lgamma(p + 1.0) - std::lgamma(k + 1.0) - std::lgamma(p - k + 1.0);
}

} // namespace

bool DimensionTable::empty() const {
    for (const auto& m : counts)
        if (!m.empty()) return false;
    return true;
}

int DimensionTable::mf(int dim) const {
    if (dim < 1 || dim > p) return 0;
    int best = 0;
    for (const auto& [model, count] : counts[dim - 1]) best = std::max(best, count);
    return best;
}

const IndexSet* DimensionTable::top_model(int dim) const {
    if (dim < 1 || dim > p) return nullptr;
    const IndexSet* best = nullptr;
    int best_count = 0;
    for (const auto& [model, count] : counts[dim - 1]) {
        if (count > best_count) {  // map order makes ties lexicographic-smallest
            best_count = count;
            best = &model;
        }
    }
    return best;
}

std::vector<int> make_folds(int n, int K, std::uint64_t seed) {
    if (K < 2 || K > n) throw FoldTooSmall("fold count must satisfy 2 <= K <= n");
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    for (int i = n - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(i) + 1));
        std::swap(order[i], order[j]);
    }
    std::vector<int> fold(n);
    const int base = n / K, extra = n % K;
    int pos = 0;
    for (int f = 0; f < K; ++f) {
        const int len = base + (f < extra ? 1 : 0);
        for (int t = 0; t < len; ++t) fold[order[pos++]] = f;
    }
    return fold;
}

DimensionTable mf_table(const Dataset& data, const PenaltySpec& penalty,
                        const BootstrapScheme& scheme, int B,
                        std::uint64_t master_seed) {
    if (B < 1) throw InputError("mf_table: B must be >= 1");
    DimensionTable table;
    table.B = B;
    table.p = data.p();
    table.counts.resize(data.p());
    const int max_steps = default_max_steps(data);
    for (int b = 0; b < B; ++b) {
        try {
            const Dataset boot =
                bootstrap_sample(data, scheme, derive_seed(master_seed, b, 0));
            const SolutionPath path = fit_path(boot, penalty, max_steps);
            for (int j = 1; j <= data.p(); ++j)
                if (auto model = last_model_of_size(path, j))
                    ++table.counts[j - 1][*model];
        } catch (const Error&) {
            ++table.failed;  // replicate dropped; B stays the denominator
        }
    }
    return table;
}

SelectionResult mf_select(const DimensionTable& table) {
    if (table.empty()) throw EmptyTable("mf_select: no tallied models");
    SelectionResult res;
    res.method = "mf";
    int best_dim = 0, best_mf = 0;
    for (int j = 1; j <= table.p - 1; ++j) {
        const int mfj = table.mf(j);
        DimensionDiagnostic d;
        d.dim = j;
        d.mf_freq = static_cast<double>(mfj) / table.B;
        res.diagnostics.push_back(d);
        if (mfj >= best_mf && mfj > 0) {  // >= keeps the highest dimension on ties
            best_mf = mfj;
            best_dim = j;
        }
    }
    if (best_dim == 0) throw EmptyTable("mf_select: no selectable dimension");
    res.dimension = best_dim;
    res.model = *table.top_model(best_dim);
    return res;
}

double mcv_error(const Dataset& data, const IndexSet& model, int K,
                 std::uint64_t seed) {
    if (model.empty()) throw InputError("mcv_error: empty model");
    const int n = data.n();
    const std::vector<int> fold = make_folds(n, K, seed);
    const Matrix Xm = submatrix(data.X, model);
    double total = 0.0;
    for (int f = 0; f < K; ++f) {
        int test_count = 0;
        for (int i = 0; i < n; ++i) test_count += fold[i] == f;
        const int train_count = n - test_count;
        if (train_count < static_cast<int>(model.size()) + 1)
            throw FoldTooSmall("mcv_error: training fold too small for refit");
        Matrix Xtr(train_count, Xm.cols());
        Vector ytr(train_count);
        int r = 0;
        for (int i = 0; i < n; ++i) {
            if (fold[i] == f) continue;
            Xtr.row(r) = Xm.row(i);
            ytr[r++] = data.y[i];
        }
        const Vector beta = restricted_ols(Xtr, ytr);
        for (int i = 0; i < n; ++i)
            if (fold[i] == f) {
                const double err = data.y[i] - Xm.row(i).dot(beta);
                total += err * err;
            }
    }
    return total / n;
}

double mcv_error_penalized(const Dataset& data, const IndexSet& model,
                           const PenaltySpec& penalty, int K, std::uint64_t seed) {
    if (model.empty()) throw InputError("mcv_error_penalized: empty model");
    const int n = data.n();
    const std::vector<int> fold = make_folds(n, K, seed);
    const Matrix Xm = submatrix(data.X, model);
    const int k = static_cast<int>(model.size());
    double total = 0.0;
    for (int f = 0; f < K; ++f) {
        int test_count = 0;
        for (int i = 0; i < n; ++i) test_count += fold[i] == f;
        const int train_count = n - test_count;
        if (train_count < k + 1)
            throw FoldTooSmall("mcv_error_penalized: training fold too small");
        Dataset train;
        train.X.resize(train_count, k);
        train.y.resize(train_count);
        int r = 0;
        for (int i = 0; i < n; ++i) {
            if (fold[i] == f) continue;
            train.X.row(r) = Xm.row(i);
            train.y[r++] = data.y[i];
        }
        const SolutionPath path = fit_path(train, penalty, default_max_steps(train));
        // the penalized estimator "under model M": last knot with all columns in
        Vector beta = path.points.back().coefficients;
        for (auto it = path.points.rbegin(); it != path.points.rend(); ++it)
            if (static_cast<int>(it->active_set.size()) == k) {
                beta = it->coefficients;
                break;
            }
        for (int i = 0; i < n; ++i)
            if (fold[i] == f) {
                const double err = data.y[i] - Xm.row(i).dot(beta);
                total += err * err;
            }
    }
    return total / n;
}

double sigma2_estimate(const Dataset& data) {
    if (data.n() < 3) throw InputError("sigma2_estimate: need n >= 3");
    const int n = data.n(), p = data.p();
    if (n > p + 1 && gram_condition(data.X) <= kConditionBound) {
        const CoefficientVector fit = ols_fit(data);
        const double sse = (data.y - data.X * fit.values).squaredNorm();
        return std::max(sse / (n - p), kSigmaFloor);
    }
    static const std::vector<double> grid = {1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3};
    const auto [fit, l2] = ridge_tune_bic(data, grid);
    const double sse = (data.y - data.X * fit.values).squaredNorm();
    Eigen::SelfAdjointEigenSolver<Matrix> es(data.X.transpose() * data.X,
                                             Eigen::EigenvaluesOnly);
    double df = 0.0;
    for (int i = 0; i < es.eigenvalues().size(); ++i)
        df += es.eigenvalues()[i] / (es.eigenvalues()[i] + l2);
    if (n - df < 1.0) throw SingularDesign("sigma2_estimate: no residual df");
    return std::max(sse / (n - df), kSigmaFloor);
}

std::vector<double> dimension_weights(const std::vector<double>& errors,
                                      const CvConfig& cfg, const Dataset& data) {
    const double s2 = cfg.sigma2 ? *cfg.sigma2 : sigma2_estimate(data);
    if (!(s2 > 0.0)) throw NonPositiveSigma("dimension_weights: sigma^2 <= 0");
    const double scale = cfg.c * s2;
    double lo = std::numeric_limits<double>::infinity();
    for (double e : errors)
        if (std::isfinite(e)) lo = std::min(lo, e);
    std::vector<double> w(errors.size(), 0.0);
    if (!std::isfinite(lo)) return w;
    double total = 0.0;
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (!std::isfinite(errors[i])) continue;
        w[i] = std::exp(-(errors[i] - lo) / scale);
        total += w[i];
    }
    for (double& v : w) v /= total;
    return w;
}

SelectionResult wmf_select(const Dataset& data, const PenaltySpec& penalty,
                           const BootstrapScheme& scheme, int B,
                           const CvConfig& cfg, std::uint64_t master_seed) {
    const DimensionTable table = mf_table(data, penalty, scheme, B, master_seed);
    // one shared fold partition keeps the per-size errors comparable
    return wmf_from_table(data, table, penalty, cfg, derive_seed(master_seed, 0, 1));
}

SelectionResult wmf_from_table(const Dataset& data, const DimensionTable& table,
                               const PenaltySpec& penalty, const CvConfig& cfg,
                               std::uint64_t cv_seed) {
    if (table.empty()) throw EmptyTable("wmf_select: no tallied models");
    const int p = data.p();

    std::vector<double> errors(p - 1, std::numeric_limits<double>::quiet_NaN());
    for (int j = 1; j <= p - 1; ++j) {
        const IndexSet* model = table.top_model(j);
        if (!model) continue;
        errors[j - 1] = cfg.penalized_refit
                            ? mcv_error_penalized(data, *model, penalty, cfg.K, cv_seed)
                            : mcv_error(data, *model, cfg.K, cv_seed);
    }
    const std::vector<double> weights = dimension_weights(errors, cfg, data);

    SelectionResult res;
    res.method = "wmf";
    res.sigma2 = cfg.sigma2 ? *cfg.sigma2 : sigma2_estimate(data);
    int best_dim = 0;
    double best_wmf = -1.0;
    for (int j = 1; j <= p - 1; ++j) {
        DimensionDiagnostic d;
        d.dim = j;
        d.mf_freq = static_cast<double>(table.mf(j)) / table.B;
        d.mcv = errors[j - 1];
        d.weight = weights[j - 1];
        d.wmf = weights[j - 1] * table.mf(j);
        res.diagnostics.push_back(d);
        if (table.mf(j) > 0 && d.wmf >= best_wmf) {  // ties -> higher dimension
            best_wmf = d.wmf;
            best_dim = j;
        }
    }
    if (best_dim == 0) throw EmptyTable("wmf_select: no selectable dimension");
    res.dimension = best_dim;
    res.model = *table.top_model(best_dim);
    return res;
}

SelectionResult criterion_select(const Dataset& data, const SolutionPath& path,
                                 const std::string& criterion, const CvConfig& cfg) {
    if (path.points.empty()) throw InputError("criterion_select: empty path");
    const int n = data.n(), p = data.p();
    const auto& pts = path.points;

    auto information_pick = [&](auto&& score) {
        int best = 0;
        double best_val = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < pts.size(); ++k) {
            const double sse = (data.y - data.X * pts[k].coefficients).squaredNorm();
            const double val = score(sse, static_cast<int>(pts[k].active_set.size()));
            if (val < best_val) {  // ties keep the earlier (sparser, larger-lambda) knot
                best_val = val;
                best = static_cast<int>(k);
            }
        }
        return best;
    };

    int pick = -1;
    if (criterion == "bic") {
        pick = information_pick([&](double sse, int k) {
            return n * std::log(std::max(sse / n, 1e-300)) + k * std::log(n);
        });
    } else if (criterion == "ebic") {
        pick = information_pick([&](double sse, int k) {
            return n * std::log(std::max(sse / n, 1e-300)) + k * std::log(n) +
                   lchoose(p, k);
        });
    } else if (criterion == "gic") {
        pick = information_pick([&](double sse, int k) {
            return n * std::log(std::max(sse / n, 1e-300)) +
                   std::log(std::log(static_cast<double>(n))) * std::log(static_cast<double>(p)) * k;
        });
    } else if (criterion == "cp") {
        const double s2 = cfg.sigma2 ? *cfg.sigma2 : sigma2_estimate(data);
        if (!(s2 > 0.0)) throw NonPositiveSigma("criterion_select: sigma^2 <= 0");
        pick = information_pick([&](double sse, int k) {
            return sse / s2 - n + 2.0 * k;
        });
    } else if (criterion == "cv-min" || criterion == "cv-1se") {
        const std::vector<int> fold = make_folds(n, cfg.K, cfg.seed);
        const std::size_t m = pts.size();
        Matrix fold_mse(cfg.K, static_cast<int>(m));
        for (int f = 0; f < cfg.K; ++f) {
            int test_count = 0;
            for (int i = 0; i < n; ++i) test_count += fold[i] == f;
            Dataset train;
            train.X.resize(n - test_count, p);
            train.y.resize(n - test_count);
            Matrix Xte(test_count, p);
            Vector yte(test_count);
            int r = 0, t = 0;
            for (int i = 0; i < n; ++i) {
                if (fold[i] == f) {
                    Xte.row(t) = data.X.row(i);
                    yte[t++] = data.y[i];
                } else {
                    train.X.row(r) = data.X.row(i);
                    train.y[r++] = data.y[i];
                }
            }
            const SolutionPath fp = fit_path(train, path.scheme, path.max_steps);
            for (std::size_t k = 0; k < m; ++k) {
                const Vector beta = coefficients_at(fp, pts[k].lambda);
                fold_mse(f, static_cast<int>(k)) =
                    (yte - Xte * beta).squaredNorm() / test_count;
            }
        }
        Vector cv = fold_mse.colwise().mean();
        int kmin = 0;
        for (std::size_t k = 1; k < m; ++k)
            if (cv[static_cast<int>(k)] < cv[kmin]) kmin = static_cast<int>(k);
        if (criterion == "cv-min") {
            pick = kmin;
        } else {
            const Vector dev = fold_mse.col(kmin).array() - cv[kmin];
            const double se = std::sqrt(dev.squaredNorm() / (cfg.K - 1) / cfg.K);
            pick = kmin;
            for (std::size_t k = 0; k < m; ++k)
                if (cv[static_cast<int>(k)] <= cv[kmin] + se) {
                    pick = static_cast<int>(k);  // knots are ordered by decreasing lambda
                    break;
                }
        }
    } else {
        throw UnknownCriterion("criterion_select: unknown criterion '" + criterion + "'");
    }

    SelectionResult res;
    res.method = criterion;
    res.dimension = static_cast<int>(pts[pick].active_set.size());
    res.model = pts[pick].active_set;
    res.lambda = pts[pick].lambda;
    return res;
}

} // namespace wmf
