#include "wmf/path.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "wmf/errors.hpp"
#include "wmf/estimators.hpp"

namespace wmf {

namespace {

// Knots whose lambdas differ by less than this (relatively) merge into one
// recorded transition point, keeping lambda strictly decreasing.
constexpr double kKnotMergeRel = 1e-9;
// Candidates below this fraction of the entry lambda are treated as zero.
constexpr double kLambdaFloorRel = 1e-12;
// Pivot ratio below which an active Gram factorization counts as singular.
constexpr double kPivotRel = 1e-12;
// Band (relative to an applied event's lambda) inside which the inverse event
// for the same variable is ignored: a freshly entered variable presents its
// own entry point as a zero crossing, and a freshly dropped one re-presents
// its exit root.  The band is much wider than the solve noise in those roots.
constexpr double kStaleBandRel = 1e-7;

struct Event {
    enum Kind { none, drop, entry } kind = none;
    double lambda = 0.0;
    int var = -1;
    double sign = 0.0;  // entry only: sign of the correlation at the event
};

// Homotopy state for the plain (unit-weight) LASSO on a fixed design.
class Homotopy {
public:
    Homotopy(const Matrix& X, const Vector& y, int max_steps)
        : X_(X), y_(y), p_(static_cast<int>(X.cols())), max_steps_(max_steps),
          blocked_(p_, 0), in_active_(p_, -1) {}

    std::vector<TransitionPoint> run();

private:
    struct Applied {
        Event::Kind kind;
        int var;
        double sign;
        double lambda;
    };

    void solve_segment();
    Event best_event(double hi) const;
    bool apply(const Event& ev);
    void record(double lambda);

    const Matrix& X_;
    const Vector& y_;
    int p_;
    int max_steps_;

    std::vector<int> active_;       // entry order
    std::vector<double> signs_;
    std::vector<char> blocked_;     // entry refused until the next drop
    std::vector<int> in_active_;    // column -> position in active_, or -1

    Vector bols_;                   // segment intercepts: beta(lambda) = bols - lambda*dir
    Vector dir_;
    Vector a_;                      // inactive correlations: c_j(lambda) = a_j + lambda*b_j
    Vector b_;
    bool segment_ok_ = false;

    std::vector<Applied> recent_;   // events applied near the current lambda

    double lambda_floor_ = 0.0;
    std::vector<TransitionPoint> knots_;
};

// Scale-invariant rank probe and solver: the Gram matrix is equilibrated by
// its diagonal so wildly different column scales (adaptive weights) do not
// read as rank deficiency.
struct GramSolver {
    Eigen::LDLT<Matrix> ldlt;
    Vector scale;  // sqrt of the Gram diagonal
    bool ok = false;

    explicit GramSolver(const Matrix& Xa) {
        Matrix G = Xa.transpose() * Xa;
        scale = G.diagonal().cwiseSqrt();
        if (!(scale.minCoeff() > 0.0)) return;
        G = scale.cwiseInverse().asDiagonal() * G * scale.cwiseInverse().asDiagonal();
        ldlt.compute(G);
        const Vector dpiv = ldlt.vectorD();
        ok = ldlt.info() == Eigen::Success &&
             dpiv.minCoeff() > dpiv.maxCoeff() * kPivotRel;
    }

    Vector solve(const Vector& rhs) const {
        return (ldlt.solve((rhs.array() / scale.array()).matrix()).array() /
                scale.array())
            .matrix();
    }
};

void Homotopy::solve_segment() {
    const int k = static_cast<int>(active_.size());
    if (k == 0) {
        bols_.resize(0);
        dir_.resize(0);
        a_ = X_.transpose() * y_;
        b_ = Vector::Zero(p_);
        segment_ok_ = true;
        return;
    }
    Matrix Xa(X_.rows(), k);
    Vector s(k);
    for (int i = 0; i < k; ++i) {
        Xa.col(i) = X_.col(active_[i]);
        s[i] = signs_[i];
    }
    const GramSolver gram(Xa);
    segment_ok_ = gram.ok;
    if (!segment_ok_) return;
    bols_ = gram.solve(Xa.transpose() * y_);
    dir_ = gram.solve(s);
    const Vector r0 = y_ - Xa * bols_;
    const Vector u = Xa * dir_;
    a_ = X_.transpose() * r0;
    b_ = X_.transpose() * u;
}

Event Homotopy::best_event(double hi) const {
    Event best;
    auto suppressed = [&](Event::Kind kind, double lam, int var, double sgn) {
        for (const auto& rec : recent_) {
            if (rec.var != var) continue;
            if (lam < rec.lambda * (1.0 - kStaleBandRel) ||
                lam > rec.lambda * (1.0 + kStaleBandRel))
                continue;
            if (kind == Event::drop && rec.kind == Event::entry) return true;
            if (kind == Event::entry && rec.kind == Event::drop && sgn == rec.sign)
                return true;
        }
        return false;
    };
    auto consider = [&](Event::Kind kind, double lam, int var, double sign) {
        if (!(lam > lambda_floor_) || lam > hi) return;
        if (suppressed(kind, lam, var, sign)) return;
        if (best.kind != Event::none) {
            if (lam < best.lambda * (1.0 - kKnotMergeRel)) return;
            if (lam <= best.lambda * (1.0 + kKnotMergeRel)) {
                // same knot: drops beat entries, then lowest column index
                if (kind > best.kind) return;
                if (kind == best.kind && var > best.var) return;
            }
        }
        best = {kind, lam, var, sign};
    };

    for (int i = 0; i < static_cast<int>(active_.size()); ++i) {
        if (dir_[i] == 0.0) continue;
        const double lam = bols_[i] / dir_[i];
        consider(Event::drop, lam, active_[i], 0.0);
    }
    for (int j = 0; j < p_; ++j) {
        if (in_active_[j] >= 0 || blocked_[j]) continue;
        for (double sgn : {1.0, -1.0}) {
            const double den = 1.0 - sgn * b_[j];
            if (std::abs(den) < 1e-14) continue;
            consider(Event::entry, sgn * a_[j] / den, j, sgn);
        }
    }
    return best;
}

bool Homotopy::apply(const Event& ev) {
    if (ev.kind == Event::drop) {
        const int pos = in_active_[ev.var];
        const double old_sign = signs_[pos];
        active_.erase(active_.begin() + pos);
        signs_.erase(signs_.begin() + pos);
        in_active_[ev.var] = -1;
        for (int i = pos; i < static_cast<int>(active_.size()); ++i)
            in_active_[active_[i]] = i;
        recent_.push_back({Event::drop, ev.var, old_sign, ev.lambda});
        std::fill(blocked_.begin(), blocked_.end(), 0);
        return true;
    }
    // entry: admit only if the enlarged Gram stays invertible
    const int k = static_cast<int>(active_.size());
    Matrix Xa(X_.rows(), k + 1);
    for (int i = 0; i < k; ++i) Xa.col(i) = X_.col(active_[i]);
    Xa.col(k) = X_.col(ev.var);
    if (!GramSolver(Xa).ok) {
        blocked_[ev.var] = 1;
        return false;
    }
    in_active_[ev.var] = k;
    active_.push_back(ev.var);
    signs_.push_back(ev.sign);
    recent_.push_back({Event::entry, ev.var, ev.sign, ev.lambda});
    return true;
}

void Homotopy::record(double lambda) {
    Vector beta = Vector::Zero(p_);
    for (int i = 0; i < static_cast<int>(active_.size()); ++i)
        beta[active_[i]] = bols_[i] - lambda * dir_[i];
    // a variable is exactly zero at its own entry knot
    for (const auto& rec : recent_)
        if (rec.kind == Event::entry && in_active_[rec.var] >= 0 &&
            lambda >= rec.lambda * (1.0 - kStaleBandRel))
            beta[rec.var] = 0.0;
    IndexSet support;
    for (int j = 0; j < p_; ++j)
        if (beta[j] != 0.0) support.push_back(j);
    if (!knots_.empty() &&
        lambda >= knots_.back().lambda * (1.0 - kKnotMergeRel)) {
        // coincident events collapse into the previous transition point
        knots_.back().coefficients = std::move(beta);
        knots_.back().active_set = std::move(support);
        return;
    }
    TransitionPoint tp;
    tp.step = static_cast<int>(knots_.size());
    tp.lambda = lambda;
    tp.coefficients = std::move(beta);
    tp.active_set = std::move(support);
    knots_.push_back(std::move(tp));
}

std::vector<TransitionPoint> Homotopy::run() {
    const Vector c0 = X_.transpose() * y_;
    const double lambda0 = c0.size() > 0 ? c0.cwiseAbs().maxCoeff() : 0.0;
    TransitionPoint origin;
    origin.step = 0;
    origin.lambda = lambda0;
    origin.coefficients = Vector::Zero(p_);
    knots_.push_back(origin);
    if (lambda0 <= 0.0) return knots_;
    lambda_floor_ = lambda0 * kLambdaFloorRel;

    double lambda_cur = lambda0;  // events at lambda0 itself are admissible
    while (static_cast<int>(knots_.size()) <= max_steps_) {
        std::erase_if(recent_, [&](const Applied& rec) {
            return rec.lambda * (1.0 - kStaleBandRel) > lambda_cur;
        });
        solve_segment();
        if (!segment_ok_) break;  // defensive: rank guard failed mid-path
        const Event ev = best_event(lambda_cur);
        if (ev.kind == Event::none) {
            // no events left: close the path with the unpenalized solution
            if (!active_.empty() && knots_.back().lambda > 0.0) record(0.0);
            break;
        }
        if (apply(ev)) {
            solve_segment();
            if (!segment_ok_) break;  // unreachable: entries are rank-checked
            record(ev.lambda);
        }
        lambda_cur = ev.lambda;
    }
    return knots_;
}

void require_path_inputs(const Dataset& data, const Vector& weights, int max_steps) {
    if (!data.X.allFinite() || !data.y.allFinite())
        throw NonFiniteInput("path solver: non-finite data");
    if (weights.size() != data.p())
        throw InputError("path solver: weight length != p");
    if ((weights.array() <= 0.0).any() || !weights.allFinite())
        throw InputError("path solver: weights must be positive and finite");
    if (max_steps < 1) throw InputError("path solver: max_steps must be >= 1");
}

} // namespace

SolutionPath lars_lasso_path(const Dataset& data, const Vector& weights,
                             int max_steps) {
    require_path_inputs(data, weights, max_steps);
    Matrix Xw = data.X;
    for (int j = 0; j < data.p(); ++j) Xw.col(j) /= weights[j];
    Homotopy hom(Xw, data.y, max_steps);
    SolutionPath path;
    path.points = hom.run();
    for (auto& tp : path.points) tp.coefficients.array() /= weights.array();
    path.scheme.scheme = PenaltyScheme::alasso;
    path.scheme.lambda2 = 0.0;
    path.max_steps = max_steps;
    return path;
}

SolutionPath larsen_path(const Dataset& data, double lambda2,
                         const Vector& weights, int max_steps) {
    if (lambda2 < 0.0) throw InputError("larsen_path: lambda2 must be >= 0");
    if (lambda2 == 0.0) return lars_lasso_path(data, weights, max_steps);
    require_path_inputs(data, weights, max_steps);
    const int n = data.n(), p = data.p();
    Matrix Xa(n + p, p);
    Xa.topRows(n) = data.X;
    Xa.bottomRows(p) = std::sqrt(lambda2) * Matrix::Identity(p, p);
    for (int j = 0; j < p; ++j) Xa.col(j) /= weights[j];
    Vector ya = Vector::Zero(n + p);
    ya.head(n) = data.y;

    Homotopy hom(Xa, ya, max_steps);
    SolutionPath path;
    path.points = hom.run();
    const double rescale = 1.0 + lambda2 / n;
    for (auto& tp : path.points)
        tp.coefficients = rescale * (tp.coefficients.array() / weights.array()).matrix();
    path.scheme.scheme = PenaltyScheme::aenet;
    path.scheme.lambda2 = lambda2;
    path.max_steps = max_steps;
    path.enet_factor = rescale;
    return path;
}

CoefficientVector soft_threshold_orthogonal(const Dataset& data,
                                            const Vector& weights, double lambda) {
    if (lambda < 0.0) throw InputError("soft_threshold_orthogonal: lambda < 0");
    const Matrix gram = data.X.transpose() * data.X;
    const double dev = (gram - Matrix::Identity(data.p(), data.p()))
                           .cwiseAbs()
                           .maxCoeff();
    if (dev > 1e-8)
        throw NotOrthogonal("soft_threshold_orthogonal: X'X != I");
    CoefficientVector out;
    out.values.resize(data.p());
    const Vector xty = data.X.transpose() * data.y;
    for (int j = 0; j < data.p(); ++j) {
        const double mag = std::abs(xty[j]) - lambda * weights[j];
        out.values[j] = mag > 0.0 ? (xty[j] > 0.0 ? mag : -mag) : 0.0;
    }
    return out;
}

Vector coefficients_at(const SolutionPath& path, double lambda) {
    if (lambda < 0.0) throw InputError("coefficients_at: lambda < 0");
    const auto& pts = path.points;
    if (pts.empty()) throw InputError("coefficients_at: empty path");
    if (lambda >= pts.front().lambda)
        return Vector::Zero(pts.front().coefficients.size());
    if (lambda <= pts.back().lambda) return pts.back().coefficients;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        const double hi = pts[k].lambda, lo = pts[k + 1].lambda;
        if (lambda <= hi && lambda >= lo) {
            if (lambda == hi) return pts[k].coefficients;
            if (lambda == lo) return pts[k + 1].coefficients;
            const double t = (hi - lambda) / (hi - lo);
            return pts[k].coefficients + t * (pts[k + 1].coefficients - pts[k].coefficients);
        }
    }
    return pts.back().coefficients;
}

std::optional<IndexSet> last_model_of_size(const SolutionPath& path, int k) {
    if (k < 1) throw InputError("last_model_of_size: k must be >= 1");
    for (auto it = path.points.rbegin(); it != path.points.rend(); ++it)
        if (static_cast<int>(it->active_set.size()) == k) return it->active_set;
    return std::nullopt;
}

SolutionPath fit_path(const Dataset& data, const PenaltySpec& penalty,
                      int max_steps) {
    Vector weights;
    if (penalty.adaptive())
        weights = adaptive_weights(pilot_fit(data), penalty.gamma);
    else
        weights = Vector::Ones(data.p());
    SolutionPath path = penalty.has_ridge()
                            ? larsen_path(data, penalty.lambda2, weights, max_steps)
                            : lars_lasso_path(data, weights, max_steps);
    path.scheme = penalty;
    return path;
}

} // namespace wmf
