#include "wmf/resample.hpp"

#include "wmf/errors.hpp"
#include "wmf/estimators.hpp"
#include "wmf/rng.hpp"

namespace wmf {

Dataset paired_bootstrap(const Dataset& data, std::uint64_t seed) {
    const int n = data.n();
    if (n < 1) throw InputError("paired_bootstrap: empty dataset");
    Rng rng(seed);
    Dataset out;
    out.X.resize(n, data.p());
    out.y.resize(n);
    out.names = data.names;
    out.truth = data.truth;
    for (int i = 0; i < n; ++i) {
        const int k = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n)));
        out.X.row(i) = data.X.row(k);
        out.y[i] = data.y[k];
    }
    return out;
}

Dataset residual_bootstrap(const Dataset& data, const CoefficientVector& pilot,
                           std::uint64_t seed) {
    if (pilot.values.size() != data.p())
        throw InputError("residual_bootstrap: pilot length != p");
    const int n = data.n();
    const Vector fitted = data.X * pilot.values;
    Vector resid = data.y - fitted;
    resid.array() -= resid.mean();

    Rng rng(seed);
    Dataset out;
    out.X = data.X;
    out.names = data.names;
    out.truth = data.truth;
    out.y.resize(n);
    for (int i = 0; i < n; ++i) {
        const int k = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n)));
        out.y[i] = fitted[i] + resid[k];
    }
    return out;
}

Dataset bootstrap_sample(const Dataset& data, const BootstrapScheme& scheme,
                         std::uint64_t seed) {
    if (scheme.kind == BootstrapScheme::Kind::paired)
        return paired_bootstrap(data, seed);
    if (scheme.pilot_lambda2_grid.empty())
        throw InputError("residual bootstrap requires a pilot ridge grid");
    const auto pilot = ridge_tune_bic(data, scheme.pilot_lambda2_grid).first;
    return residual_bootstrap(data, pilot, seed);
}

} // namespace wmf
