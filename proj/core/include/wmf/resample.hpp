#pragma once

#include <cstdint>
#include <vector>

#include "wmf/types.hpp"

namespace wmf {

struct BootstrapScheme {
    enum class Kind { paired, residual };
    Kind kind = Kind::paired;
    // Ridge grid for the residual-mode pilot fit (BIC-tuned).
    std::vector<double> pilot_lambda2_grid = {1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3};
};

inline const char* to_string(BootstrapScheme::Kind k) {
    return k == BootstrapScheme::Kind::paired ? "paired" : "residual";
}

// n rows drawn i.i.d. with replacement from the (x_i, y_i) pairs.
Dataset paired_bootstrap(const Dataset& data, std::uint64_t seed);

// Keeps X, resamples centered pilot residuals: y*_i = x_i' pilot + e*_i.
Dataset residual_bootstrap(const Dataset& data, const CoefficientVector& pilot,
                           std::uint64_t seed);

// One bootstrap replicate under the configured scheme; residual mode fits
// its ridge pilot internally.
Dataset bootstrap_sample(const Dataset& data, const BootstrapScheme& scheme,
                         std::uint64_t seed);

} // namespace wmf
