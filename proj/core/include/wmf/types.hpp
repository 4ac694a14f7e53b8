#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace wmf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Zero-based, sorted, duplicate-free column indices identifying a candidate model.
using IndexSet = std::vector<int>;

struct Dataset {
    Matrix X;                           // n x p design matrix
    Vector y;                           // n response
    std::optional<IndexSet> truth;      // true support when simulated
    std::vector<std::string> names;     // optional column names (empty when unnamed)

    int n() const { return static_cast<int>(X.rows()); }
    int p() const { return static_cast<int>(X.cols()); }
};

struct CoefficientVector {
    Vector values;                      // length p
    std::optional<double> intercept;   // present only when a fit centered the data

    IndexSet support(double tol = 0.0) const {
        IndexSet s;
        for (int j = 0; j < values.size(); ++j)
            if (std::abs(values[j]) > tol) s.push_back(j);
        return s;
    }
};

enum class PenaltyScheme { lasso, alasso, enet, aenet };

struct PenaltySpec {
    PenaltyScheme scheme = PenaltyScheme::alasso;
    double gamma = 1.0;                 // adaptive weight exponent; ignored for plain penalties
    double lambda2 = 0.0;               // ridge component; forced to 0 for lasso/alasso

    bool adaptive() const {
        return scheme == PenaltyScheme::alasso || scheme == PenaltyScheme::aenet;
    }
    bool has_ridge() const {
        return scheme == PenaltyScheme::enet || scheme == PenaltyScheme::aenet;
    }
};

inline const char* to_string(PenaltyScheme s) {
    switch (s) {
        case PenaltyScheme::lasso:  return "lasso";
        case PenaltyScheme::enet:   return "enet";
        case PenaltyScheme::alasso: return "alasso";
        case PenaltyScheme::aenet:  return "aenet";
    }
    return "?";
}

} // namespace wmf
