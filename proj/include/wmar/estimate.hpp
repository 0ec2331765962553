#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wmar/series.hpp"

namespace wmar {

/// Lag-0 and lag-1 Gram matrices of the log-mapped series.
/// gamma0 is symmetric positive semidefinite.
struct GramPair {
    Eigen::MatrixXd gamma0;
    Eigen::MatrixXd gamma1;
};

struct FitOptions {
    double tol = 1e-4;          ///< stop when consecutive row iterates are this close in l2
    std::size_t max_iter = 50000;
    double ridge = 0.0;         ///< added to gamma0's diagonal on near-singularity (0 = refuse)

    void validate() const;
};

/// Per-row outcome of the constrained solver.
struct RowFit {
    Eigen::VectorXd coeffs;
    std::size_t iterations = 0;
    double objective = 0.0;
    bool converged = true;
};

struct FitReport {
    Eigen::MatrixXd a_hat;
    std::optional<Eigen::MatrixXd> a_unconstrained; ///< present when gamma0 is invertible
    GramPair gram;
    std::vector<QuantileGrid> means;
    std::vector<std::string> labels;
    double grid_h = 0.0;
    std::vector<std::size_t> iterations;
    std::vector<double> objective;
    std::vector<bool> row_converged;
    FitOptions options;
    bool ridge_used = false;
    bool unconstrained_feasible = false;
    bool small_sample = false;                      ///< T < N
    std::vector<std::size_t> degenerate_features;   ///< centering warnings, feature indices
};

struct CenteredSeries {
    DistSeries series;
    std::vector<QuantileGrid> means;
    std::vector<std::size_t> degenerate_features;
};

/// Centers every instant by the feature's empirical Frechet mean
/// (pointwise average of the quantile functions over all instants).
/// Features whose mean plateaus where the raw measures carry mass are
/// flagged as degenerate.
CenteredSeries center_series(const DistSeries& raw);

/// Empirical Gram matrices over transitions t = 1..T:
/// gamma0[j,l] = (1/T) sum_t <X_{j,t-1} - id, X_{l,t-1} - id>,
/// gamma1[j,l] = (1/T) sum_t <X_{j,t}   - id, X_{l,t-1} - id>.
/// gamma0 is symmetrized to remove rounding asymmetry.
GramPair gram(const DistSeries& centered);

/// Unconstrained least squares gamma1 * gamma0^{-1}. Throws
/// GramSingularError when gamma0's condition number exceeds 1e12.
Eigen::MatrixXd lse_unconstrained(const GramPair& g);

/// Euclidean projection onto {x : x >= 0, sum x <= 1}.
Eigen::VectorXd project_simplex(const Eigen::VectorXd& v);

/// One coefficient row by accelerated projected gradient descent with
/// fixed step 1/lambda_max(gamma0), zero initialization and
/// function-value restart. Stops when consecutive iterates are within
/// opts.tol in l2, or flags non-convergence at opts.max_iter.
RowFit fit_row(const GramPair& g, Eigen::Index row, const FitOptions& opts = {});

/// Full pipeline: center, Gram matrices, per-row constrained least
/// squares. Near-singular gamma0 is a hard error unless opts.ridge > 0,
/// in which case the diagonal is lifted and the report flagged.
FitReport fit(const DistSeries& raw, const FitOptions& opts = {});

/// Relative estimation error |a_hat - a|_F / |a|_F.
double rmsd(const Eigen::MatrixXd& a_hat, const Eigen::MatrixXd& a);

/// One-step-ahead forecast: centers last_raw with the report's means,
/// pushes through the fitted coefficients and un-centers.
std::vector<QuantileGrid> forecast(const FitReport& report,
                                   const std::vector<QuantileGrid>& last_raw);

} // namespace wmar
