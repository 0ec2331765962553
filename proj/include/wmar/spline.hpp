#pragma once

#include <utility>
#include <vector>

#include "wmar/grid.hpp"

namespace wmar {

/// Knot list for a monotone natural cubic spline on [0, 1] x [0, 1].
/// Abscissae strictly increasing, ordinates nondecreasing; when the spline
/// serves as a quantile or distortion base the first knot is (0,0) and the
/// last (1,1).
struct SplineSpec {
    std::vector<std::pair<double, double>> knots;

    void validate() const;
    /// Validates additionally that the knots start at (0,0) and end at (1,1).
    void validate_quantile_base() const;
};

/// Result of sampling a natural cubic spline on a grid. `adjusted` is set
/// when the raw spline dipped below monotone and the values were repaired
/// by isotonic projection (plus clamping to [0, 1]).
struct MonotoneSplineResult {
    QuantileGrid values;
    bool adjusted;
};

/// Natural cubic spline through the knots, evaluated at the grid nodes.
/// Decreasing stretches are repaired by pool-adjacent-violators and the
/// values are clamped to [0, 1].
MonotoneSplineResult monotone_spline(const SplineSpec& spec, const Grid& grid);

/// Raw natural cubic spline evaluation (no monotone repair), exposed for
/// oracle-style checks.
std::vector<double> natural_cubic_eval(const SplineSpec& spec, std::span<const double> xs);

/// Least-squares-preserving isotonic regression (pool adjacent violators).
std::vector<double> isotonic_projection(std::span<const double> v);

} // namespace wmar
