#pragma once

#include <span>
#include <vector>

#include "wmar/grid.hpp"

namespace wmar {

/// Empirical quantile function of raw samples in [0, 1], sampled on the grid.
///
/// Uses the upper-inverse convention v_k = x_(floor(n p_k) + 1) (order
/// statistics, 1-based), i.e. the smallest sample with strictly more than
/// p_k empirical mass below-or-at it. At p = 0 this yields the minimum.
QuantileGrid empirical_quantile(std::span<const double> samples, const Grid& grid);

/// Left-continuous inverse of a nondecreasing grid function with values in
/// [0, 1]: g(p) = inf{x : f(x) >= p} on the piecewise-linear interpolant.
/// g(0) is the left edge of f's support, inf{x : f(x) > 0}. Where no x
/// qualifies the domain supremum 1 is returned.
QuantileGrid left_inverse(const QuantileGrid& f);

/// Pointwise composition (f o g)(p) = f(g(p)) by piecewise-linear
/// interpolation of f with constant extrapolation at the domain ends.
QuantileGrid compose(const QuantileGrid& f, const QuantileGrid& g);

/// Quantile re-expression of F relative to G: F o G^{-1}, the optimal
/// transport map from G's measure to F's. Identity when F = G and G is
/// strictly increasing.
QuantileGrid ominus(const QuantileGrid& F, const QuantileGrid& G);

/// Inverse of ominus: composition Ftil o G, mapping a transported
/// representation back through G.
QuantileGrid oplus(const QuantileGrid& Ftil, const QuantileGrid& G);

/// L2([0,1]) inner product of two grid functions: trapezoid rule on
/// [0, 1-h] plus the constant tail on [1-h, 1].
double inner_leb(const QuantileGrid& f, const QuantileGrid& g);

/// L2 Wasserstein distance between the measures with quantile functions F
/// and G, computed as sqrt(inner_leb(F-G, F-G)).
double wasserstein(const QuantileGrid& F, const QuantileGrid& G);

/// Pointwise average of quantile functions; minimizes the empirical sum of
/// squared Wasserstein distances.
QuantileGrid frechet_mean(std::span<const QuantileGrid> grids);

/// Tangent-space coordinates at the Lebesgue measure: F - id, unconstrained.
QuantileGrid log_leb(const QuantileGrid& F);

/// Inverse of log_leb: g + id as a quantile grid. Throws when g + id is
/// decreasing or escapes [0, 1] beyond kMonotoneTol (outside the
/// logarithmic image).
QuantileGrid exp_leb(const QuantileGrid& g);

} // namespace wmar
