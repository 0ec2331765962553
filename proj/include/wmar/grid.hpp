#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wmar/error.hpp"

namespace wmar {

/// Absolute tolerance separating rounding noise from genuine constraint
/// violations in monotonicity and range checks.
inline constexpr double kMonotoneTol = 1e-9;

/// Uniform probability grid 0, h, 2h, ..., 1-h with M = round(1/h) nodes.
///
/// Functions sampled on the grid are interpreted as piecewise linear
/// between nodes and constant on the trailing interval [1-h, 1].
class Grid {
public:
    explicit Grid(double granularity);

    /// Grid with m nodes, i.e. granularity 1/m.
    static Grid with_nodes(std::size_t m);

    double h() const noexcept { return h_; }
    std::size_t size() const noexcept { return m_; }
    double point(std::size_t k) const noexcept { return static_cast<double>(k) * h_; }
    std::vector<double> points() const;

    friend bool operator==(const Grid& a, const Grid& b) noexcept { return a.m_ == b.m_; }
    friend bool operator!=(const Grid& a, const Grid& b) noexcept { return a.m_ != b.m_; }

private:
    std::size_t m_;
    double h_;
};

/// What constraints a grid function is held to.
///   quantile      - nondecreasing with values in [0, 1]
///   monotone      - nondecreasing, unbounded range
///   unconstrained - anything (tangent vectors, differences)
enum class GridRole { quantile, monotone, unconstrained };

/// A function sampled on a Grid. The default role is a quantile function
/// of a measure supported on [0, 1].
///
/// Construction validates the role's invariants up to kMonotoneTol and then
/// snaps rounding noise away, so stored values satisfy the invariants
/// exactly. Violations beyond the tolerance throw.
class QuantileGrid {
public:
    QuantileGrid(Grid grid, std::vector<double> values, GridRole role = GridRole::quantile);

    static QuantileGrid identity(const Grid& grid);
    /// Quantile function of a point mass at c.
    static QuantileGrid point_mass(const Grid& grid, double c);
    static QuantileGrid zero(const Grid& grid);

    const Grid& grid() const noexcept { return grid_; }
    const std::vector<double>& values() const noexcept { return values_; }
    GridRole role() const noexcept { return role_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t k) const noexcept { return values_[k]; }

    /// Piecewise-linear evaluation at x in [0, 1]; constant on [1-h, 1]
    /// and clamped outside the domain.
    double eval(double x) const noexcept;

    /// Batch evaluation at nondecreasing abscissae (linear-time merge).
    std::vector<double> eval_sorted(std::span<const double> xs) const;

    bool strictly_increasing(double tol = 0.0) const noexcept;

private:
    Grid grid_;
    std::vector<double> values_;
    GridRole role_;
};

} // namespace wmar
