#include "wmar/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace wmar {

Grid::Grid(double granularity) {
    if (!(granularity > 0.0) || !(granularity < 1.0)) {
        throw Error("grid granularity must lie in (0, 1), got " + std::to_string(granularity));
    }
    const double m_real = 1.0 / granularity;
    const auto m = static_cast<std::size_t>(std::llround(m_real));
    if (m < 2 || std::abs(granularity * static_cast<double>(m) - 1.0) > 1e-9) {
        throw Error("grid granularity must divide 1 into at least 2 nodes, got "
                    + std::to_string(granularity));
    }
    m_ = m;
    h_ = 1.0 / static_cast<double>(m);
}

Grid Grid::with_nodes(std::size_t m) {
    if (m < 2) throw Error("grid needs at least 2 nodes");
    return Grid(1.0 / static_cast<double>(m));
}

std::vector<double> Grid::points() const {
    std::vector<double> p(m_);
    for (std::size_t k = 0; k < m_; ++k) p[k] = point(k);
    return p;
}

QuantileGrid::QuantileGrid(Grid grid, std::vector<double> values, GridRole role)
    : grid_(grid), values_(std::move(values)), role_(role) {
    if (values_.size() != grid_.size()) {
        throw Error("grid function has " + std::to_string(values_.size()) + " values for "
                    + std::to_string(grid_.size()) + " grid nodes");
    }
    if (role_ == GridRole::unconstrained) return;

    for (std::size_t k = 0; k + 1 < values_.size(); ++k) {
        if (values_[k + 1] < values_[k] - kMonotoneTol) {
            throw Error("grid function decreases at node " + std::to_string(k + 1) + " ("
                        + std::to_string(values_[k]) + " -> " + std::to_string(values_[k + 1]) + ")");
        }
    }
    if (role_ == GridRole::quantile) {
        for (std::size_t k = 0; k < values_.size(); ++k) {
            if (values_[k] < -kMonotoneTol || values_[k] > 1.0 + kMonotoneTol) {
                throw Error("quantile value " + std::to_string(values_[k]) + " at node "
                            + std::to_string(k) + " falls outside [0, 1]");
            }
        }
        for (double& v : values_) v = std::clamp(v, 0.0, 1.0);
    }
    // Snap rounding noise so the stored values are exactly nondecreasing.
    for (std::size_t k = 1; k < values_.size(); ++k) {
        values_[k] = std::max(values_[k], values_[k - 1]);
    }
}

QuantileGrid QuantileGrid::identity(const Grid& grid) {
    return QuantileGrid(grid, grid.points(), GridRole::quantile);
}

QuantileGrid QuantileGrid::point_mass(const Grid& grid, double c) {
    return QuantileGrid(grid, std::vector<double>(grid.size(), c), GridRole::quantile);
}

QuantileGrid QuantileGrid::zero(const Grid& grid) {
    return QuantileGrid(grid, std::vector<double>(grid.size(), 0.0), GridRole::unconstrained);
}

double QuantileGrid::eval(double x) const noexcept {
    const std::size_t m = values_.size();
    const double h = grid_.h();
    if (x <= 0.0) return values_.front();
    if (x >= grid_.point(m - 1)) return values_.back();
    auto k = static_cast<std::size_t>(x / h);
    if (k >= m - 1) k = m - 2;
    // Guard against floating division landing one node high/low.
    if (grid_.point(k) > x && k > 0) --k;
    if (grid_.point(k + 1) < x) ++k;
    const double t = (x - grid_.point(k)) / h;
    return values_[k] + t * (values_[k + 1] - values_[k]);
}

std::vector<double> QuantileGrid::eval_sorted(std::span<const double> xs) const {
    std::vector<double> out(xs.size());
    const std::size_t m = values_.size();
    const double h = grid_.h();
    std::size_t k = 0;
    for (std::size_t j = 0; j < xs.size(); ++j) {
        const double x = xs[j];
        if (x <= 0.0) {
            out[j] = values_.front();
            continue;
        }
        if (x >= grid_.point(m - 1)) {
            out[j] = values_.back();
            continue;
        }
        while (k + 2 < m && grid_.point(k + 1) < x) ++k;
        const double t = (x - grid_.point(k)) / h;
        out[j] = values_[k] + t * (values_[k + 1] - values_[k]);
    }
    return out;
}

bool QuantileGrid::strictly_increasing(double tol) const noexcept {
    for (std::size_t k = 0; k + 1 < values_.size(); ++k) {
        if (values_[k + 1] - values_[k] <= tol) return false;
    }
    return true;
}

} // namespace wmar
