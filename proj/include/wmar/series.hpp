#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wmar/grid.hpp"

namespace wmar {

/// An N-feature panel of quantile grids over consecutive time instants.
/// cells[i][t] is feature i at instant t; all cells share one grid.
class DistSeries {
public:
    DistSeries(std::vector<std::string> labels,
               std::vector<std::vector<QuantileGrid>> cells,
               std::vector<std::int64_t> times = {});

    std::size_t n_features() const noexcept { return cells_.size(); }
    std::size_t n_instants() const noexcept { return cells_.empty() ? 0 : cells_.front().size(); }
    const Grid& grid() const { return cells_.front().front().grid(); }

    const QuantileGrid& at(std::size_t feature, std::size_t t) const { return cells_[feature][t]; }
    const std::vector<QuantileGrid>& feature(std::size_t i) const { return cells_[i]; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    const std::vector<std::int64_t>& times() const noexcept { return times_; }

    /// Cross-section at one instant, ordered by feature.
    std::vector<QuantileGrid> instant(std::size_t t) const;

    /// First `n_instants` instants, same features.
    DistSeries prefix(std::size_t n_instants) const;

private:
    std::vector<std::string> labels_;
    std::vector<std::vector<QuantileGrid>> cells_;
    std::vector<std::int64_t> times_;
};

} // namespace wmar
