#include "wmar/series.hpp"

#include <numeric>
#include <string>

namespace wmar {

DistSeries::DistSeries(std::vector<std::string> labels,
                       std::vector<std::vector<QuantileGrid>> cells,
                       std::vector<std::int64_t> times)
    : labels_(std::move(labels)), cells_(std::move(cells)), times_(std::move(times)) {
    if (cells_.empty() || cells_.front().empty()) {
        throw Error("series needs at least one feature and one instant");
    }
    if (labels_.size() != cells_.size()) {
        throw Error("series has " + std::to_string(cells_.size()) + " features but "
                    + std::to_string(labels_.size()) + " labels");
    }
    const std::size_t t_count = cells_.front().size();
    const Grid& g = cells_.front().front().grid();
    for (const auto& row : cells_) {
        if (row.size() != t_count) throw Error("ragged series: features disagree on instant count");
        for (const QuantileGrid& q : row) {
            if (q.grid() != g) throw Error("series cells must share one grid");
        }
    }
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        for (std::size_t j = i + 1; j < labels_.size(); ++j) {
            if (labels_[i] == labels_[j]) throw Error("duplicate feature label '" + labels_[i] + "'");
        }
    }
    if (times_.empty()) {
        times_.resize(t_count);
        std::iota(times_.begin(), times_.end(), std::int64_t{0});
    } else if (times_.size() != t_count) {
        throw Error("series has " + std::to_string(t_count) + " instants but "
                    + std::to_string(times_.size()) + " time labels");
    }
}

std::vector<QuantileGrid> DistSeries::instant(std::size_t t) const {
    std::vector<QuantileGrid> out;
    out.reserve(cells_.size());
    for (const auto& row : cells_) out.push_back(row[t]);
    return out;
}

DistSeries DistSeries::prefix(std::size_t n_instants) const {
    if (n_instants == 0 || n_instants > this->n_instants()) {
        throw Error("prefix length out of range");
    }
    std::vector<std::vector<QuantileGrid>> cells;
    cells.reserve(cells_.size());
    for (const auto& row : cells_) {
        cells.emplace_back(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(n_instants));
    }
    std::vector<std::int64_t> times(times_.begin(),
                                    times_.begin() + static_cast<std::ptrdiff_t>(n_instants));
    return DistSeries(labels_, std::move(cells), std::move(times));
}

} // namespace wmar
