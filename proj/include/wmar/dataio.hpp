#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wmar/estimate.hpp"
#include "wmar/series.hpp"
#include "wmar/simulate.hpp"

namespace wmar {

/// Shape of a dataset on disk.
struct DatasetManifest {
    std::string format;                 ///< "samples-long" or "grid-wide"
    double grid_h = 0.0;
    std::vector<std::string> features;
    std::vector<std::int64_t> times;
};

/// Samples-long CSV (`feature,time,value`): rows are raw samples in [0, 1],
/// grouped by (feature, time) and turned into empirical quantile grids.
/// Every (feature, time) cell of the panel must be nonempty.
DistSeries read_samples_long(std::istream& in, const Grid& grid);
DistSeries read_samples_long_file(const std::string& path, const Grid& grid);

/// Grid-wide CSV (`feature,time,q_0,...,q_{M-1}`), one quantile grid per
/// row. Values must be nondecreasing along each row. Pass expected_grid to
/// reject files whose column count disagrees with a manifest.
DistSeries read_grid_wide(std::istream& in, std::optional<Grid> expected_grid = std::nullopt);
DistSeries read_grid_wide_file(const std::string& path,
                               std::optional<Grid> expected_grid = std::nullopt);

void write_grid_wide(const DistSeries& series, std::ostream& out);
void write_grid_wide_file(const DistSeries& series, const std::string& path);

/// Single quantile grid as `p,value` rows.
void write_quantile_csv(const QuantileGrid& q, std::ostream& out);
QuantileGrid read_quantile_csv(std::istream& in);
QuantileGrid read_quantile_csv_file(const std::string& path);

struct ValidationIssue {
    std::size_t feature = 0;
    std::size_t instant = 0;
    std::size_t node = 0;
    std::string kind;   ///< "decreasing" or "out-of-range"
    double value = 0.0;
};

struct ValidationReport {
    std::vector<ValidationIssue> violations;
    /// Sup-norm gap between first-half and second-half Frechet means per
    /// feature; large values hint at a mean shift over time.
    std::vector<double> drift;

    bool clean() const noexcept { return violations.empty(); }
};

/// Report-only diagnostics: per-cell monotonicity/range violations plus the
/// per-feature drift statistic.
ValidationReport validate(const DistSeries& series);

std::string to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(const std::string& text);

std::string to_json(const SimConfig& cfg);
SimConfig sim_config_from_json(const std::string& text);

/// Coefficient matrix with explicit dimension, row-major.
std::string coeffs_to_json(const Eigen::MatrixXd& a, double alpha, std::uint64_t seed);
Eigen::MatrixXd coeffs_from_json(const std::string& text);

std::string to_json(const FitReport& report);
FitReport fit_report_from_json(const std::string& text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

} // namespace wmar
