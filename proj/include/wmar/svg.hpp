#pragma once

#include <string>
#include <vector>

#include "wmar/series.hpp"

namespace wmar {

/// One polyline of a chart.
struct SvgSeriesLine {
    std::string name;
    std::vector<std::pair<double, double>> points;
    std::string color = "#1f6fb4";
};

/// Minimal line chart: axes, ticks, legend, one polyline per series.
/// Output is well-formed standalone SVG with deterministic formatting.
std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label,
                           const std::vector<SvgSeriesLine>& series,
                           int width = 720, int height = 480);

/// Quantile fan for one feature: one polyline per time instant, with
/// lightness mapped to t (later instants lighter).
std::string quantile_fan_svg(const DistSeries& series, std::size_t feature,
                             int width = 720, int height = 480);

} // namespace wmar
