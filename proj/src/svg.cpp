#include "wmar/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "wmar/error.hpp"

namespace wmar {

namespace {

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

std::string esc(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Frame {
    double x0, x1, y0, y1;      // data ranges
    double px0, px1, py0, py1;  // pixel box (py0 is the TOP edge)

    double sx(double x) const {
        return px0 + (px1 - px0) * (x - x0) / (x1 - x0);
    }
    double sy(double y) const {
        return py1 - (py1 - py0) * (y - y0) / (y1 - y0);
    }
};

void pad_range(double& lo, double& hi) {
    if (hi <= lo) {
        const double c = lo;
        lo = c - 0.5;
        hi = c + 0.5;
    } else {
        const double pad = 0.05 * (hi - lo);
        lo -= pad;
        hi += pad;
    }
}

void draw_axes(std::ostringstream& os, const Frame& f, const std::string& x_label,
               const std::string& y_label) {
    os << "  <g stroke=\"#444444\" stroke-width=\"1\" fill=\"none\">\n";
    os << "    <line x1=\"" << num(f.px0) << "\" y1=\"" << num(f.py1) << "\" x2=\"" << num(f.px1)
       << "\" y2=\"" << num(f.py1) << "\"/>\n";
    os << "    <line x1=\"" << num(f.px0) << "\" y1=\"" << num(f.py0) << "\" x2=\"" << num(f.px0)
       << "\" y2=\"" << num(f.py1) << "\"/>\n";
    os << "  </g>\n";
    os << "  <g font-family=\"sans-serif\" font-size=\"11\" fill=\"#222222\">\n";
    const int ticks = 5;
    for (int i = 0; i <= ticks; ++i) {
        const double fx = f.x0 + (f.x1 - f.x0) * i / ticks;
        const double fy = f.y0 + (f.y1 - f.y0) * i / ticks;
        const double px = f.sx(fx);
        const double py = f.sy(fy);
        os << "    <line x1=\"" << num(px) << "\" y1=\"" << num(f.py1) << "\" x2=\"" << num(px)
           << "\" y2=\"" << num(f.py1 + 4) << "\" stroke=\"#444444\"/>\n";
        os << "    <text x=\"" << num(px) << "\" y=\"" << num(f.py1 + 16)
           << "\" text-anchor=\"middle\">" << esc(num(fx)) << "</text>\n";
        os << "    <line x1=\"" << num(f.px0 - 4) << "\" y1=\"" << num(py) << "\" x2=\""
           << num(f.px0) << "\" y2=\"" << num(py) << "\" stroke=\"#444444\"/>\n";
        os << "    <text x=\"" << num(f.px0 - 7) << "\" y=\"" << num(py + 4)
           << "\" text-anchor=\"end\">" << esc(num(fy)) << "</text>\n";
    }
    os << "    <text x=\"" << num(0.5 * (f.px0 + f.px1)) << "\" y=\"" << num(f.py1 + 32)
       << "\" text-anchor=\"middle\">" << esc(x_label) << "</text>\n";
    os << "    <text x=\"14\" y=\"" << num(0.5 * (f.py0 + f.py1))
       << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " << num(0.5 * (f.py0 + f.py1))
       << ")\">" << esc(y_label) << "</text>\n";
    os << "  </g>\n";
}

void draw_polyline(std::ostringstream& os, const Frame& f,
                   const std::vector<std::pair<double, double>>& pts, const std::string& color,
                   double width) {
    os << "  <polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << num(width)
       << "\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i) os << ' ';
        os << num(f.sx(pts[i].first)) << ',' << num(f.sy(pts[i].second));
    }
    os << "\"/>\n";
}

} // namespace

std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<SvgSeriesLine>& series,
                           int width, int height) {
    double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
    bool first = true;
    for (const auto& s : series) {
        for (const auto& [x, y] : s.points) {
            if (first) {
                x0 = x1 = x;
                y0 = y1 = y;
                first = false;
            }
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
    }
    pad_range(x0, x1);
    pad_range(y0, y1);
    Frame f{x0, x1, y0, y1, 60.0, width - 20.0, 40.0, height - 50.0};

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    os << "  <rect width=\"" << width << "\" height=\"" << height << "\" fill=\"#ffffff\"/>\n";
    os << "  <text x=\"" << num(width / 2.0)
       << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\">"
       << esc(title) << "</text>\n";
    draw_axes(os, f, x_label, y_label);
    for (const auto& s : series) {
        draw_polyline(os, f, s.points, s.color, 1.8);
    }
    double ly = f.py0 + 6.0;
    for (const auto& s : series) {
        os << "  <line x1=\"" << num(f.px1 - 150) << "\" y1=\"" << num(ly) << "\" x2=\""
           << num(f.px1 - 126) << "\" y2=\"" << num(ly) << "\" stroke=\"" << s.color
           << "\" stroke-width=\"2\"/>\n";
        os << "  <text x=\"" << num(f.px1 - 120) << "\" y=\"" << num(ly + 4)
           << "\" font-family=\"sans-serif\" font-size=\"11\">" << esc(s.name) << "</text>\n";
        ly += 16.0;
    }
    os << "</svg>\n";
    return os.str();
}

std::string quantile_fan_svg(const DistSeries& series, std::size_t feature, int width,
                             int height) {
    if (feature >= series.n_features()) throw Error("quantile_fan_svg: feature out of range");
    Frame f{0.0, 1.0, 0.0, 1.0, 60.0, width - 20.0, 40.0, height - 50.0};
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    os << "  <rect width=\"" << width << "\" height=\"" << height << "\" fill=\"#ffffff\"/>\n";
    os << "  <text x=\"" << num(width / 2.0)
       << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\">"
       << esc("quantile fan: " + series.labels()[feature]) << "</text>\n";
    draw_axes(os, f, "p", "quantile");
    const std::size_t t_count = series.n_instants();
    for (std::size_t t = 0; t < t_count; ++t) {
        const QuantileGrid& q = series.at(feature, t);
        std::vector<std::pair<double, double>> pts;
        pts.reserve(q.size());
        for (std::size_t k = 0; k < q.size(); ++k) {
            pts.emplace_back(q.grid().point(k), q[k]);
        }
        // Later instants lighter: lightness from 20% up to 80%.
        const double frac = t_count > 1 ? static_cast<double>(t) / static_cast<double>(t_count - 1)
                                        : 0.0;
        const int light = 20 + static_cast<int>(std::lround(60.0 * frac));
        char color[48];
        std::snprintf(color, sizeof(color), "hsl(210,70%%,%d%%)", light);
        draw_polyline(os, f, pts, color, 1.0);
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace wmar
