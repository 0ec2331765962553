#include "wmar/spline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace wmar {

void SplineSpec::validate() const {
    if (knots.size() < 3) {
        throw Error("spline needs at least 3 knots, got " + std::to_string(knots.size()));
    }
    for (std::size_t i = 0; i < knots.size(); ++i) {
        const auto& [x, y] = knots[i];
        if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0)) {
            throw Error("spline knot " + std::to_string(i) + " outside [0,1]x[0,1]");
        }
        if (i > 0) {
            if (x <= knots[i - 1].first) {
                throw Error("spline knot abscissae must be strictly increasing (knot "
                            + std::to_string(i) + ")");
            }
            if (y < knots[i - 1].second) {
                throw Error("spline knot ordinates must be nondecreasing (knot "
                            + std::to_string(i) + ")");
            }
        }
    }
}

void SplineSpec::validate_quantile_base() const {
    validate();
    const auto& first = knots.front();
    const auto& last = knots.back();
    if (first.first != 0.0 || first.second != 0.0 || last.first != 1.0 || last.second != 1.0) {
        throw Error("quantile-base spline must run from (0,0) to (1,1)");
    }
}

std::vector<double> natural_cubic_eval(const SplineSpec& spec, std::span<const double> xs) {
    spec.validate();
    const std::size_t n = spec.knots.size();
    std::vector<double> x(n), y(n), dx(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = spec.knots[i].first;
        y[i] = spec.knots[i].second;
    }
    for (std::size_t i = 0; i + 1 < n; ++i) dx[i] = x[i + 1] - x[i];

    // Second derivatives with natural boundary conditions, by the standard
    // tridiagonal (Thomas) solve.
    std::vector<double> m2(n, 0.0);
    if (n > 2) {
        const std::size_t inner = n - 2;
        std::vector<double> diag(inner), rhs(inner), upper(inner, 0.0);
        for (std::size_t i = 0; i < inner; ++i) {
            diag[i] = 2.0 * (dx[i] + dx[i + 1]);
            rhs[i] = 6.0 * ((y[i + 2] - y[i + 1]) / dx[i + 1] - (y[i + 1] - y[i]) / dx[i]);
            if (i + 1 < inner) upper[i] = dx[i + 1];
        }
        for (std::size_t i = 1; i < inner; ++i) {
            const double w = dx[i] / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        m2[inner] = rhs[inner - 1] / diag[inner - 1];
        for (std::size_t i = inner - 1; i-- > 0;) {
            m2[i + 1] = (rhs[i] - upper[i] * m2[i + 2]) / diag[i];
        }
    }

    std::vector<double> out(xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j) {
        double t = std::clamp(xs[j], x.front(), x.back());
        auto it = std::upper_bound(x.begin(), x.end(), t);
        std::size_t i = (it == x.begin()) ? 0 : static_cast<std::size_t>(it - x.begin()) - 1;
        if (i >= n - 1) i = n - 2;
        const double d = dx[i];
        const double a = (x[i + 1] - t) / d;
        const double b = (t - x[i]) / d;
        out[j] = a * y[i] + b * y[i + 1]
                 + ((a * a * a - a) * m2[i] + (b * b * b - b) * m2[i + 1]) * d * d / 6.0;
    }
    return out;
}

std::vector<double> isotonic_projection(std::span<const double> v) {
    // Pool adjacent violators with block averaging.
    std::vector<double> level;
    std::vector<std::size_t> count;
    level.reserve(v.size());
    count.reserve(v.size());
    for (double value : v) {
        level.push_back(value);
        count.push_back(1);
        while (level.size() > 1 && level[level.size() - 2] > level.back()) {
            const double merged = (level[level.size() - 2] * static_cast<double>(count[count.size() - 2])
                                   + level.back() * static_cast<double>(count.back()))
                                  / static_cast<double>(count[count.size() - 2] + count.back());
            count[count.size() - 2] += count.back();
            level[level.size() - 2] = merged;
            level.pop_back();
            count.pop_back();
        }
    }
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t b = 0; b < level.size(); ++b) {
        out.insert(out.end(), count[b], level[b]);
    }
    return out;
}

MonotoneSplineResult monotone_spline(const SplineSpec& spec, const Grid& grid) {
    std::vector<double> raw = natural_cubic_eval(spec, grid.points());
    bool adjusted = false;
    for (std::size_t k = 0; k + 1 < raw.size(); ++k) {
        if (raw[k + 1] < raw[k]) {
            adjusted = true;
            break;
        }
    }
    if (adjusted) raw = isotonic_projection(raw);
    for (double& v : raw) {
        if (v < 0.0 || v > 1.0) adjusted = true;
        v = std::clamp(v, 0.0, 1.0);
    }
    return {QuantileGrid(grid, std::move(raw), GridRole::quantile), adjusted};
}

} // namespace wmar
