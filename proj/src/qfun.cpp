#include "wmar/qfun.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace wmar {

namespace {

void require_same_grid(const QuantileGrid& f, const QuantileGrid& g) {
    if (f.grid() != g.grid()) {
        throw Error("grid mismatch: " + std::to_string(f.size()) + " vs "
                    + std::to_string(g.size()) + " nodes");
    }
}

} // namespace

QuantileGrid empirical_quantile(std::span<const double> samples, const Grid& grid) {
    if (samples.empty()) throw Error("empirical_quantile: empty sample list");
    std::vector<double> sorted(samples.begin(), samples.end());
    for (std::size_t j = 0; j < sorted.size(); ++j) {
        if (!(sorted[j] >= 0.0 && sorted[j] <= 1.0)) {
            throw Error("empirical_quantile: sample " + std::to_string(j) + " = "
                        + std::to_string(sorted[j]) + " outside [0, 1]");
        }
    }
    std::sort(sorted.begin(), sorted.end());
    const auto n = static_cast<double>(sorted.size());
    std::vector<double> v(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        // +1e-9 keeps n*p_k from landing one ulp below an integer boundary.
        auto idx = static_cast<std::size_t>(std::floor(n * grid.point(k) + 1e-9));
        idx = std::min(idx, sorted.size() - 1);
        v[k] = sorted[idx];
    }
    return QuantileGrid(grid, std::move(v), GridRole::quantile);
}

QuantileGrid left_inverse(const QuantileGrid& f) {
    const Grid& grid = f.grid();
    const auto& v = f.values();
    const std::size_t m = grid.size();
    std::vector<double> out(m);

    // p = 0: left edge of the support, inf{x : f(x) > 0}.
    if (v.front() > 0.0) {
        out[0] = 0.0;
    } else {
        std::size_t j = 0;
        while (j < m && v[j] <= 0.0) ++j;
        out[0] = (j == m) ? 1.0 : grid.point(j - 1);
    }

    std::size_t j = 0;
    for (std::size_t k = 1; k < m; ++k) {
        const double p = grid.point(k);
        while (j < m && v[j] < p) ++j;
        if (j == m) {
            out[k] = 1.0; // target above the function's range
        } else if (j == 0) {
            out[k] = 0.0;
        } else {
            const double lo = v[j - 1];
            const double hi = v[j];
            out[k] = grid.point(j - 1) + grid.h() * (p - lo) / (hi - lo);
        }
    }
    return QuantileGrid(grid, std::move(out), GridRole::quantile);
}

QuantileGrid compose(const QuantileGrid& f, const QuantileGrid& g) {
    require_same_grid(f, g);
    if (g.role() == GridRole::unconstrained) {
        throw Error("compose: inner function must be nondecreasing");
    }
    std::vector<double> args(g.values());
    for (double& x : args) x = std::clamp(x, 0.0, 1.0);
    std::vector<double> out = f.eval_sorted(args);
    return QuantileGrid(f.grid(), std::move(out),
                        f.role() == GridRole::quantile ? GridRole::quantile : GridRole::monotone);
}

QuantileGrid ominus(const QuantileGrid& F, const QuantileGrid& G) {
    return compose(F, left_inverse(G));
}

QuantileGrid oplus(const QuantileGrid& Ftil, const QuantileGrid& G) {
    return compose(Ftil, G);
}

double inner_leb(const QuantileGrid& f, const QuantileGrid& g) {
    require_same_grid(f, g);
    const auto& a = f.values();
    const auto& b = g.values();
    const std::size_t m = a.size();
    const double h = f.grid().h();
    double acc = 0.5 * (a[0] * b[0] + a[m - 1] * b[m - 1]);
    for (std::size_t k = 1; k + 1 < m; ++k) acc += a[k] * b[k];
    acc += a[m - 1] * b[m - 1]; // constant tail on [1-h, 1]
    return acc * h;
}

double wasserstein(const QuantileGrid& F, const QuantileGrid& G) {
    require_same_grid(F, G);
    std::vector<double> d(F.size());
    for (std::size_t k = 0; k < d.size(); ++k) d[k] = F[k] - G[k];
    QuantileGrid diff(F.grid(), std::move(d), GridRole::unconstrained);
    return std::sqrt(std::max(0.0, inner_leb(diff, diff)));
}

QuantileGrid frechet_mean(std::span<const QuantileGrid> grids) {
    if (grids.empty()) throw Error("frechet_mean: empty list");
    const Grid& grid = grids.front().grid();
    std::vector<double> acc(grid.size(), 0.0);
    for (const QuantileGrid& q : grids) {
        require_same_grid(grids.front(), q);
        for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += q[k];
    }
    const auto n = static_cast<double>(grids.size());
    for (double& v : acc) v /= n;
    return QuantileGrid(grid, std::move(acc), GridRole::quantile);
}

QuantileGrid log_leb(const QuantileGrid& F) {
    std::vector<double> v(F.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = F[k] - F.grid().point(k);
    return QuantileGrid(F.grid(), std::move(v), GridRole::unconstrained);
}

QuantileGrid exp_leb(const QuantileGrid& g) {
    const Grid& grid = g.grid();
    std::vector<double> v(g.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = g[k] + grid.point(k);
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (v[k] < -kMonotoneTol || v[k] > 1.0 + kMonotoneTol) {
            throw Error("exp_leb: outside logarithmic image, value " + std::to_string(v[k])
                        + " at node " + std::to_string(k) + " escapes [0, 1]");
        }
        if (k > 0 && v[k] < v[k - 1] - kMonotoneTol) {
            throw Error("exp_leb: outside logarithmic image, decreasing at node "
                        + std::to_string(k));
        }
    }
    return QuantileGrid(grid, std::move(v), GridRole::quantile);
}

} // namespace wmar
