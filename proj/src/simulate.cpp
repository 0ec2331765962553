#include "wmar/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wmar/qfun.hpp"

namespace wmar {

void SimConfig::validate() const {
    if (n_features == 0) throw Error("simulation needs at least one feature");
    if (t_len < 1) throw Error("t_len must be at least 1");
    if (!(alpha > 0.0)) throw Error("alpha must be positive");
    if (density < 0.0 || density > 1.0) throw Error("density must lie in [0, 1]");
    Grid probe(grid_h);
    (void)probe;
}

namespace {

// Left-continuous inverse of the piecewise-linear function through
// (xs, ys), evaluated at the grid nodes. xs/ys carry one node beyond the
// grid (the virtual right endpoint).
std::vector<double> invert_extended(const std::vector<double>& xs, const std::vector<double>& ys,
                                    const Grid& grid) {
    std::vector<double> out(grid.size());
    std::size_t j = 0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double p = grid.point(k);
        if (p <= ys.front()) {
            out[k] = xs.front();
            continue;
        }
        while (j < ys.size() && ys[j] < p) ++j;
        if (j >= ys.size()) {
            out[k] = xs.back();
        } else {
            const double lo = ys[j - 1];
            const double hi = ys[j];
            out[k] = xs[j - 1] + (xs[j] - xs[j - 1]) * (p - lo) / (hi - lo);
        }
    }
    return out;
}

// Piecewise-linear evaluation on the extended node set at nondecreasing
// abscissae.
std::vector<double> eval_extended(const std::vector<double>& xs, const std::vector<double>& ys,
                                  const std::vector<double>& at) {
    std::vector<double> out(at.size());
    std::size_t j = 0;
    for (std::size_t k = 0; k < at.size(); ++k) {
        const double x = std::clamp(at[k], xs.front(), xs.back());
        while (j + 2 < xs.size() && xs[j + 1] < x) ++j;
        const double span = xs[j + 1] - xs[j];
        const double t = (x - xs[j]) / span;
        out[k] = ys[j] + std::clamp(t, 0.0, 1.0) * (ys[j + 1] - ys[j]);
    }
    return out;
}

} // namespace

DistortionSpec::DistortionSpec(const QuantileGrid& g)
    : g_(g),
      g_comp_hinv_(QuantileGrid::identity(g.grid())),
      h_inv_(QuantileGrid::identity(g.grid())) {
    const Grid& grid = g.grid();
    if (g[0] > kMonotoneTol) {
        throw Error("distortion base must satisfy g(0) = 0, got " + std::to_string(g[0]));
    }
    const std::size_t m = grid.size();
    std::vector<double> xs(m + 1), gy(m + 1), hy(m + 1);
    for (std::size_t k = 0; k < m; ++k) {
        xs[k] = grid.point(k);
        gy[k] = g[k];
        hy[k] = 0.5 * (gy[k] + xs[k]);
    }
    xs[m] = 1.0;
    gy[m] = 1.0;
    hy[m] = 1.0;

    std::vector<double> hinv = invert_extended(xs, hy, grid);
    std::vector<double> gh = eval_extended(xs, gy, hinv);
    h_inv_ = QuantileGrid(grid, std::move(hinv), GridRole::quantile);
    g_comp_hinv_ = QuantileGrid(grid, std::move(gh), GridRole::quantile);
}

DistortionSpec DistortionSpec::identity(const Grid& grid) {
    return DistortionSpec(QuantileGrid::identity(grid));
}

DistortionSpec DistortionSpec::from_spline(const SplineSpec& spec, const Grid& grid) {
    spec.validate_quantile_base();
    return DistortionSpec(monotone_spline(spec, grid).values);
}

QuantileGrid DistortionSpec::sample(double xi) const {
    if (!(std::abs(xi) <= 1.0)) {
        throw Error("distortion mixing variable must lie in [-1, 1], got " + std::to_string(xi));
    }
    const double wa = 0.5 * (1.0 + xi);
    const double wb = 0.5 * (1.0 - xi);
    std::vector<double> v(g_.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
        v[k] = wa * g_comp_hinv_[k] + wb * h_inv_[k];
    }
    return QuantileGrid(g_.grid(), std::move(v), GridRole::quantile);
}

SplineSpec default_distortion_knots() {
    return SplineSpec{{{0.0, 0.0}, {0.2, 0.1}, {0.6, 0.2}, {1.0, 1.0}}};
}

SplineSpec feature_mean_knots(std::size_t i, std::size_t n) {
    if (i == 0 || i > n) throw Error("feature index out of range");
    const double mid = 0.2 + 0.2 * static_cast<double>(i) / static_cast<double>(n);
    return SplineSpec{{{0.0, 0.0}, {0.2, 0.1}, {0.6, mid}, {1.0, 1.0}}};
}

std::vector<QuantileGrid> default_feature_means(std::size_t n, const Grid& grid) {
    std::vector<QuantileGrid> means;
    means.reserve(n);
    for (std::size_t i = 1; i <= n; ++i) {
        means.push_back(monotone_spline(feature_mean_knots(i, n), grid).values);
    }
    return means;
}

double sample_xi(Rng& rng) { return rng.uniform(-1.0, 1.0); }

double spectral_norm(const Eigen::MatrixXd& a) {
    if (a.size() == 0) return 0.0;
    if (!a.allFinite()) throw Error("spectral_norm: matrix has non-finite entries");
    const Eigen::MatrixXd ata = a.transpose() * a;
    const Eigen::Index n = ata.rows();
    Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
    // Deterministic perturbation so the start vector is never orthogonal to
    // the leading eigenspace in structured cases.
    for (Eigen::Index i = 0; i < n; ++i) v[i] += 1e-3 * static_cast<double>(i);
    v.normalize();
    double lambda = 0.0;
    for (int it = 0; it < 100000; ++it) {
        Eigen::VectorXd w = ata * v;
        const double norm = w.norm();
        if (norm == 0.0) return 0.0;
        w /= norm;
        const double next = w.dot(ata * w);
        const bool done = std::abs(next - lambda) <= 1e-10 * std::max(next, 1e-300);
        lambda = next;
        v = std::move(w);
        if (done && it > 2) break;
    }
    return std::sqrt(std::max(0.0, lambda));
}

Eigen::MatrixXd gen_coeffs(const SimConfig& cfg, Rng& rng) {
    cfg.validate();
    const auto n = static_cast<Eigen::Index>(cfg.n_features);
    Eigen::MatrixXd a0 = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) {
                double d = rng.uniform01();
                while (d == 0.0) d = rng.uniform01();
                a0(i, j) = d;
            } else if (rng.bernoulli(cfg.density)) {
                a0(i, j) = rng.uniform01();
            }
        }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        a0.row(i) /= a0.row(i).sum();
    }
    const double scale = (2.0 + cfg.alpha) * spectral_norm(a0);
    return a0 / scale;
}

bool rows_in_simplex(const Eigen::MatrixXd& a, double tol) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        double sum = 0.0;
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            if (a(i, j) < -tol) return false;
            sum += a(i, j);
        }
        if (sum > 1.0 + tol) return false;
    }
    return true;
}

std::vector<QuantileGrid> step(const Eigen::MatrixXd& a, const std::vector<QuantileGrid>& x_prev,
                               const std::vector<QuantileGrid>& eps) {
    const auto n = static_cast<std::size_t>(a.rows());
    if (x_prev.size() != n || eps.size() != n || a.cols() != a.rows()) {
        throw Error("step: dimension mismatch between A, state and noise");
    }
    if (!rows_in_simplex(a)) {
        throw Error("step: coefficient rows violate the nonnegative l1-ball constraint");
    }
    const Grid& grid = x_prev.front().grid();
    const std::size_t m = grid.size();
    std::vector<QuantileGrid> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> w(m);
        for (std::size_t k = 0; k < m; ++k) {
            const double p = grid.point(k);
            double acc = p;
            for (std::size_t j = 0; j < n; ++j) {
                acc += a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))
                       * (x_prev[j][k] - p);
            }
            w[k] = acc;
        }
        QuantileGrid inner = [&] {
            try {
                return QuantileGrid(grid, std::move(w), GridRole::quantile);
            } catch (const Error& e) {
                throw Error(std::string("step: predictor combination left the logarithmic image "
                                        "(invalid coefficient matrix): ")
                            + e.what());
            }
        }();
        out.push_back(compose(eps[i], inner));
    }
    return out;
}

DistSeries simulate_centered(const Eigen::MatrixXd& a, const DistortionSpec& spec,
                             const SimConfig& cfg, Rng& rng) {
    cfg.validate();
    const std::size_t n = cfg.n_features;
    if (static_cast<std::size_t>(a.rows()) != n) {
        throw Error("simulate_centered: coefficient matrix size disagrees with config");
    }
    const Grid grid = cfg.grid();
    std::vector<QuantileGrid> cur(n, QuantileGrid::identity(grid));
    std::vector<std::vector<QuantileGrid>> cells(n);
    for (auto& row : cells) row.reserve(cfg.t_len + 1);

    const std::size_t total = cfg.burn_in + cfg.t_len + 1;
    std::vector<QuantileGrid> eps;
    for (std::size_t t = 1; t <= total; ++t) {
        eps.clear();
        eps.reserve(n);
        for (std::size_t i = 0; i < n; ++i) eps.push_back(spec.sample(sample_xi(rng)));
        cur = step(a, cur, eps);
        if (t > cfg.burn_in) {
            for (std::size_t i = 0; i < n; ++i) cells[i].push_back(cur[i]);
        }
    }

    std::vector<std::string> labels;
    labels.reserve(n);
    int width = 1;
    for (std::size_t v = n; v >= 10; v /= 10) ++width;
    for (std::size_t i = 1; i <= n; ++i) {
        std::string num = std::to_string(i);
        labels.push_back("f" + std::string(static_cast<std::size_t>(width) - num.size(), '0') + num);
    }
    return DistSeries(std::move(labels), std::move(cells));
}

DistSeries synthesize_raw(const DistSeries& centered, const std::vector<QuantileGrid>& means) {
    if (means.size() != centered.n_features()) {
        throw Error("synthesize_raw: means/features count mismatch");
    }
    std::vector<std::vector<QuantileGrid>> cells(centered.n_features());
    for (std::size_t i = 0; i < centered.n_features(); ++i) {
        cells[i].reserve(centered.n_instants());
        for (std::size_t t = 0; t < centered.n_instants(); ++t) {
            cells[i].push_back(oplus(centered.at(i, t), means[i]));
        }
    }
    return DistSeries(centered.labels(), std::move(cells),
                      std::vector<std::int64_t>(centered.times()));
}

} // namespace wmar
