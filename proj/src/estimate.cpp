#include "wmar/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "wmar/qfun.hpp"
#include "wmar/simulate.hpp"

namespace wmar {

void FitOptions::validate() const {
    if (!(tol > 0.0)) throw Error("fit tolerance must be positive");
    if (max_iter == 0) throw Error("max_iter must be positive");
    if (ridge < 0.0) throw Error("ridge must be nonnegative");
}

namespace {

constexpr double kMaxCondition = 1e12;

// Lebesgue quadrature weights matching inner_leb: trapezoid on [0, 1-h]
// plus the constant tail.
std::vector<double> quad_weights(const Grid& grid) {
    std::vector<double> w(grid.size(), grid.h());
    w.front() = 0.5 * grid.h();
    w.back() = 1.5 * grid.h();
    return w;
}

bool mean_plateaus_with_mass(const QuantileGrid& mean, const std::vector<QuantileGrid>& raw_row) {
    const Grid& grid = mean.grid();
    std::size_t k = 0;
    while (k + 1 < mean.size()) {
        if (mean[k + 1] - mean[k] > 1e-12) {
            ++k;
            continue;
        }
        std::size_t end = k + 1;
        while (end + 1 < mean.size() && mean[end + 1] - mean[end] <= 1e-12) ++end;
        const double lo = grid.point(k);
        const double hi = grid.point(end);
        for (const QuantileGrid& q : raw_row) {
            for (std::size_t idx = 0; idx < q.size(); ++idx) {
                if (q[idx] >= lo && q[idx] <= hi) return true;
            }
        }
        k = end;
    }
    return false;
}

} // namespace

CenteredSeries center_series(const DistSeries& raw) {
    if (raw.n_instants() < 2) throw Error("center_series: need at least two instants");
    const std::size_t n = raw.n_features();

    std::vector<QuantileGrid> means;
    means.reserve(n);
    std::vector<std::size_t> degenerate;
    for (std::size_t i = 0; i < n; ++i) {
        means.push_back(frechet_mean(raw.feature(i)));
        if (mean_plateaus_with_mass(means.back(), raw.feature(i))) {
            degenerate.push_back(i);
        }
    }

    std::vector<std::vector<QuantileGrid>> cells(n);
    for (std::size_t i = 0; i < n; ++i) {
        const QuantileGrid mean_inv = left_inverse(means[i]);
        cells[i].reserve(raw.n_instants());
        for (std::size_t t = 0; t < raw.n_instants(); ++t) {
            cells[i].push_back(compose(raw.at(i, t), mean_inv));
        }
    }
    DistSeries centered(raw.labels(), std::move(cells), std::vector<std::int64_t>(raw.times()));
    return CenteredSeries{std::move(centered), std::move(means), std::move(degenerate)};
}

GramPair gram(const DistSeries& centered) {
    const std::size_t n = centered.n_features();
    const std::size_t t_count = centered.n_instants();
    if (t_count < 2) throw Error("gram: need at least two instants");
    const Grid& grid = centered.grid();
    const std::size_t m = grid.size();
    const std::vector<double> w = quad_weights(grid);
    const auto t_len = static_cast<double>(t_count - 1);

    const auto ni = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd gamma0 = Eigen::MatrixXd::Zero(ni, ni);
    Eigen::MatrixXd gamma1 = Eigen::MatrixXd::Zero(ni, ni);

    // Weighted log-map values of the previous and current cross sections.
    Eigen::MatrixXd prev(ni, static_cast<Eigen::Index>(m));
    Eigen::MatrixXd prev_w(ni, static_cast<Eigen::Index>(m));
    Eigen::MatrixXd cur(ni, static_cast<Eigen::Index>(m));
    auto load = [&](std::size_t t, Eigen::MatrixXd& dst) {
        for (std::size_t i = 0; i < n; ++i) {
            const QuantileGrid& q = centered.at(i, t);
            for (std::size_t k = 0; k < m; ++k) {
                dst(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
                    q[k] - grid.point(k);
            }
        }
    };

    load(0, prev);
    for (std::size_t t = 1; t < t_count; ++t) {
        prev_w = prev;
        for (std::size_t k = 0; k < m; ++k) {
            prev_w.col(static_cast<Eigen::Index>(k)) *= w[k];
        }
        load(t, cur);
        gamma0.noalias() += prev * prev_w.transpose();
        gamma1.noalias() += cur * prev_w.transpose();
        std::swap(prev, cur);
    }
    gamma0 /= t_len;
    gamma1 /= t_len;
    gamma0 = 0.5 * (gamma0 + gamma0.transpose()).eval();
    return GramPair{std::move(gamma0), std::move(gamma1)};
}

Eigen::MatrixXd lse_unconstrained(const GramPair& g) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.gamma0);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > kMaxCondition) {
        throw GramSingularError("gram singular: lag-0 Gram matrix has eigenvalue "
                                + std::to_string(lo) + " (largest " + std::to_string(hi) + ")",
                                lo);
    }
    Eigen::LDLT<Eigen::MatrixXd> solver(g.gamma0);
    // a_o = gamma1 * gamma0^{-1}; solve gamma0 x = gamma1^T column-wise.
    return solver.solve(g.gamma1.transpose()).transpose();
}

Eigen::VectorXd project_simplex(const Eigen::VectorXd& v) {
    if (!v.allFinite()) throw Error("project_simplex: non-finite entries");
    Eigen::VectorXd w = v.cwiseMax(0.0);
    if (w.sum() <= 1.0) return w;
    // Project onto the face {x >= 0, sum x = 1}: threshold by the unique tau
    // with sum max(v - tau, 0) = 1, found from the sorted entries.
    std::vector<double> u(v.data(), v.data() + v.size());
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumsum = 0.0;
    double tau = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        cumsum += u[j];
        const double cand = (cumsum - 1.0) / static_cast<double>(j + 1);
        if (u[j] - cand > 0.0) tau = cand;
    }
    return (v.array() - tau).cwiseMax(0.0).matrix();
}

RowFit fit_row(const GramPair& g, Eigen::Index row, const FitOptions& opts) {
    opts.validate();
    if (row < 0 || row >= g.gamma0.rows()) throw Error("fit_row: row index out of range");
    const Eigen::Index n = g.gamma0.rows();
    const Eigen::VectorXd target = g.gamma1.row(row).transpose();

    const double lip = spectral_norm(g.gamma0);
    if (lip <= 0.0) {
        // Zero quadratic term: the zero start is already stationary.
        return RowFit{Eigen::VectorXd::Zero(n), 0, 0.0, true};
    }
    const double step = 1.0 / lip;

    auto objective = [&](const Eigen::VectorXd& a) {
        return 0.5 * a.dot(g.gamma0 * a) - target.dot(a);
    };

    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd y = x;
    double t_momentum = 1.0;
    double f_prev = objective(x);
    RowFit out;
    out.converged = false;

    for (std::size_t k = 1; k <= opts.max_iter; ++k) {
        Eigen::VectorXd x_next = project_simplex(y - step * (g.gamma0 * y - target));
        double f_next = objective(x_next);
        if (f_next > f_prev) {
            // Function-value restart: drop momentum and retake a plain
            // projected-gradient step from x, which cannot increase f.
            t_momentum = 1.0;
            y = x;
            x_next = project_simplex(y - step * (g.gamma0 * y - target));
            f_next = objective(x_next);
        }
        const double delta = (x_next - x).norm();
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_momentum * t_momentum));
        y = x_next + ((t_momentum - 1.0) / t_next) * (x_next - x);
        t_momentum = t_next;
        x = std::move(x_next);
        f_prev = f_next;
        out.iterations = k;
        if (delta <= opts.tol) {
            out.converged = true;
            break;
        }
    }
    out.coeffs = std::move(x);
    out.objective = f_prev;
    return out;
}

FitReport fit(const DistSeries& raw, const FitOptions& opts) {
    opts.validate();
    CenteredSeries centered = center_series(raw);
    const std::size_t n = raw.n_features();
    const std::size_t t_len = raw.n_instants() - 1;

    FitReport report;
    report.labels = raw.labels();
    report.grid_h = raw.grid().h();
    report.means = std::move(centered.means);
    report.degenerate_features = std::move(centered.degenerate_features);
    report.options = opts;
    report.small_sample = t_len < n;

    GramPair g = gram(centered.series);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.gamma0);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > kMaxCondition) {
        if (opts.ridge > 0.0) {
            g.gamma0.diagonal().array() += opts.ridge;
            report.ridge_used = true;
        } else {
            throw GramSingularError("gram singular: lag-0 Gram matrix has eigenvalue "
                                    + std::to_string(lo) + "; pass a positive ridge to proceed",
                                    lo);
        }
    }

    try {
        report.a_unconstrained = lse_unconstrained(g);
        report.unconstrained_feasible = rows_in_simplex(*report.a_unconstrained);
    } catch (const GramSingularError&) {
        report.a_unconstrained.reset();
        report.unconstrained_feasible = false;
    }

    const auto ni = static_cast<Eigen::Index>(n);
    report.a_hat = Eigen::MatrixXd::Zero(ni, ni);
    report.iterations.resize(n);
    report.objective.resize(n);
    report.row_converged.resize(n);
    for (Eigen::Index i = 0; i < ni; ++i) {
        RowFit rf = fit_row(g, i, opts);
        report.a_hat.row(i) = rf.coeffs.transpose();
        report.iterations[static_cast<std::size_t>(i)] = rf.iterations;
        report.objective[static_cast<std::size_t>(i)] = rf.objective;
        report.row_converged[static_cast<std::size_t>(i)] = rf.converged;
    }
    report.gram = std::move(g);
    return report;
}

double rmsd(const Eigen::MatrixXd& a_hat, const Eigen::MatrixXd& a) {
    if (a_hat.rows() != a.rows() || a_hat.cols() != a.cols()) {
        throw Error("rmsd: shape mismatch");
    }
    const double denom = a.norm();
    if (denom == 0.0) throw Error("rmsd: reference matrix is all zero");
    return (a_hat - a).norm() / denom;
}

std::vector<QuantileGrid> forecast(const FitReport& report,
                                   const std::vector<QuantileGrid>& last_raw) {
    const std::size_t n = report.means.size();
    if (last_raw.size() != n) throw Error("forecast: feature count mismatch");
    const Grid& grid = report.means.front().grid();
    for (const QuantileGrid& q : last_raw) {
        if (q.grid() != grid) throw Error("forecast: grid mismatch with fitted report");
    }

    std::vector<QuantileGrid> centered;
    centered.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        centered.push_back(ominus(last_raw[i], report.means[i]));
    }

    const std::size_t m = grid.size();
    std::vector<QuantileGrid> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> w(m);
        for (std::size_t k = 0; k < m; ++k) {
            const double p = grid.point(k);
            double acc = p;
            for (std::size_t j = 0; j < n; ++j) {
                acc += report.a_hat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))
                       * (centered[j][k] - p);
            }
            w[k] = acc;
        }
        QuantileGrid pred(grid, std::move(w), GridRole::quantile);
        out.push_back(oplus(pred, report.means[i]));
    }
    return out;
}

} // namespace wmar
