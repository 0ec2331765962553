#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "wmar/rng.hpp"
#include "wmar/series.hpp"
#include "wmar/spline.hpp"

namespace wmar {

/// Parameters of a synthetic-data run.
struct SimConfig {
    std::size_t n_features = 10;
    std::size_t t_len = 200;    ///< number of transitions; the series has t_len + 1 instants
    std::size_t burn_in = 200;
    double alpha = 0.5;         ///< spectral-norm margin, final norm is 1/(2+alpha)
    double density = 0.3;       ///< expected fraction of nonzero off-diagonals
    std::uint64_t seed = 1;
    double grid_h = 0.01;

    void validate() const;
    Grid grid() const { return Grid(grid_h); }
};

/// Random distortion generator built from a nondecreasing base function g
/// with g(0) = 0: draws eps = (1+xi)/2 * g o h^{-1} + (1-xi)/2 * h^{-1}
/// where h = (g + id)/2 and xi is uniform on [-1, 1]. Both g o h^{-1} and
/// h^{-1} are precomputed on the grid; per-sample work is one convex
/// combination.
///
/// For the inversion, g is treated as reaching (1, 1) at the right end
/// (one virtual node beyond the stored grid), which makes h a bijection of
/// [0, 1] and keeps every sampled slope at most 2.
class DistortionSpec {
public:
    explicit DistortionSpec(const QuantileGrid& g);

    static DistortionSpec identity(const Grid& grid);
    /// Spec from a monotone natural cubic spline through the knots.
    static DistortionSpec from_spline(const SplineSpec& spec, const Grid& grid);

    const QuantileGrid& g() const noexcept { return g_; }
    const QuantileGrid& g_comp_hinv() const noexcept { return g_comp_hinv_; }
    const QuantileGrid& h_inv() const noexcept { return h_inv_; }

    QuantileGrid sample(double xi) const;

private:
    QuantileGrid g_;
    QuantileGrid g_comp_hinv_;
    QuantileGrid h_inv_;
};

/// Default distortion base: natural cubic spline through
/// (0,0), (0.2,0.1), (0.6,0.2), (1,1).
SplineSpec default_distortion_knots();

/// Knots of the synthetic Frechet mean for feature i (1-based) of n:
/// (0,0), (0.2,0.1), (0.6, 0.2 + 0.2 i/n), (1,1).
SplineSpec feature_mean_knots(std::size_t i, std::size_t n);

/// Synthetic per-feature Frechet means sampled on the grid.
std::vector<QuantileGrid> default_feature_means(std::size_t n, const Grid& grid);

inline QuantileGrid gen_distortion(const DistortionSpec& spec, double xi) {
    return spec.sample(xi);
}

/// One draw of the distortion mixing variable, uniform on [-1, 1].
double sample_xi(Rng& rng);

/// Largest singular value by power iteration on A^T A, relative tolerance
/// 1e-10.
double spectral_norm(const Eigen::MatrixXd& a);

/// Random nonnegative coefficient matrix: Bernoulli(density) off-diagonal
/// mask with forced nonzero diagonal and U(0,1) entries, rows normalized to
/// sum 1, then scaled by 1/((2+alpha) * spectral norm). The result has
/// spectral norm exactly 1/(2+alpha) and row sums at most 1/(2+alpha).
Eigen::MatrixXd gen_coeffs(const SimConfig& cfg, Rng& rng);

/// Row-simplex check: entries >= -tol and row sums <= 1 + tol.
bool rows_in_simplex(const Eigen::MatrixXd& a, double tol = kMonotoneTol);

/// One transition of the autoregressive system:
/// out_i = eps_i o [ sum_j A_ij (x_prev_j - id) + id ].
std::vector<QuantileGrid> step(const Eigen::MatrixXd& a,
                               const std::vector<QuantileGrid>& x_prev,
                               const std::vector<QuantileGrid>& eps);

/// Simulates the centered process: every feature starts at id, the chain is
/// iterated burn_in + t_len + 1 times with fresh i.i.d. distortions per
/// (instant, feature), the burn-in is discarded and t_len + 1 instants are
/// returned. Distortions are consumed in (t, i) order from the single rng.
DistSeries simulate_centered(const Eigen::MatrixXd& a, const DistortionSpec& spec,
                             const SimConfig& cfg, Rng& rng);

/// Applies per-feature Frechet means to a centered series:
/// raw_{i,t} = centered_{i,t} o mean_i.
DistSeries synthesize_raw(const DistSeries& centered, const std::vector<QuantileGrid>& means);

} // namespace wmar
