#include <algorithm>
#include <cmath>
#include <numeric>

#include <doctest.h>

#include "test_util.hpp"
#include "wmar/qfun.hpp"

using namespace wmar;
using wmar_test::random_quantile;
using wmar_test::sup_diff;

namespace {

// Brute-force empirical cdf inversion: scan sample points for the smallest
// one whose empirical cdf exceeds p (strictly; at atoms the upper value).
double empirical_quantile_oracle(std::vector<double> samples, double p) {
    std::sort(samples.begin(), samples.end());
    const auto n = static_cast<double>(samples.size());
    for (std::size_t j = 0; j < samples.size(); ++j) {
        const double cdf = static_cast<double>(j + 1) / n;
        if (cdf > p) return samples[j];
    }
    return samples.back();
}

} // namespace

TEST_SUITE("qfun") {

TEST_CASE("grid construction and invariants") {
    Grid g(0.25);
    CHECK(g.size() == 4);
    CHECK(g.h() == doctest::Approx(0.25));
    CHECK(g.point(0) == 0.0);
    CHECK(g.point(3) == doctest::Approx(0.75));
    CHECK(Grid(0.01).size() == 100);
    CHECK_THROWS_AS(Grid(0.0), Error);
    CHECK_THROWS_AS(Grid(1.0), Error);
    CHECK_THROWS_AS(Grid(0.6), Error);   // round(1/0.6) = 2 but 0.6*2 != 1
    CHECK(Grid::with_nodes(500).h() == doctest::Approx(0.002));
}

TEST_CASE("quantile grid validation and noise repair") {
    Grid g(0.25);
    CHECK_THROWS_AS(QuantileGrid(g, {0.0, 0.5, 0.4, 1.0}), Error);
    CHECK_THROWS_AS(QuantileGrid(g, {0.0, 0.5, 0.6, 1.5}), Error);
    CHECK_THROWS_AS(QuantileGrid(g, {0.0, 0.5, 0.6}), Error);
    // within-tolerance wobble is snapped flat
    QuantileGrid q(g, {0.0, 0.5, 0.5 - 1e-12, 1.0});
    CHECK(q[2] >= q[1]);
    QuantileGrid u(g, {1.0, 0.0, -3.0, 2.0}, GridRole::unconstrained);
    CHECK(u[2] == -3.0);
}

TEST_CASE("piecewise-linear evaluation with constant tail") {
    Grid g(0.25);
    QuantileGrid q(g, {0.0, 0.2, 0.6, 0.8});
    CHECK(q.eval(0.0) == doctest::Approx(0.0));
    CHECK(q.eval(0.125) == doctest::Approx(0.1));
    CHECK(q.eval(0.5) == doctest::Approx(0.6));
    CHECK(q.eval(0.75) == doctest::Approx(0.8));
    CHECK(q.eval(0.9) == doctest::Approx(0.8));   // constant on [1-h, 1]
    CHECK(q.eval(1.0) == doctest::Approx(0.8));
    std::vector<double> xs = {0.0, 0.125, 0.5, 0.99};
    auto out = q.eval_sorted(xs);
    for (std::size_t i = 0; i < xs.size(); ++i) CHECK(out[i] == doctest::Approx(q.eval(xs[i])));
}

TEST_CASE("empirical_quantile point mass") {
    Grid g(0.1);
    auto q = empirical_quantile(std::vector<double>{0.5}, g);
    for (std::size_t k = 0; k < q.size(); ++k) CHECK(q[k] == 0.5);
}

TEST_CASE("empirical_quantile two-point sample matches cdf-inversion oracle") {
    Grid g(0.25);
    std::vector<double> samples = {0.0, 1.0};
    auto q = empirical_quantile(samples, g);
    CHECK(q[0] == 0.0);
    CHECK(q[1] == 0.0);
    CHECK(q[2] == 1.0);
    CHECK(q[3] == 1.0);
    for (std::size_t k = 0; k < g.size(); ++k) {
        CHECK(q[k] == empirical_quantile_oracle(samples, g.point(k)));
    }
}

TEST_CASE("empirical_quantile agrees with oracle on random samples") {
    Rng rng(11);
    Grid g(0.05);
    for (int rep = 0; rep < 25; ++rep) {
        std::vector<double> samples(1 + static_cast<std::size_t>(rng.uniform01() * 12));
        for (double& s : samples) s = rng.uniform01();
        auto q = empirical_quantile(samples, g);
        for (std::size_t k = 0; k < g.size(); ++k) {
            CHECK(q[k] == empirical_quantile_oracle(samples, g.point(k)));
        }
    }
}

TEST_CASE("empirical_quantile recovers the uniform grid") {
    std::vector<double> samples(1000);
    for (std::size_t k = 0; k < samples.size(); ++k) {
        samples[k] = static_cast<double>(k) / 999.0;
    }
    Grid g(0.01);
    auto q = empirical_quantile(samples, g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        CHECK(std::abs(q[k] - g.point(k)) <= 1e-2);
    }
}

TEST_CASE("empirical_quantile errors") {
    Grid g(0.25);
    CHECK_THROWS_AS(empirical_quantile(std::vector<double>{}, g), Error);
    CHECK_THROWS_AS(empirical_quantile(std::vector<double>{0.5, 1.2}, g), Error);
    CHECK_THROWS_AS(empirical_quantile(std::vector<double>{-0.1}, g), Error);
}

TEST_CASE("left_inverse of identity is identity") {
    Grid g(0.01);
    auto inv = left_inverse(QuantileGrid::identity(g));
    CHECK(sup_diff(inv, QuantileGrid::identity(g)) == 0.0);
}

TEST_CASE("left_inverse of p^2 is sqrt within h") {
    Grid g(0.01);
    std::vector<double> v(g.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = g.point(k) * g.point(k);
    auto inv = left_inverse(QuantileGrid(g, std::move(v)));
    for (std::size_t k = 0; k < g.size(); ++k) {
        CHECK(std::abs(inv[k] - std::sqrt(g.point(k))) <= g.h());
    }
}

TEST_CASE("left_inverse plateau jumps to the first plateau point") {
    Grid g(0.25);
    QuantileGrid f(g, {0.0, 0.5, 0.5, 1.0});
    auto inv = left_inverse(f);
    // inf{x : f(x) >= 0.5} is the start of the plateau
    CHECK(inv[2] == doctest::Approx(0.25));
    // halfway between 0 and 0.5 crosses in the first segment
    CHECK(inv[1] == doctest::Approx(0.125));
    CHECK(inv[0] == 0.0);
}

TEST_CASE("left_inverse support conventions at the ends") {
    Grid g(0.25);
    // support starts after a zero plateau
    QuantileGrid f(g, {0.0, 0.0, 0.5, 1.0});
    auto inv = left_inverse(f);
    CHECK(inv[0] == doctest::Approx(0.25));
    // target above the range maps to the domain supremum
    QuantileGrid low(g, {0.0, 0.1, 0.2, 0.3});
    auto inv2 = left_inverse(low);
    CHECK(inv2[2] == 1.0);  // p = 0.5 unreachable
    // point mass at c: inverse is 0 up to c and 1 beyond
    auto inv3 = left_inverse(QuantileGrid::point_mass(g, 0.5));
    CHECK(inv3[0] == 0.0);
    CHECK(inv3[2] == 0.0);
    CHECK(inv3[3] == 1.0);
}

TEST_CASE("compose with identity and point mass") {
    Grid g(0.01);
    Rng rng(3);
    auto q = random_quantile(g, rng);
    CHECK(sup_diff(compose(q, QuantileGrid::identity(g)), q) == 0.0);
    auto mass = QuantileGrid::point_mass(g, 0.5);
    auto out = compose(mass, q);
    for (std::size_t k = 0; k < out.size(); ++k) CHECK(out[k] == 0.5);
    // id o g == g as long as g stays below the constant tail
    std::vector<double> small(g.size());
    for (std::size_t k = 0; k < small.size(); ++k) small[k] = 0.9 * g.point(k);
    QuantileGrid gsmall(g, std::move(small));
    CHECK(sup_diff(compose(QuantileGrid::identity(g), gsmall), gsmall) == 0.0);
}

TEST_CASE("compose inverse pair is the identity within 2h") {
    Grid g(0.01);
    std::vector<double> sq(g.size()), root(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        sq[k] = g.point(k) * g.point(k);
        root[k] = std::sqrt(g.point(k));
    }
    auto out = compose(QuantileGrid(g, sq), QuantileGrid(g, root));
    CHECK(sup_diff(out, QuantileGrid::identity(g)) <= 2.0 * g.h());
}

TEST_CASE("ominus examples") {
    Grid g(0.01);
    Rng rng(5);
    auto f = wmar_test::random_full_support_quantile(g, rng);
    CHECK(sup_diff(ominus(f, f), QuantileGrid::identity(g)) <= 2.0 * g.h());

    std::vector<double> sq(g.size()), root(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        sq[k] = g.point(k) * g.point(k);
        root[k] = std::sqrt(g.point(k));
    }
    CHECK(sup_diff(ominus(QuantileGrid(g, sq), QuantileGrid::identity(g)), QuantileGrid(g, sq))
          == 0.0);
    auto centered = ominus(QuantileGrid::identity(g), QuantileGrid(g, root));
    for (std::size_t k = 0; k < g.size(); ++k) {
        CHECK(std::abs(centered[k] - g.point(k) * g.point(k)) <= 2.0 * g.h());
    }
}

TEST_CASE("oplus examples and round trip") {
    Grid g(0.01);
    Rng rng(7);
    auto G = wmar_test::random_full_support_quantile(g, rng);
    CHECK(sup_diff(oplus(QuantileGrid::identity(g), G), G) <= g.h());
    auto Ftil = random_quantile(g, rng);
    CHECK(sup_diff(oplus(Ftil, QuantileGrid::identity(g)), Ftil) == 0.0);

    std::vector<double> sq(g.size()), cube(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        sq[k] = g.point(k) * g.point(k);
        cube[k] = g.point(k) * g.point(k) * g.point(k);
    }
    QuantileGrid F(g, sq), G3(g, cube);
    CHECK(sup_diff(oplus(ominus(F, G3), G3), F) <= 2.0 * g.h());
}

TEST_CASE("round trip holds for random strictly increasing grids") {
    Grid g(0.02);
    Rng rng(17);
    for (int rep = 0; rep < 20; ++rep) {
        auto F = wmar_test::random_full_support_quantile(g, rng);
        auto G = wmar_test::random_full_support_quantile(g, rng);
        CHECK(sup_diff(oplus(ominus(F, G), G), F) <= 2.0 * g.h());
    }
}

TEST_CASE("inner_leb quadrature values") {
    Grid g(0.01);
    auto id = QuantileGrid::identity(g);
    CHECK(std::abs(inner_leb(id, id) - 1.0 / 3.0) <= 1e-3);
    CHECK(inner_leb(id, QuantileGrid::zero(g)) == 0.0);
    auto ones = QuantileGrid::point_mass(g, 1.0);
    CHECK(std::abs(inner_leb(id, ones) - 0.5) <= 1e-3);
    CHECK_THROWS_AS(inner_leb(id, QuantileGrid::identity(Grid(0.02))), Error);
}

TEST_CASE("inner_leb converges at rate h^2") {
    for (double h : {0.1, 0.01, 0.001}) {
        Grid g(h);
        auto id = QuantileGrid::identity(g);
        CHECK(std::abs(inner_leb(id, id) - 1.0 / 3.0) <= h * h);
    }
}

TEST_CASE("wasserstein basics") {
    Grid g(0.01);
    Rng rng(23);
    auto F = random_quantile(g, rng);
    CHECK(wasserstein(F, F) == 0.0);
    auto da = QuantileGrid::point_mass(g, 0.2);
    auto db = QuantileGrid::point_mass(g, 0.9);
    CHECK(std::abs(wasserstein(da, db) - 0.7) <= 1e-9);
    CHECK(wasserstein(da, db) == wasserstein(db, da));
    auto id = QuantileGrid::identity(g);
    CHECK(std::abs(wasserstein(id, QuantileGrid::point_mass(g, 0.5)) - std::sqrt(1.0 / 12.0))
          <= 1e-3);
}

TEST_CASE("wasserstein equals the tangent-space norm by construction") {
    Grid g(0.01);
    Rng rng(29);
    for (int rep = 0; rep < 10; ++rep) {
        auto F = random_quantile(g, rng);
        auto G = random_quantile(g, rng);
        std::vector<double> d(g.size());
        for (std::size_t k = 0; k < d.size(); ++k) d[k] = F[k] - G[k];
        QuantileGrid diff(g, std::move(d), GridRole::unconstrained);
        CHECK(wasserstein(F, G) == std::sqrt(inner_leb(diff, diff)));
    }
}

TEST_CASE("frechet_mean basics") {
    Grid g(0.01);
    Rng rng(31);
    auto F = random_quantile(g, rng);
    std::vector<QuantileGrid> one = {F};
    CHECK(sup_diff(frechet_mean(one), F) == 0.0);
    std::vector<QuantileGrid> masses = {QuantileGrid::point_mass(g, 0.2),
                                        QuantileGrid::point_mass(g, 0.6)};
    auto m = frechet_mean(masses);
    for (std::size_t k = 0; k < m.size(); ++k) CHECK(m[k] == doctest::Approx(0.4));
    std::vector<QuantileGrid> pair = {QuantileGrid::identity(g), QuantileGrid::point_mass(g, 0.5)};
    auto m2 = frechet_mean(pair);
    for (std::size_t k = 0; k < m2.size(); ++k) {
        CHECK(m2[k] == doctest::Approx(0.5 * g.point(k) + 0.25));
    }
    CHECK_THROWS_AS(frechet_mean(std::span<const QuantileGrid>{}), Error);
}

TEST_CASE("frechet_mean minimizes the squared-distance objective") {
    Rng rng(37);
    Grid g(0.125);  // M = 8
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t count = 1 + static_cast<std::size_t>(rng.uniform01() * 4);
        std::vector<QuantileGrid> sample;
        for (std::size_t i = 0; i < count; ++i) sample.push_back(random_quantile(g, rng));
        auto mean = frechet_mean(sample);
        auto objective = [&](const QuantileGrid& q) {
            double acc = 0.0;
            for (const auto& s : sample) acc += wasserstein(s, q) * wasserstein(s, q);
            return acc;
        };
        const double best = objective(mean);
        for (std::size_t k = 0; k < g.size(); ++k) {
            for (double delta : {-g.h(), g.h()}) {
                std::vector<double> v(mean.values());
                v[k] = std::clamp(v[k] + delta, 0.0, 1.0);
                // re-monotonize
                for (std::size_t j = 1; j < v.size(); ++j) v[j] = std::max(v[j], v[j - 1]);
                QuantileGrid perturbed(g, std::move(v));
                CHECK(objective(perturbed) >= best - 1e-12);
            }
        }
    }
}

TEST_CASE("log and exp maps invert each other") {
    Grid g(0.01);
    Rng rng(41);
    auto id = QuantileGrid::identity(g);
    CHECK(sup_diff(log_leb(id), QuantileGrid::zero(g)) == 0.0);
    auto lg = log_leb(QuantileGrid::point_mass(g, 0.5));
    for (std::size_t k = 0; k < lg.size(); ++k) {
        CHECK(lg[k] == doctest::Approx(0.5 - g.point(k)));
    }
    for (int rep = 0; rep < 10; ++rep) {
        auto F = random_quantile(g, rng);
        CHECK(sup_diff(exp_leb(log_leb(F)), F) <= 1e-15);
    }
    CHECK(sup_diff(exp_leb(QuantileGrid::zero(g)), id) == 0.0);
}

TEST_CASE("exp_leb rejects functions outside the logarithmic image") {
    Grid g(0.25);
    // g + id decreasing between nodes 1 and 2
    QuantileGrid bad(g, {0.0, 0.4, 0.0, 0.1}, GridRole::unconstrained);
    CHECK_THROWS_AS(exp_leb(bad), Error);
    QuantileGrid escape(g, {0.5, 0.5, 0.5, 0.5}, GridRole::unconstrained);
    CHECK_THROWS_AS(exp_leb(escape), Error);  // 0.75 + 0.5 > 1
}

TEST_CASE("logarithmic image is convex on the grid") {
    Grid g(0.02);
    Rng rng(43);
    for (int rep = 0; rep < 25; ++rep) {
        auto F = random_quantile(g, rng);
        auto G = random_quantile(g, rng);
        const double lambda = rng.uniform01();
        std::vector<double> mix(g.size());
        auto lf = log_leb(F);
        auto lg = log_leb(G);
        for (std::size_t k = 0; k < mix.size(); ++k) {
            mix[k] = lambda * lf[k] + (1.0 - lambda) * lg[k];
        }
        CHECK_NOTHROW(exp_leb(QuantileGrid(g, std::move(mix), GridRole::unconstrained)));
    }
}

} // TEST_SUITE
