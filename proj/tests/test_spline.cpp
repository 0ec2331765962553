#include <cmath>

#include <doctest.h>
#include <Eigen/Dense>

#include "test_util.hpp"
#include "wmar/simulate.hpp"
#include "wmar/spline.hpp"

using namespace wmar;

namespace {

// Dense-solve oracle for the natural cubic spline: assemble the full
// (n x n) second-derivative system and solve it with Eigen, independently
// of the tridiagonal implementation.
double spline_oracle(const SplineSpec& spec, double t) {
    const std::size_t n = spec.knots.size();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(n));
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = spec.knots[i].first;
        y[i] = spec.knots[i].second;
    }
    a(0, 0) = 1.0;
    a(static_cast<Eigen::Index>(n - 1), static_cast<Eigen::Index>(n - 1)) = 1.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double hl = x[i] - x[i - 1];
        const double hr = x[i + 1] - x[i];
        const auto ii = static_cast<Eigen::Index>(i);
        a(ii, ii - 1) = hl;
        a(ii, ii) = 2.0 * (hl + hr);
        a(ii, ii + 1) = hr;
        rhs(ii) = 6.0 * ((y[i + 1] - y[i]) / hr - (y[i] - y[i - 1]) / hl);
    }
    Eigen::VectorXd m2 = a.fullPivLu().solve(rhs);
    std::size_t seg = 0;
    while (seg + 2 < n && x[seg + 1] < t) ++seg;
    const double d = x[seg + 1] - x[seg];
    const double wa = (x[seg + 1] - t) / d;
    const double wb = (t - x[seg]) / d;
    return wa * y[seg] + wb * y[seg + 1]
           + ((wa * wa * wa - wa) * m2(static_cast<Eigen::Index>(seg))
              + (wb * wb * wb - wb) * m2(static_cast<Eigen::Index>(seg + 1)))
                 * d * d / 6.0;
}

} // namespace

TEST_SUITE("spline") {

TEST_CASE("collinear knots reproduce the line") {
    SplineSpec spec{{{0.0, 0.0}, {0.5, 0.5}, {1.0, 1.0}}};
    Grid g(0.01);
    auto res = monotone_spline(spec, g);
    CHECK_FALSE(res.adjusted);
    for (std::size_t k = 0; k < g.size(); ++k) {
        CHECK(std::abs(res.values[k] - g.point(k)) <= 1e-9);
    }
}

TEST_CASE("distortion base knots and frozen interior values") {
    SplineSpec spec{{{0.0, 0.0}, {0.2, 0.1}, {0.6, 0.2}, {1.0, 1.0}}};
    Grid g(0.01);
    auto res = monotone_spline(spec, g);
    CHECK_FALSE(res.adjusted);
    const auto& v = res.values;
    CHECK(v[20] == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(v[60] == doctest::Approx(0.2).epsilon(1e-12));
    // closed-form values of this spline
    CHECK(v[10] == doctest::Approx(0.059375).epsilon(1e-12));
    CHECK(v[30] == doctest::Approx(0.1109375).epsilon(1e-12));
    CHECK(v[40] == doctest::Approx(0.1125).epsilon(1e-12));
    CHECK(v[80] == doctest::Approx(0.525).epsilon(1e-12));
    for (std::size_t k = 0; k + 1 < v.size(); ++k) CHECK(v[k + 1] >= v[k]);
}

TEST_CASE("shifted mean knots hit the middle target") {
    Grid g(0.01);
    SplineSpec spec{{{0.0, 0.0}, {0.2, 0.1}, {0.6, 0.4}, {1.0, 1.0}}};
    auto res = monotone_spline(spec, g);
    CHECK(res.values[60] == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("tridiagonal solve agrees with the dense oracle") {
    Rng rng(53);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t inner = 1 + static_cast<std::size_t>(rng.uniform01() * 5);
        SplineSpec spec;
        spec.knots.push_back({0.0, 0.0});
        double y = 0.0;
        for (std::size_t i = 0; i < inner; ++i) {
            const double x = 0.9 * static_cast<double>(i + 1) / static_cast<double>(inner + 1)
                             + 0.03 * rng.uniform01();
            y = std::min(1.0, y + rng.uniform01() * 0.3);
            spec.knots.push_back({x, y});
        }
        spec.knots.push_back({1.0, 1.0});
        for (int probe = 0; probe < 10; ++probe) {
            const double t = rng.uniform01();
            const auto ours = natural_cubic_eval(spec, std::vector<double>{t});
            CHECK(ours[0] == doctest::Approx(spline_oracle(spec, t)).epsilon(1e-10));
        }
    }
}

TEST_CASE("non-monotone spline is repaired and flagged") {
    // A long flat stretch after a steep rise makes the natural cubic dip.
    SplineSpec spec{{{0.0, 0.0}, {0.1, 0.6}, {0.5, 0.62}, {1.0, 1.0}}};
    Grid g(0.01);
    auto raw = natural_cubic_eval(spec, g.points());
    bool dips = false;
    for (std::size_t k = 0; k + 1 < raw.size(); ++k) {
        if (raw[k + 1] < raw[k]) dips = true;
    }
    REQUIRE(dips);  // the knot set must actually exercise the repair
    auto res = monotone_spline(spec, g);
    CHECK(res.adjusted);
    for (std::size_t k = 0; k + 1 < res.values.size(); ++k) {
        CHECK(res.values[k + 1] >= res.values[k]);
    }
    CHECK(res.values[0] >= 0.0);
    CHECK(res.values[res.values.size() - 1] <= 1.0);
}

TEST_CASE("isotonic projection is the least-squares monotone fit") {
    std::vector<double> v = {1.0, 3.0, 2.0, 2.0, 5.0};
    auto iso = isotonic_projection(v);
    // block {3,2,2} averages to 7/3
    CHECK(iso[0] == doctest::Approx(1.0));
    CHECK(iso[1] == doctest::Approx(7.0 / 3.0));
    CHECK(iso[2] == doctest::Approx(7.0 / 3.0));
    CHECK(iso[3] == doctest::Approx(7.0 / 3.0));
    CHECK(iso[4] == doctest::Approx(5.0));
}

TEST_CASE("spline spec validation") {
    const SplineSpec too_few{{{0.0, 0.0}, {1.0, 1.0}}};
    CHECK_THROWS_AS(too_few.validate(), Error);
    const SplineSpec repeated_x{{{0.0, 0.0}, {0.5, 0.5}, {0.5, 0.7}, {1.0, 1.0}}};
    CHECK_THROWS_AS(repeated_x.validate(), Error);
    const SplineSpec off_corner{{{0.0, 0.1}, {0.5, 0.5}, {1.0, 1.0}}};
    CHECK_THROWS_AS(off_corner.validate_quantile_base(), Error);
    CHECK_NOTHROW(default_distortion_knots().validate_quantile_base());
}

} // TEST_SUITE
