#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "groupdiff/errors.hpp"
#include "groupdiff/param_select.hpp"
#include "groupdiff/quartic_fit.hpp"
#include "groupdiff/rng.hpp"
#include "groupdiff/types.hpp"
#include "test_support.hpp"

using namespace groupdiff;

namespace {

LCurve synthetic_curve(const std::vector<double>& log_residuals,
                       const std::vector<double>& log_penalties) {
    LCurve curve;
    for (std::size_t i = 0; i < log_residuals.size(); ++i) {
        LCurvePoint point;
        point.c_bar = std::pow(10.0, static_cast<double>(i) - 3.0);
        point.alpha = point.c_bar * 1e-3;
        point.log_residual = log_residuals[i];
        point.log_penalty = log_penalties[i];
        curve.points.push_back(point);
    }
    return curve;
}

GroupedObservations noisy_cubic_grouped(std::uint64_t seed) {
    // Interval means of the desk-scale cubic trend plus group-size-100 noise.
    const std::int64_t M = 10;
    const double sigma2 = 0.2;
    std::vector<double> means(static_cast<std::size_t>(M));
    for (std::int64_t i = 0; i < M; ++i) {
        const double mid = (static_cast<double>(i) + 0.5) / static_cast<double>(M);
        means[static_cast<std::size_t>(i)] =
            1.0 + mid * (-0.5 + mid * (2.0 + mid)) +
            std::sqrt(sigma2 / 100.0) * normal_at(seed, static_cast<std::uint64_t>(i));
    }
    GroupedObservations g = testsupport::make_grouped(std::move(means), 1.0, 3.5, 100, sigma2);
    return g;
}

}  // namespace

TEST_CASE("alpha follows the selection rule exactly") {
    CHECK(alpha_from_cbar(1.0, 1.0, 1) == 1.0);
    CHECK(alpha_from_cbar(0.0239, 0.2, 100) == doctest::Approx(4.78e-5).epsilon(1e-14));
    // Doubling the group size halves alpha bit-exactly.
    CHECK(alpha_from_cbar(0.0239, 0.2, 200) * 2.0 == alpha_from_cbar(0.0239, 0.2, 100));

    CHECK_THROWS_AS(alpha_from_cbar(0.0, 0.2, 100), DomainError);
    CHECK_THROWS_AS(alpha_from_cbar(-1.0, 0.2, 100), DomainError);
    CHECK_THROWS_AS(alpha_from_cbar(1.0, 0.0, 100), DomainError);
    CHECK_THROWS_AS(alpha_from_cbar(1.0, 0.2, 0), DomainError);
}

TEST_CASE("residual measures the root-mean-square misfit") {
    PiecewiseQuartic f;
    f.coarse_grid.node_count = 5;
    f.alpha_used = 1.0;
    f.coefficients.assign(5, QuarticCoeffs{2.0, 0.0, 0.0, 0.0, 0.0});

    GroupedObservations match = testsupport::make_grouped({2.0, 2.0, 2.0, 2.0, 2.0}, 2.0, 2.0);
    CHECK(residual(f, match) == 0.0);

    GroupedObservations offset =
        testsupport::make_grouped({2.3, 2.3, 2.3, 2.3, 2.3}, 2.0, 2.0);
    CHECK(residual(f, offset) == doctest::Approx(0.3).epsilon(1e-12));

    GroupedObservations wrong = testsupport::make_grouped({1.0, 2.0, 3.0}, 1.0, 3.0);
    CHECK_THROWS_AS(residual(f, wrong), GridMismatchError);
}

TEST_CASE("huge alpha drives the fit to the endpoint line") {
    const GroupedObservations g = noisy_cubic_grouped(42);
    FitConfig config;
    config.alpha_mode = ExplicitAlpha{1e8};
    const PiecewiseQuartic f = fit(g, config);

    // With the penalty dominant the only zero-curvature admissible function
    // is the line through the two pinned endpoints.
    const double y0 = g.left_endpoint_value;
    const double slope = g.right_endpoint_value - g.left_endpoint_value;
    double line_misfit = 0.0;
    for (std::int64_t i = 0; i < 10; ++i) {
        const double mid = (static_cast<double>(i) + 0.5) / 10.0;
        const double gap = g.group_means[static_cast<std::size_t>(i)] - (y0 + slope * mid);
        line_misfit += gap * gap;
    }
    const double line_residual = std::sqrt(line_misfit / 10.0);
    CHECK(std::abs(residual(f, g) - line_residual) <= 1e-6);
    CHECK(derivative_l2_norm_sq(f, 2) <= 1e-12);
}

TEST_CASE("the scan records one point per grid value with the mapped alpha") {
    const GroupedObservations g = noisy_cubic_grouped(7);
    LCurveOptions options;
    options.c_bar_grid = {1e-3, 1e-2, 1e-1, 1.0, 10.0};
    const LCurve curve = lcurve_scan(g, 0.2, options);
    REQUIRE(curve.points.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(curve.points[i].c_bar == options.c_bar_grid[i]);
        CHECK(curve.points[i].alpha ==
              alpha_from_cbar(options.c_bar_grid[i], 0.2, g.group_size));
    }
    CHECK(curve.penalty_order == 1);
}

TEST_CASE("residual grows and penalty shrinks along the scan") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        const GroupedObservations g = noisy_cubic_grouped(seed);
        const LCurve curve = lcurve_scan(g, 0.2, {});
        REQUIRE(curve.points.size() == 50);
        for (std::size_t i = 1; i < curve.points.size(); ++i) {
            CHECK(curve.points[i].log_residual >= curve.points[i - 1].log_residual - 1e-10);
            CHECK(curve.points[i].log_penalty <= curve.points[i - 1].log_penalty + 1e-10);
        }
    }
}

TEST_CASE("scan validates its inputs") {
    const GroupedObservations g = noisy_cubic_grouped(11);
    LCurveOptions bad_order;
    bad_order.penalty_order = 3;
    CHECK_THROWS_AS(lcurve_scan(g, 0.2, bad_order), OrderError);

    LCurveOptions bad_grid;
    bad_grid.c_bar_grid = {1e-3, 1e-3};
    CHECK_THROWS_AS(lcurve_scan(g, 0.2, bad_grid), DomainError);
    bad_grid.c_bar_grid = {-1.0, 1.0};
    CHECK_THROWS_AS(lcurve_scan(g, 0.2, bad_grid), DomainError);

    LCurveOptions second_order;
    second_order.penalty_order = 2;
    second_order.c_bar_grid = {1e-3, 1e-2, 1e-1, 1.0, 10.0};
    const LCurve curve = lcurve_scan(g, 0.2, second_order);
    CHECK(curve.penalty_order == 2);
}

TEST_CASE("corner detection finds a right angle") {
    LCurve curve = synthetic_curve({-2.0, -2.0, -2.0, -1.0, 0.0},
                                   {0.0, -1.0, -2.0, -2.0, -2.0});
    const CornerResult corner = lcurve_corner(curve);
    CHECK(corner.index == 2);
    CHECK_FALSE(corner.fallback_used);
    REQUIRE(curve.chosen_index.has_value());
    CHECK(*curve.chosen_index == 2);
    CHECK(corner.c_bar == curve.points[2].c_bar);
    CHECK(corner.alpha == curve.points[2].alpha);
}

TEST_CASE("curvature ties break toward the smaller grid value") {
    LCurve curve = synthetic_curve({0.0, 0.0, 1.0, 1.0, 2.0},
                                   {0.0, -1.0, -1.0, -2.0, -2.0});
    const CornerResult corner = lcurve_corner(curve);
    CHECK(corner.index == 1);
}

TEST_CASE("collinear curves fall back with a warning") {
    testsupport::WarnCapture capture;
    LCurve curve = synthetic_curve({0.0, 0.01, 0.02, 0.03, 0.04},
                                   {0.0, -0.02, -0.04, -0.06, -0.08});
    const CornerResult corner = lcurve_corner(curve);
    CHECK(corner.fallback_used);
    // All residuals sit within 1.1x of the minimum; the fallback keeps the
    // largest c_bar.
    CHECK(corner.index == 4);
    CHECK(capture.contains("NoCornerWarning"));

    testsupport::WarnCapture capture2;
    LCurve steep = synthetic_curve({0.0, 0.5, 1.0, 1.5, 2.0},
                                   {0.0, -0.5, -1.0, -1.5, -2.0});
    const CornerResult corner2 = lcurve_corner(steep);
    CHECK(corner2.fallback_used);
    CHECK(corner2.index == 0);
}

TEST_CASE("corner selection is invariant under residual rescaling") {
    const std::vector<double> res = {-2.0, -2.0, -2.0, -1.0, 0.0};
    const std::vector<double> pen = {0.0, -1.0, -2.0, -2.0, -2.0};
    LCurve base = synthetic_curve(res, pen);
    const std::size_t base_index = lcurve_corner(base).index;

    std::vector<double> scaled = res;
    for (double& v : scaled) v += std::log(3.0);  // all residuals times 3
    LCurve rescaled = synthetic_curve(scaled, pen);
    CHECK(lcurve_corner(rescaled).index == base_index);

    std::vector<double> pen_scaled = pen;
    for (double& v : pen_scaled) v += std::log(0.2);
    LCurve rescaled2 = synthetic_curve(res, pen_scaled);
    CHECK(lcurve_corner(rescaled2).index == base_index);
}

TEST_CASE("corner detection needs at least five points") {
    LCurve tiny = synthetic_curve({0.0, 1.0, 2.0}, {0.0, -1.0, -2.0});
    CHECK_THROWS_AS(lcurve_corner(tiny), TooFewPointsError);
}

TEST_CASE("corner on desk-scale data lands in the plausible band") {
    // Individual seeds can land on the second bend near maximal smoothing;
    // the median over seeds is the robust statistic.
    std::vector<double> corners;
    for (std::uint64_t seed = 1; seed <= 11; ++seed) {
        const GroupedObservations g = noisy_cubic_grouped(seed);
        LCurve curve = lcurve_scan(g, 0.2, {});
        corners.push_back(lcurve_corner(curve).c_bar);
    }
    std::sort(corners.begin(), corners.end());
    const double median = corners[5];
    CHECK(median >= 0.002);
    CHECK(median <= 0.25);
}
