#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "brute_force_oracle.hpp"
#include "groupdiff/errors.hpp"
#include "groupdiff/quadrature.hpp"
#include "groupdiff/quartic_fit.hpp"
#include "groupdiff/rng.hpp"
#include "groupdiff/types.hpp"
#include "test_support.hpp"

using namespace groupdiff;
using oracle::brute_force_fit;

namespace {

FitConfig config_with_alpha(double alpha, SolverPath path = SolverPath::reduced) {
    FitConfig config;
    config.alpha_mode = ExplicitAlpha{alpha};
    config.solver = path;
    return config;
}

GroupedObservations random_grouped(std::int64_t M, std::uint64_t seed, double spread = 0.8) {
    GroupedObservations g = testsupport::make_grouped(
        testsupport::uniform_vector(seed, static_cast<std::size_t>(M), -spread, spread),
        testsupport::uniform_in(seed, 900, -1.0, 1.0), testsupport::uniform_in(seed, 901, -1.0, 1.0),
        1);
    return g;
}

}  // namespace

TEST_CASE("zero data yields the zero fit") {
    const GroupedObservations g = testsupport::make_grouped({0.0, 0.0, 0.0, 0.0, 0.0}, 0.0, 0.0);
    for (SolverPath path : {SolverPath::reduced, SolverPath::full_kkt}) {
        const PiecewiseQuartic f = fit(g, config_with_alpha(1e-3, path));
        CHECK(testsupport::max_coefficient_gap(f, f) == 0.0);
        for (const QuarticCoeffs& q : f.coefficients) {
            CHECK(std::abs(q.a) <= 1e-12);
            CHECK(std::abs(q.b) <= 1e-12);
            CHECK(std::abs(q.c) <= 1e-12);
            CHECK(std::abs(q.d) <= 1e-12);
            CHECK(std::abs(q.e) <= 1e-12);
        }
    }
}

TEST_CASE("linear data is reproduced exactly for any alpha") {
    for (const auto& [intercept, slope] : {std::pair{1.0, -0.5}, std::pair{0.3, 2.2}}) {
        for (std::int64_t M : {3, 10, 100}) {
            for (double alpha : {1e-8, 1e-4, 1.0}) {
                for (SolverPath path : {SolverPath::reduced, SolverPath::full_kkt}) {
                    const GroupedObservations g = testsupport::linear_grouped(intercept, slope, M);
                    const PiecewiseQuartic f = fit(g, config_with_alpha(alpha, path));
                    double worst = 0.0;
                    for (int j = 0; j <= 1000; ++j) {
                        const double x = static_cast<double>(j) / 1000.0;
                        worst = std::max(worst,
                                         std::abs(evaluate(f, x) - (intercept + slope * x)));
                    }
                    CAPTURE(M);
                    CAPTURE(alpha);
                    CHECK(worst <= 1e-10);
                }
            }
        }
    }
}

TEST_CASE("solver matches constrained brute-force minimization at M = 4") {
    for (std::uint64_t instance = 0; instance < 20; ++instance) {
        const GroupedObservations g = random_grouped(4, 4000 + instance);
        const double alpha = std::pow(10.0, testsupport::uniform_in(instance, 77, -3.0, -1.0));

        const PiecewiseQuartic oracle = brute_force_fit(g, alpha);
        const PiecewiseQuartic mine = fit(g, config_with_alpha(alpha));
        CAPTURE(instance);
        CHECK(testsupport::max_coefficient_gap(mine, oracle) <= 1e-6);

        // Second- and third-order continuity were not imposed on the oracle;
        // they must emerge from optimality.
        const double h = 0.25;
        for (std::size_t k = 1; k < 4; ++k) {
            const QuarticCoeffs& l = oracle.coefficients[k - 1];
            const QuarticCoeffs& r = oracle.coefficients[k];
            const double d2_jump =
                (2.0 * l.c + 6.0 * l.d * h + 12.0 * l.e * h * h) - 2.0 * r.c;
            const double d3_jump = (6.0 * l.d + 24.0 * l.e * h) - 6.0 * r.d;
            CHECK(std::abs(d2_jump) <= 1e-6 * std::max(1.0, std::abs(2.0 * r.c)));
            CHECK(std::abs(d3_jump) <= 1e-6 * std::max(1.0, std::abs(6.0 * r.d)));
        }
    }
}

TEST_CASE("reduced and full systems recover the same coefficients") {
    for (std::int64_t M : {3, 10, 50, 200}) {
        const GroupedObservations g = random_grouped(M, 60 + static_cast<std::uint64_t>(M));
        // Alpha at the scale the selection rule would produce for L = 1000.
        const double alpha = 0.0239 * 0.2 * static_cast<double>(M) / 1000.0;
        const PiecewiseQuartic reduced = fit(g, config_with_alpha(alpha, SolverPath::reduced));
        const PiecewiseQuartic full = fit(g, config_with_alpha(alpha, SolverPath::full_kkt));
        CAPTURE(M);
        CHECK(testsupport::max_coefficient_gap(reduced, full, true) <= 1e-8);
    }
}

TEST_CASE("full system has the documented dimensions") {
    const GroupedObservations g = random_grouped(3, 8);
    const DenseLinearSystem full = assemble_full_kkt(g, 1e-2);
    CHECK(full.matrix.rows() == 15);
    CHECK(full.matrix.cols() == 15);
    CHECK(full.rhs.size() == 15);

    const DenseLinearSystem reduced = assemble_reduced(g, 1e-2);
    CHECK(reduced.matrix.rows() == 3);
    CHECK(reduced.rhs.size() == 3);
}

TEST_CASE("fit satisfies its own optimality diagnostics") {
    const GroupedObservations g = random_grouped(12, 99);
    const PiecewiseQuartic f = fit(g, config_with_alpha(3e-4));
    CHECK(continuity_report(f, 1e-8).empty());
    CHECK(euler_lagrange_report(f, g, 1e-6).empty());
    CHECK(validate(f).empty());
    CHECK(evaluate(f, 0.0) == doctest::Approx(g.left_endpoint_value).epsilon(1e-10));
    CHECK(evaluate(f, 1.0) == doctest::Approx(g.right_endpoint_value).epsilon(1e-10));
    CHECK(std::abs(evaluate(f, 0.0, 2)) <= 1e-8);
    CHECK(std::abs(evaluate(f, 1.0, 2)) <= 1e-8);
}

TEST_CASE("perturbing the minimizer raises the functional by the gap identity") {
    for (std::uint64_t instance = 0; instance < 5; ++instance) {
        const GroupedObservations g = random_grouped(10, 300 + instance);
        const double alpha = std::pow(10.0, testsupport::uniform_in(instance, 55, -4.0, -1.0));
        const PiecewiseQuartic f = fit(g, config_with_alpha(alpha));
        const double base = testsupport::functional_value(f, g, alpha);

        for (std::uint64_t p = 0; p < 5; ++p) {
            const PiecewiseQuartic pert = testsupport::random_admissible_perturbation(
                f.coarse_grid, 7000 + 10 * instance + p);
            const PiecewiseQuartic moved = testsupport::axpy(f, 1.0, pert);
            const double lhs = testsupport::functional_value(moved, g, alpha) - base;

            double mean_sq = 0.0;
            for (std::int64_t i = 0; i < 10; ++i) {
                const double mi = interval_mean(pert, i);
                mean_sq += mi * mi;
            }
            const double rhs = alpha * derivative_l2_norm_sq(pert, 2) + mean_sq / 10.0;
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
            CHECK(lhs >= -1e-12 * std::max(1.0, base));
        }
    }
}

TEST_CASE("directional derivatives vanish at the minimizer") {
    const GroupedObservations g = random_grouped(10, 500);
    const double alpha = 1e-3;
    const PiecewiseQuartic f = fit(g, config_with_alpha(alpha));
    const double base = testsupport::functional_value(f, g, alpha);
    const double eps = 1e-3;
    for (std::uint64_t p = 0; p < 10; ++p) {
        const PiecewiseQuartic pert =
            testsupport::random_admissible_perturbation(f.coarse_grid, 9000 + p);
        const double up = testsupport::functional_value(testsupport::axpy(f, eps, pert), g, alpha);
        const double dn = testsupport::functional_value(testsupport::axpy(f, -eps, pert), g, alpha);
        const double slope = (up - dn) / (2.0 * eps);
        CHECK(std::abs(slope) <= 1e-6 * base + 1e-10);
    }
}

TEST_CASE("closed-form functional terms agree with quadrature") {
    const GroupedObservations g = random_grouped(8, 811);
    const double alpha = 2e-3;
    const PiecewiseQuartic f = fit(g, config_with_alpha(alpha));
    const double exact = testsupport::functional_value(f, g, alpha);
    const double quad = testsupport::functional_value_simpson(f, g, alpha);
    CHECK(exact == doctest::Approx(quad).epsilon(1e-9));
}

TEST_CASE("evaluate matches finite differences away from the knots") {
    const GroupedObservations g = random_grouped(6, 321);
    const PiecewiseQuartic f = fit(g, config_with_alpha(5e-3));
    const double h = f.coarse_grid.meshsize();
    int tested = 0;
    for (std::uint64_t t = 0; tested < 20; ++t) {
        const double x = testsupport::uniform_in(4242, t, 0.05, 0.95);
        const double nearest = std::abs(x / h - std::round(x / h)) * h;
        if (nearest < 1e-3) continue;
        ++tested;

        const double d1 = 1e-6;
        const double fd1 = (evaluate(f, x + d1) - evaluate(f, x - d1)) / (2.0 * d1);
        CHECK(std::abs(fd1 - evaluate(f, x, 1)) <=
              1e-5 * std::max(1.0, std::abs(evaluate(f, x, 1))));

        const double fd2 =
            (evaluate(f, x + d1) - 2.0 * evaluate(f, x) + evaluate(f, x - d1)) / (d1 * d1);
        CHECK(std::abs(fd2 - evaluate(f, x, 2)) <=
              1e-3 * std::max(1.0, std::abs(evaluate(f, x, 2))));

        const double d3 = 1e-5;
        const double fd3 = (evaluate(f, x + d3, 2) - evaluate(f, x - d3, 2)) / (2.0 * d3);
        CHECK(std::abs(fd3 - evaluate(f, x, 3)) <=
              1e-6 * std::max(1.0, std::abs(evaluate(f, x, 3))));

        const double fd4 = (evaluate(f, x + d3, 3) - evaluate(f, x - d3, 3)) / (2.0 * d3);
        CHECK(std::abs(fd4 - evaluate(f, x, 4)) <=
              1e-6 * std::max(1.0, std::abs(evaluate(f, x, 4))));
    }
}

TEST_CASE("evaluation uses right-continuous intervals") {
    const GroupedObservations g = random_grouped(5, 17);
    const PiecewiseQuartic f = fit(g, config_with_alpha(1e-2));
    for (std::int64_t i = 1; i < 5; ++i) {
        CHECK(evaluate(f, f.coarse_grid.node(i)) ==
              f.coefficients[static_cast<std::size_t>(i)].a);
    }
    // x = 1 belongs to the last interval (summation order may differ).
    const QuarticCoeffs& q = f.coefficients[4];
    const double h = 0.2;
    const double at_one = q.a + h * (q.b + h * (q.c + h * (q.d + h * q.e)));
    CHECK(std::abs(evaluate(f, 1.0) - at_one) <= 1e-13 * std::max(1.0, std::abs(at_one)));

    CHECK_THROWS_AS(evaluate(f, -0.1), DomainError);
    CHECK_THROWS_AS(evaluate(f, 1.1), DomainError);
    CHECK_THROWS_AS(evaluate(f, 0.5, 5), OrderError);
    CHECK_THROWS_AS(evaluate(f, 0.5, -1), OrderError);
}

TEST_CASE("interval means and seminorms match quadrature") {
    const GroupedObservations g = random_grouped(7, 66);
    const PiecewiseQuartic f = fit(g, config_with_alpha(4e-3));
    const double h = f.coarse_grid.meshsize();
    for (std::int64_t i = 0; i < 7; ++i) {
        const double quad = integrate([&](double x) { return evaluate(f, x); },
                                      f.coarse_grid.node(i), f.coarse_grid.node(i + 1)) /
                            h;
        CHECK(interval_mean(f, i) == doctest::Approx(quad).epsilon(1e-10));
    }
    CHECK_THROWS_AS(interval_mean(f, -1), IndexError);
    CHECK_THROWS_AS(interval_mean(f, 7), IndexError);

    for (int order : {0, 1, 2}) {
        double quad = 0.0;
        for (std::int64_t i = 0; i < 7; ++i) {
            quad += integrate(
                [&](double x) {
                    const double v = evaluate(f, x, order);
                    return v * v;
                },
                f.coarse_grid.node(i), f.coarse_grid.node(i + 1));
        }
        CAPTURE(order);
        CHECK(derivative_l2_norm_sq(f, order) == doctest::Approx(quad).epsilon(1e-9));
    }
}

TEST_CASE("penalty decreases as alpha grows") {
    const GroupedObservations g = random_grouped(12, 2024);
    double previous = -1.0;
    bool first = true;
    for (double alpha : {1e-8, 1e-6, 1e-4, 1e-2, 1.0}) {
        const PiecewiseQuartic f = fit(g, config_with_alpha(alpha));
        const double penalty = derivative_l2_norm_sq(f, 2);
        if (!first) CHECK(penalty <= previous + 1e-12);
        previous = penalty;
        first = false;
    }
}

TEST_CASE("system stays solvable across the working range") {
    for (std::int64_t M : {3, 4, 5, 7, 10, 17, 50, 100, 200, 350, 500}) {
        for (double alpha : {1e-8, 1e-4, 1.0}) {
            const GroupedObservations g =
                random_grouped(M, 5000 + static_cast<std::uint64_t>(M));
            const PiecewiseQuartic f = fit(g, config_with_alpha(alpha));
            CHECK(validate(f).empty());
        }
    }
}

TEST_CASE("a prepared fitter reproduces the one-shot fit") {
    const GroupedObservations g = random_grouped(10, 31);
    const double alpha = 4.78e-5;
    const QuarticFitter fitter(10, alpha);
    CHECK(fitter.group_count() == 10);
    CHECK(fitter.alpha() == alpha);

    const PiecewiseQuartic via_fitter = fitter.fit(g);
    const PiecewiseQuartic one_shot = fit(g, config_with_alpha(alpha));
    CHECK(testsupport::max_coefficient_gap(via_fitter, one_shot) <= 1e-13);

    // Same grouped data solved twice through the cached factorization.
    const PiecewiseQuartic again = fitter.fit(g);
    CHECK(testsupport::max_coefficient_gap(via_fitter, again) == 0.0);
}
