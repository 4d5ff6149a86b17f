#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "groupdiff/errors.hpp"
#include "groupdiff/rng.hpp"
#include "groupdiff/stat_bounds.hpp"
#include "groupdiff/types.hpp"

using namespace groupdiff;

namespace {

// Plain bisection on x e^(1-x) = p^(2/M), written independently of the
// production root finder: fixed generous bracket, no Newton polishing.
double bisection_oracle(std::int64_t M, double p) {
    const double target = std::pow(p, 2.0 / static_cast<double>(M));
    double lo = 1.0;
    double hi = 1024.0;
    for (int pass = 0; pass < 200; ++pass) {
        const double mid = 0.5 * (lo + hi);
        const double value = mid * std::exp(1.0 - mid);
        if (value > target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("quantile bound satisfies its defining equation") {
    for (std::int64_t M : {2, 3, 5, 10, 50, 100, 1000, 10000, 1000000}) {
        for (double p : {0.01, 0.05, 0.1, 0.3}) {
            const double z = chi_upper_quantile_bound(M, p);
            CHECK(z > 1.0);
            const double residual =
                std::abs(z * std::exp(1.0 - z) - std::pow(p, 2.0 / static_cast<double>(M)));
            CAPTURE(M);
            CAPTURE(p);
            CHECK(residual <= 1e-12);
        }
    }
}

TEST_CASE("quantile bound agrees with a plain bisection oracle") {
    for (std::int64_t M : {2, 7, 40, 3000}) {
        for (double p : {0.02, 0.05, 0.25}) {
            CHECK(chi_upper_quantile_bound(M, p) ==
                  doctest::Approx(bisection_oracle(M, p)).epsilon(1e-10));
        }
    }
}

TEST_CASE("quantile bound hits its reference values") {
    CHECK(chi_upper_quantile_bound(2, 0.05) == doctest::Approx(5.744).epsilon(5e-4));
    const double near_one = chi_upper_quantile_bound(1000000, 0.05);
    CHECK(near_one > 1.0);
    CHECK(near_one - 1.0 < 0.01);
    // p near the domain edge: psi(1) = 1 and p^(2/M) -> 1, so the root
    // collapses toward 1 for huge M.
    CHECK(chi_upper_quantile_bound(1000000, 0.3699) - 1.0 < 0.01);
}

TEST_CASE("quantile bound decreases in M toward 1") {
    for (double p : {0.01, 0.05, 0.1, 0.3}) {
        double previous = chi_upper_quantile_bound(3, p);
        for (std::int64_t M : {4, 5, 8, 10, 30, 100, 1000, 10000}) {
            const double z = chi_upper_quantile_bound(M, p);
            CAPTURE(M);
            CAPTURE(p);
            CHECK(z < previous);
            CHECK(z > 1.0);
            previous = z;
        }
    }
}

TEST_CASE("quantile bound obeys the large-M envelope") {
    for (std::int64_t M : {100, 300, 1000, 10000, 100000}) {
        for (double p : {0.01, 0.05, 0.1, 0.3}) {
            const double z = chi_upper_quantile_bound(M, p);
            const double envelope = 3.0 * std::sqrt(-std::log(p) / static_cast<double>(M));
            CAPTURE(M);
            CAPTURE(p);
            CHECK(z - 1.0 <= envelope);
        }
    }
}

TEST_CASE("quantile bound rejects out-of-domain arguments") {
    CHECK_THROWS_AS(chi_upper_quantile_bound(0, 0.05), DomainError);
    CHECK_THROWS_AS(chi_upper_quantile_bound(10, 0.0), DomainError);
    CHECK_THROWS_AS(chi_upper_quantile_bound(10, -0.1), DomainError);
    CHECK_THROWS_AS(chi_upper_quantile_bound(10, 0.37), DomainError);
    CHECK_THROWS_AS(chi_upper_quantile_bound(10, 0.5), DomainError);
}

TEST_CASE("the bound is conservative against empirical chi-square quantiles") {
    const int draws = 100000;
    for (std::int64_t M : {2, 5, 10, 50}) {
        std::vector<double> chi2(draws);
        std::uint64_t index = 0;
        const std::uint64_t seed = shard_seed(31337, static_cast<std::uint64_t>(M));
        for (int t = 0; t < draws; ++t) {
            double sum = 0.0;
            for (std::int64_t i = 0; i < M; ++i) {
                const double g = normal_at(seed, index++);
                sum += g * g;
            }
            chi2[static_cast<std::size_t>(t)] = sum;
        }
        std::sort(chi2.begin(), chi2.end());
        for (double p : {0.05, 0.1}) {
            const auto rank = static_cast<std::size_t>(
                std::ceil((1.0 - p) * static_cast<double>(draws))) - 1;
            const double empirical_quantile = chi2[rank];
            const double z = chi_upper_quantile_bound(M, p);
            CAPTURE(M);
            CAPTURE(p);
            CHECK(static_cast<double>(M) * z >= empirical_quantile);
        }
    }
}

TEST_CASE("coverage runs meet their nominal level") {
    const CoverageReport a = coverage_probability(10, 100, 0.2, 0.05, 10000, 7);
    CHECK(a.coverage >= 0.95);
    CHECK(a.coverage <= 1.0);
    CHECK(a.z_bar == chi_upper_quantile_bound(10, 0.05));

    const CoverageReport b = coverage_probability(2, 1, 1.0, 0.3, 10000, 8);
    CHECK(b.coverage >= 0.7);

    const CoverageReport c = coverage_probability(50, 20, 0.5, 0.1, 10000, 9);
    CHECK(c.coverage >= 0.9);

    // Zero noise degenerates to certain coverage.
    CHECK(coverage_probability(10, 100, 0.0, 0.05, 100, 1).coverage == 1.0);

    // Same seed, same answer.
    const CoverageReport again = coverage_probability(10, 100, 0.2, 0.05, 10000, 7);
    CHECK(again.coverage == a.coverage);

    CHECK_THROWS_AS(coverage_probability(0, 1, 0.2, 0.05, 100, 1), DomainError);
    CHECK_THROWS_AS(coverage_probability(10, 100, 0.2, 0.05, 0, 1), DomainError);
}

TEST_CASE("second-derivative error bound matches an independent transcription") {
    BoundInputs inputs;
    inputs.Q = 6.5;
    inputs.y_k_norm = std::sqrt(52.0);
    inputs.C1 = 1.0;
    inputs.C2 = 1.0;
    inputs.sigma2 = 0.2;
    inputs.M = 10;
    inputs.N = 100;
    inputs.p = 0.05;
    const double c_bar = 0.0239;
    const double h_M = 0.1;

    const double z = chi_upper_quantile_bound(10, 0.05);
    const double transcription =
        std::hypot(std::sqrt(2.0 * z / c_bar),
                   inputs.Q * h_M * std::sqrt(2.0 / (c_bar * 100.0 * 0.2))) +
        2.0 * std::sqrt(52.0);
    const double value = bound_ek(inputs, c_bar, h_M);
    CHECK(value == doctest::Approx(transcription).epsilon(1e-14));
    CHECK(value > 0.0);
}

TEST_CASE("second-derivative error bound limits") {
    BoundInputs inputs;
    inputs.Q = 0.0;
    inputs.y_k_norm = 0.0;
    inputs.sigma2 = 0.2;
    inputs.M = 10;
    inputs.N = 100;
    inputs.p = 0.05;

    const double z = chi_upper_quantile_bound(10, 0.05);
    CHECK(bound_ek(inputs, 0.5, 0.1) ==
          doctest::Approx(std::sqrt(2.0 * z / 0.5)).epsilon(1e-14));

    // Huge c_bar: the bound collapses to twice the curvature norm.
    inputs.y_k_norm = std::sqrt(52.0);
    inputs.Q = 6.5;
    CHECK(bound_ek(inputs, 1e12, 0.1) ==
          doctest::Approx(2.0 * std::sqrt(52.0)).epsilon(1e-3));

    CHECK_THROWS_AS(bound_ek(inputs, 0.0, 0.1), DomainError);
    CHECK_THROWS_AS(bound_ek(inputs, -1.0, 0.1), DomainError);
}

TEST_CASE("value error bound matches an independent transcription") {
    BoundInputs inputs;
    inputs.Q = 6.5;
    inputs.y_k_norm = std::sqrt(52.0);
    inputs.sigma2 = 0.2;
    inputs.M = 10;
    inputs.N = 100;
    inputs.p = 0.05;
    const double c_bar = 0.0239;
    const double h_M = 0.1;
    const double h = 1e-3;
    const double e1 = 0.25;

    const double z = chi_upper_quantile_bound(10, 0.05);
    const double transcription =
        h * e1 + std::sqrt((8.0 * z * 0.2 + 2.0 * c_bar * 0.2 * 52.0) / 100.0 +
                           8.0 * 6.5 * 6.5 * 0.1 * 0.1 / (100.0 * 100.0));
    CHECK(bound_e(inputs, c_bar, h_M, h, e1) ==
          doctest::Approx(transcription).epsilon(1e-14));

    // Zero noise and zero slope bound leave only the mesh term.
    BoundInputs quiet = inputs;
    quiet.sigma2 = 0.0;
    quiet.Q = 0.0;
    CHECK(bound_e(quiet, c_bar, h_M, h, 0.0) == 0.0);
    CHECK_THROWS_AS(bound_e(inputs, c_bar, h_M, h, -0.1), DomainError);
}

TEST_CASE("rate bound evaluates the two-term model") {
    BoundInputs inputs;
    inputs.C1 = 0.0;
    inputs.C2 = 0.0;
    inputs.sigma2 = 0.25;
    inputs.N = 100000;
    CHECK(bound_rate(inputs, 0, 0.1) == 0.0);
    CHECK(bound_rate(inputs, 1, 0.1) == 0.0);

    inputs.C1 = 2.0;
    inputs.C2 = 3.0;
    const double ratio = 0.25 / 100000.0;
    CHECK(bound_rate(inputs, 0, 0.1) ==
          doctest::Approx(2.0 * 0.01 + 3.0 * std::sqrt(ratio)).epsilon(1e-14));
    CHECK(bound_rate(inputs, 1, 0.1) ==
          doctest::Approx(2.0 * 0.1 + 3.0 * std::pow(ratio, 0.25)).epsilon(1e-14));

    // With C1 = 0, quadrupling N scales the j = 1 term by (1/4)^(1/4).
    inputs.C1 = 0.0;
    const double before = bound_rate(inputs, 1, 0.1);
    inputs.N *= 4;
    const double after = bound_rate(inputs, 1, 0.1);
    CHECK(after == doctest::Approx(before * std::pow(0.25, 0.25)).epsilon(1e-12));

    CHECK_THROWS_AS(bound_rate(inputs, 2, 0.1), OrderError);
    CHECK_THROWS_AS(bound_rate(inputs, -1, 0.1), OrderError);
}
