#include "groupdiff/stat_bounds.hpp"

#include <cmath>

#include "groupdiff/errors.hpp"
#include "groupdiff/rng.hpp"

namespace groupdiff {

namespace {

// x e^(1-x), strictly decreasing from 1 to 0 on [1, inf).
double psi(double x) {
    return x * std::exp(1.0 - x);
}

}  // namespace

double chi_upper_quantile_bound(std::int64_t M, double p) {
    if (M < 1) {
        throw DomainError("M must be positive");
    }
    if (!(p > 0.0 && p < 0.37)) {
        throw DomainError("p must lie in (0, 0.37)");
    }
    const double target = std::pow(p, 2.0 / static_cast<double>(M));

    double lo = 1.0;
    double hi = 2.0;
    while (psi(hi) > target) {
        lo = hi;
        hi *= 2.0;
    }
    for (int pass = 0; pass < 200; ++pass) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;  // bracket narrowed to adjacent doubles
        }
        if (psi(mid) > target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    double z = 0.5 * (lo + hi);
    // Newton polish; psi'(x) = (1 - x) e^(1-x) is nonzero for x > 1.
    for (int pass = 0; pass < 3; ++pass) {
        const double g = psi(z) - target;
        const double dg = (1.0 - z) * std::exp(1.0 - z);
        if (dg == 0.0) {
            break;
        }
        const double step = g / dg;
        const double next = z - step;
        if (next > 1.0 && std::isfinite(next)) {
            z = next;
        }
    }
    return z;
}

CoverageReport coverage_probability(std::int64_t M, std::int64_t N, double sigma2, double p,
                                    std::int64_t trials, std::uint64_t seed) {
    if (M < 1 || N < 1) {
        throw DomainError("M and N must be positive");
    }
    if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) {
        throw DomainError("sigma2 must be nonnegative and finite");
    }
    if (trials < 1) {
        throw DomainError("trials must be positive");
    }

    CoverageReport report;
    report.M = M;
    report.N = N;
    report.sigma2 = sigma2;
    report.p = p;
    report.z_bar = chi_upper_quantile_bound(M, p);
    report.trials = trials;
    report.seed = seed;

    if (sigma2 == 0.0) {
        // Degenerate noise: Delta_M^2 = 0 <= threshold always.
        report.coverage = 1.0;
        return report;
    }

    // Delta_M^2 = (1/M) sum of N(0, sigma^2/N)^2; the comparison against
    // z_bar sigma^2 / N is scale-free, so draw standard normals.
    const double threshold = report.z_bar * static_cast<double>(M);
    std::int64_t hits = 0;
    std::uint64_t index = 0;
    for (std::int64_t t = 0; t < trials; ++t) {
        double chi2 = 0.0;
        for (std::int64_t i = 0; i < M; ++i) {
            const double g = normal_at(seed, index++);
            chi2 += g * g;
        }
        if (chi2 <= threshold) {
            ++hits;
        }
    }
    report.coverage = static_cast<double>(hits) / static_cast<double>(trials);
    return report;
}

double bound_ek(const BoundInputs& inputs, double c_bar, double h_M) {
    if (!(c_bar > 0.0) || !std::isfinite(c_bar)) {
        throw DomainError("c_bar must be positive");
    }
    if (!(inputs.sigma2 > 0.0)) {
        throw DomainError("sigma2 must be positive");
    }
    if (inputs.N < 1) {
        throw DomainError("N must be positive");
    }
    const double z = chi_upper_quantile_bound(inputs.M, inputs.p);
    const double noise_term = 2.0 * z / c_bar;
    const double mesh_term = 2.0 * inputs.Q * inputs.Q * h_M * h_M /
                             (c_bar * static_cast<double>(inputs.N) * inputs.sigma2);
    return std::sqrt(noise_term + mesh_term) + 2.0 * inputs.y_k_norm;
}

double bound_e(const BoundInputs& inputs, double c_bar, double h_M, double h, double e1_norm) {
    if (!(c_bar > 0.0) || !std::isfinite(c_bar)) {
        throw DomainError("c_bar must be positive");
    }
    if (!(inputs.sigma2 >= 0.0)) {
        throw DomainError("sigma2 must be nonnegative");
    }
    if (inputs.N < 1) {
        throw DomainError("N must be positive");
    }
    if (!(e1_norm >= 0.0)) {
        throw DomainError("e1_norm must be nonnegative");
    }
    const double N = static_cast<double>(inputs.N);
    const double z = chi_upper_quantile_bound(inputs.M, inputs.p);
    const double inner = (8.0 * z * inputs.sigma2 +
                          2.0 * c_bar * inputs.sigma2 * inputs.y_k_norm * inputs.y_k_norm) /
                             N +
                         8.0 * inputs.Q * inputs.Q * h_M * h_M / (N * N);
    return h * e1_norm + std::sqrt(inner);
}

double bound_rate(const BoundInputs& inputs, int j, double h_M) {
    constexpr int k = 2;
    if (j < 0 || j >= k) {
        throw OrderError("derivative order j must lie in 0..1");
    }
    if (!(inputs.sigma2 >= 0.0) || inputs.N < 1) {
        throw DomainError("sigma2 must be nonnegative and N positive");
    }
    const double gap = static_cast<double>(k - j);
    const double noise_ratio = inputs.sigma2 / static_cast<double>(inputs.N);
    return inputs.C1 * std::pow(h_M, gap) +
           inputs.C2 * std::pow(noise_ratio, gap / (2.0 * k));
}

}  // namespace groupdiff
