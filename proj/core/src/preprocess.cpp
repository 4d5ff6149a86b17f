#include "groupdiff/preprocess.hpp"

#include <string>

#include "groupdiff/errors.hpp"
#include "groupdiff/log.hpp"
#include "groupdiff/quadrature.hpp"

namespace groupdiff {

GroupedObservations group_samples(const NoisySampleSet& samples, std::int64_t M,
                                  bool allow_truncation) {
    checked(samples);
    const std::int64_t L = samples.grid.node_count;
    if (M <= 2) {
        throw GroupCountError("group count M must exceed 2");
    }
    if (M >= L) {
        throw GroupCountError("group count M must be smaller than the sample count");
    }
    std::int64_t N = L / M;
    const std::int64_t remainder = L % M;
    if (remainder != 0) {
        if (!allow_truncation) {
            throw IndivisibleError("sample count " + std::to_string(L) +
                                   " is not divisible by M = " + std::to_string(M));
        }
        warn("truncating trailing " + std::to_string(remainder) + " of " + std::to_string(L) +
             " samples to make the count divisible by M = " + std::to_string(M));
    }

    GroupedObservations grouped;
    grouped.coarse_grid = UniformGrid{M};
    grouped.group_size = N;
    grouped.group_means.resize(static_cast<std::size_t>(M));
    grouped.left_endpoint_value = samples.left_endpoint_value;
    grouped.right_endpoint_value = samples.right_endpoint_value;
    grouped.noise_variance_original = samples.noise_variance;

    for (std::int64_t i = 0; i < M; ++i) {
        double sum = 0.0;
        const std::int64_t base = i * N;
        for (std::int64_t j = 0; j < N; ++j) {
            sum += samples.values[static_cast<std::size_t>(base + j)];
        }
        grouped.group_means[static_cast<std::size_t>(i)] = sum / static_cast<double>(N);
    }
    return grouped;
}

std::vector<double> exact_group_means(const std::function<double(double)>& y,
                                      const UniformGrid& fine_grid, std::int64_t M) {
    checked(fine_grid);
    const std::int64_t L = fine_grid.node_count;
    if (M <= 2 || M >= L) {
        throw GroupCountError("group count M must satisfy 2 < M < L");
    }
    if (L % M != 0) {
        throw IndivisibleError("sample count " + std::to_string(L) +
                               " is not divisible by M = " + std::to_string(M));
    }
    const std::int64_t N = L / M;
    std::vector<double> means(static_cast<std::size_t>(M));
    for (std::int64_t i = 0; i < M; ++i) {
        double sum = 0.0;
        for (std::int64_t j = 1; j <= N; ++j) {
            sum += y(fine_grid.node(i * N + j));
        }
        means[static_cast<std::size_t>(i)] = sum / static_cast<double>(N);
    }
    return means;
}

double delta_m_squared(const GroupedObservations& grouped,
                       const std::vector<double>& exact_means) {
    if (exact_means.size() != grouped.group_means.size()) {
        throw LengthMismatchError("exact means length " + std::to_string(exact_means.size()) +
                                  " does not match group count " +
                                  std::to_string(grouped.group_means.size()));
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < exact_means.size(); ++i) {
        const double d = grouped.group_means[i] - exact_means[i];
        sum += d * d;
    }
    return sum / static_cast<double>(exact_means.size());
}

StepFunction step_project(const std::function<double(double)>& g,
                          const UniformGrid& coarse_grid) {
    checked(coarse_grid);
    const std::int64_t M = coarse_grid.node_count;
    StepFunction step;
    step.coarse_grid = coarse_grid;
    step.interval_values.resize(static_cast<std::size_t>(M));
    const double h = coarse_grid.meshsize();
    for (std::int64_t i = 0; i < M; ++i) {
        const double a = coarse_grid.node(i);
        const double b = coarse_grid.node(i + 1);
        step.interval_values[static_cast<std::size_t>(i)] = integrate(g, a, b) / h;
    }
    return step;
}

}  // namespace groupdiff
