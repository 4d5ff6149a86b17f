#ifndef GROUPDIFF_PREPROCESS_HPP
#define GROUPDIFF_PREPROCESS_HPP

#include <functional>
#include <vector>

#include "groupdiff/types.hpp"

namespace groupdiff {

// Piecewise-constant function on the coarse grid: value interval_values[i]
// on [x_i, x_{i+1}).
struct StepFunction {
    UniformGrid coarse_grid;
    std::vector<double> interval_values;
};

// Group the L samples into M consecutive groups of N = L/M and average.
// Requires 2 < M < L. When L is not divisible by M, allow_truncation drops
// the trailing L mod M samples with a logged warning; otherwise
// IndivisibleError.
GroupedObservations group_samples(const NoisySampleSet& samples, std::int64_t M,
                                  bool allow_truncation = false);

// Group means of the exact function sampled on the same fine grid:
// Y_i = (1/N) sum of y(x_j) over group i.
std::vector<double> exact_group_means(const std::function<double(double)>& y,
                                      const UniformGrid& fine_grid, std::int64_t M);

// Mean-square group-mean perturbation: (1/M) sum (Ytilde_i - Y_i)^2.
double delta_m_squared(const GroupedObservations& grouped,
                       const std::vector<double>& exact_means);

// L2 projection onto coarse-grid step functions: interval i carries the
// interval mean of g, computed by adaptive composite Simpson.
StepFunction step_project(const std::function<double(double)>& g,
                          const UniformGrid& coarse_grid);

}  // namespace groupdiff

#endif
