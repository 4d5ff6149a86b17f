#ifndef GROUPDIFF_TYPES_HPP
#define GROUPDIFF_TYPES_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace groupdiff {

// Uniform mesh on [0, 1] with node_count intervals. Endpoints are fixed at
// 0 and 1; the meshsize is derived, never stored, so meshsize*node_count is
// 1 by construction.
struct UniformGrid {
    std::int64_t node_count = 0;

    double meshsize() const { return 1.0 / static_cast<double>(node_count); }
    double node(std::int64_t i) const {
        return static_cast<double>(i) / static_cast<double>(node_count);
    }
    std::int64_t interval_count() const { return node_count; }
};

// Samples y(x_j) + noise at the L grid nodes x_1..x_L. x_0 carries the
// exact left endpoint value; the last sample is pinned to the exact right
// endpoint value.
struct NoisySampleSet {
    UniformGrid grid;
    std::vector<double> values;
    double left_endpoint_value = 0.0;
    double right_endpoint_value = 0.0;
    std::optional<double> noise_variance;
};

// M consecutive-group means of a sample set, on the coarse grid x_i = i/M.
// Group i (1-based) covers sample indices (i-1)*N+1 .. i*N.
struct GroupedObservations {
    UniformGrid coarse_grid;
    std::int64_t group_size = 0;
    std::vector<double> group_means;
    double left_endpoint_value = 0.0;
    double right_endpoint_value = 0.0;
    std::optional<double> noise_variance_original;

    std::int64_t group_count() const { return coarse_grid.node_count; }
};

struct QuarticCoeffs {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
    double e = 0.0;
};

// f(x) = a_i + b_i t + c_i t^2 + d_i t^3 + e_i t^4 with t = x - x_i on
// [x_i, x_{i+1}), i = 0..M-1; knots are right-continuous and x = 1 belongs
// to the last interval.
struct PiecewiseQuartic {
    UniformGrid coarse_grid;
    std::vector<QuarticCoeffs> coefficients;
    double alpha_used = 0.0;

    std::int64_t interval_count() const { return coarse_grid.node_count; }
};

struct ExplicitAlpha {
    double alpha = 0.0;
};

// alpha = c_bar * sigma2 / N.
struct CbarRule {
    double c_bar = 0.0;
    double sigma2 = 0.0;
    std::int64_t N = 0;
};

using AlphaMode = std::variant<ExplicitAlpha, CbarRule>;

enum class SolverPath { reduced, full_kkt };

struct FitConfig {
    int k = 2;  // penalty derivative order; only 2 is implemented
    AlphaMode alpha_mode = ExplicitAlpha{1.0};
    double quantile_level = 0.05;  // p, must lie in (0, 0.37)
    SolverPath solver = SolverPath::reduced;
    double tau_cont = 1e-8;
    double tau_el = 1e-6;
    double tau_solve = 1e-10;
};

double resolved_alpha(const FitConfig& config);

// Inputs for the a-priori error bounds. Q bounds |y'| on [0,1]; y_k_norm is
// the L2 norm of y^(k); C1, C2 are the caller-supplied rate constants.
struct BoundInputs {
    double Q = 0.0;
    double y_k_norm = 0.0;
    double C1 = 0.0;
    double C2 = 0.0;
    double sigma2 = 0.0;
    std::int64_t M = 0;
    std::int64_t N = 0;
    double p = 0.0;
};

// Validation reports list every violated invariant; empty means valid.
std::vector<std::string> validate(const UniformGrid& grid);
std::vector<std::string> validate(const NoisySampleSet& samples);
std::vector<std::string> validate(const GroupedObservations& grouped);
std::vector<std::string> validate(const PiecewiseQuartic& fit);
std::vector<std::string> validate(const FitConfig& config);
std::vector<std::string> validate(const BoundInputs& inputs);

[[noreturn]] void throw_validation(const std::vector<std::string>& report);

// Throws ValidationError listing all violations; returns the value unchanged.
template <typename T>
const T& checked(const T& value) {
    const std::vector<std::string> report = validate(value);
    if (!report.empty()) {
        throw_validation(report);
    }
    return value;
}

}  // namespace groupdiff

#endif
