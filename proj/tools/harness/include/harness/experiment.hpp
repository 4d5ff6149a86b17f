#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "groupdiff/types.hpp"
#include "harness/functions.hpp"

namespace harness {

// Parsed experiment description.  `alpha` wins over `c_bar`; with only
// `c_bar` the regularization weight becomes c_bar * sigma2 / N once the
// group size N is known.
struct ExperimentConfig {
    std::string function_id = "cubic";
    std::vector<double> coefficients;  // custom polynomial only
    std::int64_t L = 1000;
    double sigma2 = 0.2;
    std::vector<std::int64_t> M_values = {10};
    std::uint64_t seed = 1;
    std::optional<double> alpha;
    std::optional<double> c_bar;
    bool allow_truncation = false;
    std::string out_dir = ".";

    FunctionSpec function() const;
    double resolve_alpha(std::int64_t N) const;
    double resolved_c_bar() const { return c_bar.value_or(0.0239); }
};

// Strict parse: unknown keys rejected, invariants enforced (L >= 4,
// sigma2 >= 0, every M >= 3 and dividing L unless allow_truncation).
ExperimentConfig parse_experiment_config(std::string_view json_text);
std::string experiment_config_to_json(const ExperimentConfig& config, int indent = -1);

struct ErrorReport {
    double l2_value = 0.0;
    double linf_value = 0.0;
    double l2_deriv = 0.0;
    double linf_deriv = 0.0;
    double runtime_ms = 0.0;  // reported on stderr only, never in artifact files
};

// Samples y at j/L for j = 1..L plus seeded Gaussian noise; the endpoint
// observations are exact, so the last value is pinned to y(1).
groupdiff::NoisySampleSet generate_samples(const ExperimentConfig& config);
groupdiff::NoisySampleSet generate_samples(const ExperimentConfig& config, std::uint64_t seed);

// Composite Simpson of (y^(order) - f^(order))^2 on a grid 20x finer than
// the coarse grid, square-rooted.  order in {0, 1}.
double l2_error(const groupdiff::PiecewiseQuartic& f, const FunctionSpec& y, int order);

// Max deviation over the fine sample nodes 1/L .. L/L.
double linf_error(const groupdiff::PiecewiseQuartic& f, const FunctionSpec& y, int order,
                  std::int64_t L);

ErrorReport measure_errors(const groupdiff::PiecewiseQuartic& f, const FunctionSpec& y,
                           std::int64_t L);

double median(std::vector<double> values);

struct SeedOutcome {
    std::uint64_t seed = 0;
    ErrorReport errors;
};

struct Table1Row {
    std::int64_t M = 0;
    ErrorReport median_errors;
    std::vector<SeedOutcome> per_seed;
};

// One row per M in config order; medians are column-wise over seeds.
// Replicas run in parallel, aggregation is by seed index so results are
// scheduling-independent.
std::vector<Table1Row> run_table1(const ExperimentConfig& config, int seed_count = 20);

struct ConvergenceRecord {
    std::int64_t L = 0;
    std::int64_t M = 0;
    std::int64_t N = 0;
    double median_l2_deriv = 0.0;
};

struct ConvergenceResult {
    std::vector<ConvergenceRecord> records;
    // Slope of log(error) against log(sigma2/N), or against log(1/M) when
    // sigma2 == 0.
    double slope = 0.0;
    bool sigma_zero = false;
};

// Largest divisor of L at or below round(L^(4/5)).
std::int64_t convergence_group_size(std::int64_t L);

ConvergenceResult run_convergence(const ExperimentConfig& config,
                                  const std::vector<std::int64_t>& L_list = {1000, 10000, 100000},
                                  int seed_count = 20);

struct BaselineResult {
    ErrorReport baseline_median;
    ErrorReport grouped_median;
    std::vector<SeedOutcome> baseline_per_seed;
    std::vector<SeedOutcome> grouped_per_seed;
    double grouped_win_fraction = 0.0;  // share of seeds where grouped L2 value error wins
    std::int64_t grouped_M = 0;
};

// Ungrouped reference: M = L, N = 1, alpha mapped from the reference rule
// (see the note in the implementation).  Refuses L > 5000 (dense solve
// beyond the resource budget).  Also runs the grouped fit on the same noise
// for the comparison columns.
BaselineResult run_baseline(const ExperimentConfig& config, int seed_count = 20,
                            std::int64_t grouped_M = 10,
                            std::optional<double> alpha_override = std::nullopt);

struct BigdataResult {
    ErrorReport median_errors;
    double median_relative_l2 = 0.0;
    double max_runtime_ms = 0.0;
    std::vector<SeedOutcome> per_seed;
};

BigdataResult run_bigdata(const ExperimentConfig& config, int seed_count = 10);

}  // namespace harness
