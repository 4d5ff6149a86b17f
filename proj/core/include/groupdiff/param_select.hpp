#ifndef GROUPDIFF_PARAM_SELECT_HPP
#define GROUPDIFF_PARAM_SELECT_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "groupdiff/quartic_fit.hpp"
#include "groupdiff/types.hpp"

namespace groupdiff {

// alpha = c_bar * sigma2 / N.
double alpha_from_cbar(double c_bar, double sigma2, std::int64_t N);

// Root-mean-square data misfit: sqrt((1/M) sum (Ytilde_i - M_i(f))^2).
double residual(const PiecewiseQuartic& f, const GroupedObservations& grouped);

struct LCurvePoint {
    double c_bar = 0.0;
    double alpha = 0.0;
    double log_penalty = 0.0;
    double log_residual = 0.0;
};

struct LCurve {
    std::vector<LCurvePoint> points;          // ordered by increasing c_bar
    std::optional<std::size_t> chosen_index;  // set by lcurve_corner
    int penalty_order = 1;
};

struct LCurveOptions {
    std::vector<double> c_bar_grid;  // empty -> 50 points log-spaced in [1e-4, 10]
    int penalty_order = 1;           // ||f'||^2 (1) or ||f''||^2 (2)
};

// Fit once per c_bar and record (log penalty, log residual). Points whose
// fit fails are dropped with a warning; if any were dropped the scan must
// still retain at least 5 points.
LCurve lcurve_scan(const GroupedObservations& grouped, double sigma2,
                   const LCurveOptions& options = {});

struct CornerResult {
    std::size_t index = 0;
    double c_bar = 0.0;
    double alpha = 0.0;
    bool fallback_used = false;  // collinear curve, largest acceptable c_bar
};

// Corner = point of maximum discrete curvature of the (log_residual,
// log_penalty) polyline, by the circumscribed circle of consecutive
// triples; ties break toward smaller c_bar. A collinear curve falls back,
// with a warning, to the largest c_bar whose residual is within 1.1x of
// the minimum. Requires at least 5 points. Marks curve.chosen_index.
CornerResult lcurve_corner(LCurve& curve);

}  // namespace groupdiff

#endif
