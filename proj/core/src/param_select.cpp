#include "groupdiff/param_select.hpp"

#include <cmath>
#include <string>

#include "groupdiff/errors.hpp"
#include "groupdiff/log.hpp"

namespace groupdiff {

namespace {

double safe_log(double v) {
    return std::log(std::max(v, 1e-300));
}

std::vector<double> default_cbar_grid() {
    std::vector<double> grid(50);
    for (int i = 0; i < 50; ++i) {
        const double exponent = -4.0 + 5.0 * static_cast<double>(i) / 49.0;
        grid[static_cast<std::size_t>(i)] = std::pow(10.0, exponent);
    }
    return grid;
}

}  // namespace

double alpha_from_cbar(double c_bar, double sigma2, std::int64_t N) {
    if (!(c_bar > 0.0) || !std::isfinite(c_bar)) {
        throw DomainError("c_bar must be positive and finite");
    }
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
        throw DomainError("sigma2 must be positive and finite");
    }
    if (N < 1) {
        throw DomainError("N must be positive");
    }
    return c_bar * sigma2 / static_cast<double>(N);
}

double residual(const PiecewiseQuartic& f, const GroupedObservations& grouped) {
    if (grouped.group_count() != f.interval_count()) {
        throw GridMismatchError("grouped observations do not match the fit's coarse grid");
    }
    double sum = 0.0;
    for (std::int64_t i = 0; i < f.interval_count(); ++i) {
        const double d = grouped.group_means[static_cast<std::size_t>(i)] - interval_mean(f, i);
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(f.interval_count()));
}

LCurve lcurve_scan(const GroupedObservations& grouped, double sigma2,
                   const LCurveOptions& options) {
    checked(grouped);
    if (options.penalty_order != 1 && options.penalty_order != 2) {
        throw OrderError("penalty_order must be 1 or 2");
    }
    std::vector<double> grid = options.c_bar_grid.empty() ? default_cbar_grid()
                                                          : options.c_bar_grid;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0) || !std::isfinite(grid[i])) {
            throw DomainError("c_bar grid values must be positive and finite");
        }
        if (i > 0 && !(grid[i] > grid[i - 1])) {
            throw DomainError("c_bar grid must be strictly increasing");
        }
    }

    LCurve curve;
    curve.penalty_order = options.penalty_order;
    curve.points.reserve(grid.size());
    bool dropped = false;
    for (double c_bar : grid) {
        const double alpha = alpha_from_cbar(c_bar, sigma2, grouped.group_size);
        try {
            const QuarticFitter fitter(grouped.group_count(), alpha);
            const PiecewiseQuartic f = fitter.fit(grouped);
            LCurvePoint point;
            point.c_bar = c_bar;
            point.alpha = alpha;
            point.log_penalty = safe_log(derivative_l2_norm_sq(f, options.penalty_order));
            point.log_residual = safe_log(residual(f, grouped));
            curve.points.push_back(point);
        } catch (const NumericalError& err) {
            dropped = true;
            warn("dropping L-curve point c_bar = " + std::to_string(c_bar) + ": " + err.what());
        }
    }
    if (dropped && curve.points.size() < 5) {
        throw TooFewPointsError("L-curve scan retained fewer than 5 points after drops");
    }
    return curve;
}

CornerResult lcurve_corner(LCurve& curve) {
    const std::size_t n = curve.points.size();
    if (n < 5) {
        throw TooFewPointsError("corner detection requires at least 5 L-curve points");
    }

    double best_kappa = 0.0;
    std::size_t best_index = 0;
    bool found = false;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const LCurvePoint& p1 = curve.points[i - 1];
        const LCurvePoint& p2 = curve.points[i];
        const LCurvePoint& p3 = curve.points[i + 1];
        const double ux = p2.log_residual - p1.log_residual;
        const double uy = p2.log_penalty - p1.log_penalty;
        const double vx = p3.log_residual - p2.log_residual;
        const double vy = p3.log_penalty - p2.log_penalty;
        const double wx = p3.log_residual - p1.log_residual;
        const double wy = p3.log_penalty - p1.log_penalty;
        const double cross = std::abs(ux * vy - uy * vx);
        const double a = std::hypot(ux, uy);
        const double b = std::hypot(vx, vy);
        const double c = std::hypot(wx, wy);
        if (a == 0.0 || b == 0.0 || c == 0.0) {
            continue;
        }
        if (cross <= 1e-12 * a * b) {
            continue;  // numerically collinear triple
        }
        const double kappa = 2.0 * cross / (a * b * c);
        if (kappa > best_kappa) {  // strict: ties keep the smaller c_bar
            best_kappa = kappa;
            best_index = i;
            found = true;
        }
    }

    CornerResult result;
    if (!found) {
        // Degenerate (collinear) curve: no curvature signal anywhere.
        warn("NoCornerWarning: L-curve is collinear, falling back to the largest c_bar "
             "with residual within 1.1x of the minimum");
        double min_log_residual = curve.points.front().log_residual;
        for (const LCurvePoint& point : curve.points) {
            min_log_residual = std::min(min_log_residual, point.log_residual);
        }
        const double cutoff = min_log_residual + std::log(1.1);
        std::size_t pick = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (curve.points[i].log_residual <= cutoff) {
                pick = i;  // grid is ascending in c_bar, keep the last hit
            }
        }
        result.index = pick;
        result.fallback_used = true;
    } else {
        result.index = best_index;
        result.fallback_used = false;
    }
    result.c_bar = curve.points[result.index].c_bar;
    result.alpha = curve.points[result.index].alpha;
    curve.chosen_index = result.index;
    return result;
}

}  // namespace groupdiff
