#ifndef GROUPDIFF_QUARTIC_FIT_HPP
#define GROUPDIFF_QUARTIC_FIT_HPP

#include <memory>
#include <string>
#include <vector>

#include "groupdiff/linalg.hpp"
#include "groupdiff/types.hpp"

namespace groupdiff {

// Penalized least-squares fit of grouped observations by a piecewise
// quartic: minimize (1/M) sum (Ytilde_i - M_i(f))^2 + alpha ||f''||^2 over
// f in H^2 with f(0), f(1) pinned to the exact endpoint values. M_i is the
// mean of f over coarse interval i. The minimizer satisfies, per interval,
//
//   f'''' = (1/alpha)(Ytilde_{i+1} - M_i(f)),
//
// with f, f', f'', f''' continuous at interior knots, f''(0) = f''(1) = 0,
// and the endpoint interpolation conditions.

struct DenseLinearSystem {
    enum class Kind { full_kkt, reduced_e };
    Kind kind = Kind::full_kkt;
    Matrix matrix;
    std::vector<double> rhs;
};

// 5M x 5M system in the per-interval coefficients (a_i, b_i, c_i, d_i, e_i).
// Row layout: 4(M-1) continuity rows (order 0..3 per interior knot), M
// stationarity rows 24 e_i + (1/alpha) M_i(f) = (1/alpha) Ytilde_{i+1},
// f''(0) = 0, f''(1) = 0, f(0) = y(0), f(1) = y(1).
DenseLinearSystem assemble_full_kkt(const GroupedObservations& grouped, double alpha);

// Equivalent M x M system in e alone, obtained by eliminating a, b, c, d
// through the continuity and boundary relations (see docs/reduced-system.md
// for the derivation).
DenseLinearSystem assemble_reduced(const GroupedObservations& grouped, double alpha);

// Back-substitute e into the elimination relations to recover all 5M
// coefficients.
PiecewiseQuartic recover_coefficients(const std::vector<double>& e,
                                      const GroupedObservations& grouped, double alpha);

PiecewiseQuartic fit(const GroupedObservations& grouped, const FitConfig& config = {});

// Value or derivative (order 0..4) at x in [0, 1]. Interior knots evaluate
// on their right interval; x = 1 on the last.
double evaluate(const PiecewiseQuartic& f, double x, int order = 0);

// Closed-form mean of f over coarse interval i.
double interval_mean(const PiecewiseQuartic& f, std::int64_t i);

// Exact integral of (f^(order))^2 over [0, 1] (per-interval polynomial
// antiderivative, no quadrature error).
double derivative_l2_norm_sq(const PiecewiseQuartic& f, int order);

// Diagnostic checks of the optimality structure; empty report = holds.
// Continuity of f..f''' at interior knots plus the natural boundary
// conditions, each scaled by max(1, max knot magnitude of that order).
std::vector<std::string> continuity_report(const PiecewiseQuartic& f, double tau_cont);
// Per-interval stationarity 24 e_i = (Ytilde_{i+1} - M_i(f)) / alpha.
std::vector<std::string> euler_lagrange_report(const PiecewiseQuartic& f,
                                               const GroupedObservations& grouped,
                                               double tau_el);

// Precomputed reduced system for one (M, alpha) pair; lets repeated fits
// over the same geometry (parameter scans, per-seed replicas) reuse the
// assembly and factorization.
class QuarticFitter {
public:
    QuarticFitter(std::int64_t M, double alpha);
    ~QuarticFitter();
    QuarticFitter(QuarticFitter&&) noexcept;
    QuarticFitter& operator=(QuarticFitter&&) noexcept;

    std::int64_t group_count() const;
    double alpha() const;

    const Matrix& system_matrix() const;
    std::vector<double> rhs(const GroupedObservations& grouped) const;
    PiecewiseQuartic recover(const std::vector<double>& e,
                             const GroupedObservations& grouped) const;
    // Solve + recover; factorizes the system matrix on first use.
    PiecewiseQuartic fit(const GroupedObservations& grouped, double tau_solve = 1e-10) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace groupdiff

#endif
