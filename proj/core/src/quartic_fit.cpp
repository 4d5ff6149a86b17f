#include "groupdiff/quartic_fit.hpp"

#include <cmath>
#include <optional>
#include <string>

#include "groupdiff/errors.hpp"

namespace groupdiff {

namespace {

// Interval mean of a + b t + c t^2 + d t^3 + e t^4 over t in [0, h],
// divided by h.
double local_mean(const QuarticCoeffs& q, double h) {
    return q.a + h * (q.b / 2.0 + h * (q.c / 3.0 + h * (q.d / 4.0 + h * q.e / 5.0)));
}

double knot_value(const QuarticCoeffs& q, double t, int order) {
    switch (order) {
        case 0:
            return q.a + t * (q.b + t * (q.c + t * (q.d + t * q.e)));
        case 1:
            return q.b + t * (2.0 * q.c + t * (3.0 * q.d + t * 4.0 * q.e));
        case 2:
            return 2.0 * q.c + t * (6.0 * q.d + t * 12.0 * q.e);
        case 3:
            return 6.0 * q.d + t * 24.0 * q.e;
        case 4:
            return 24.0 * q.e;
        default:
            throw OrderError("derivative order must lie in 0..4");
    }
}

void check_fit_inputs(const GroupedObservations& grouped, double alpha) {
    checked(grouped);
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw DomainError("alpha must be positive and finite");
    }
}

// Forward difference with the boundary values eliminated: maps the M-1
// interior knot values (u_1..u_{M-1}) to the M per-interval differences
// u_{i+1} - u_i with u_0 = u_M = 0.
Matrix apply_forward_difference(const Matrix& interior) {
    const std::size_t m = interior.rows();
    const std::size_t w = interior.cols();
    Matrix out(m + 1, w);
    for (std::size_t j = 0; j < w; ++j) {
        out(0, j) = interior(0, j);
    }
    for (std::size_t i = 1; i < m; ++i) {
        for (std::size_t j = 0; j < w; ++j) {
            out(i, j) = interior(i, j) - interior(i - 1, j);
        }
    }
    for (std::size_t j = 0; j < w; ++j) {
        out(m, j) = -interior(m - 1, j);
    }
    return out;
}

std::vector<double> apply_forward_difference(const std::vector<double>& interior) {
    const std::size_t m = interior.size();
    std::vector<double> out(m + 1);
    out[0] = interior[0];
    for (std::size_t i = 1; i < m; ++i) {
        out[i] = interior[i] - interior[i - 1];
    }
    out[m] = -interior[m - 1];
    return out;
}

}  // namespace

// Elimination of a, b, c, d from the optimality system, in terms of e and
// the endpoint values f0 = y(0), f1 = y(1):
//
//   second differences of the knot values of f''/2 and of f give
//     c_{i-1} - 2 c_i + c_{i+1} = 6 h^2 (e_{i-1} + e_i)
//     a_{i-1} - 2 a_i + a_{i+1} = h^2 (c_{i-1} + c_i) + h^3 (2 d_{i-1} + d_i)
//                                 + h^4 (3 e_{i-1} + e_i)
//   with c_0 = c_M = 0, a_0 = f0, a_M = f1, and per interval
//     d_i = (c_{i+1} - c_i - 6 e_i h^2) / (3 h)
//     b_i = (a_{i+1} - a_i)/h - c_i h - d_i h^2 - e_i h^3.
//
// Substituting into the M stationarity rows yields the reduced system
// G e = r built here; docs/reduced-system.md carries the full derivation.
struct QuarticFitter::Impl {
    std::int64_t M = 0;
    double alpha = 0.0;
    double h = 0.0;
    Matrix C;     // (M-1) x M: c = C e
    Matrix D;     // M x M:     d = D e
    Matrix Atil;  // (M-1) x M: a = Atil e - vbar1
    Matrix Btil;  // M x M:     b = Btil e - vbar2
    Matrix G;     // M x M reduced system matrix
    mutable std::optional<LuFactorization> lu;

    Impl(std::int64_t M_in, double alpha_in) : M(M_in), alpha(alpha_in) {
        if (M < 3) {
            throw GroupCountError("reduced assembly requires M >= 3");
        }
        if (!(alpha > 0.0) || !std::isfinite(alpha)) {
            throw DomainError("alpha must be positive and finite");
        }
        h = 1.0 / static_cast<double>(M);
        const std::size_t m = static_cast<std::size_t>(M) - 1;  // interior knots
        const std::size_t n = static_cast<std::size_t>(M);

        Matrix B1(m, n);
        for (std::size_t i = 0; i < m; ++i) {
            B1(i, i) = 1.0;
            B1(i, i + 1) = 1.0;
        }
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                B1(i, j) *= 6.0 * h * h;
            }
        }
        C = solve_second_difference(std::move(B1));

        const Matrix TC = apply_forward_difference(C);
        D = Matrix(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                D(i, j) = TC(i, j) / (3.0 * h);
            }
            D(i, i) -= 2.0 * h;
        }

        // S = h^2 P c + h^3 Q d + h^4 R e contributions, rows at interior knots.
        Matrix S(m, n);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                double s = C(i, j);  // c_i term
                if (i > 0) {
                    s += C(i - 1, j);  // c_{i-1}
                }
                s *= h * h;
                s += h * h * h * (2.0 * D(i, j) + D(i + 1, j));
                S(i, j) = s;
            }
            S(i, i) += 3.0 * h * h * h * h;
            S(i, i + 1) += h * h * h * h;
        }
        Atil = solve_second_difference(std::move(S));

        const Matrix TA = apply_forward_difference(Atil);
        Btil = Matrix(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                double s = TA(i, j) / h - h * h * D(i, j);
                if (i > 0) {
                    s -= h * C(i - 1, j);  // (0; c) stacking: row 0 has c_0 = 0
                }
                Btil(i, j) = s;
            }
            Btil(i, i) -= h * h * h;
        }

        G = Matrix(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                double s = (h / 2.0) * Btil(i, j) + (h * h * h / 4.0) * D(i, j);
                if (i > 0) {
                    s += Atil(i - 1, j) + (h * h / 3.0) * C(i - 1, j);
                }
                G(i, j) = s;
            }
            G(i, i) += 24.0 * alpha + h * h * h * h / 5.0;
        }
    }

    std::vector<double> vbar1(double f0, double f1) const {
        std::vector<double> v1(static_cast<std::size_t>(M) - 1, 0.0);
        v1.front() += f0;
        v1.back() += f1;
        return solve_second_difference(std::move(v1));
    }

    std::vector<double> vbar2(const std::vector<double>& vb1, double f0, double f1) const {
        std::vector<double> v = apply_forward_difference(vb1);
        v.front() += f0;
        v.back() -= f1;
        for (double& x : v) {
            x /= h;
        }
        return v;
    }

    std::vector<double> rhs(const GroupedObservations& grouped) const {
        const double f0 = grouped.left_endpoint_value;
        const double f1 = grouped.right_endpoint_value;
        const std::vector<double> vb1 = vbar1(f0, f1);
        const std::vector<double> vb2 = vbar2(vb1, f0, f1);
        std::vector<double> r(static_cast<std::size_t>(M));
        for (std::size_t i = 0; i < r.size(); ++i) {
            r[i] = grouped.group_means[i] + (h / 2.0) * vb2[i];
        }
        r[0] -= f0;
        for (std::size_t i = 1; i < r.size(); ++i) {
            r[i] += vb1[i - 1];
        }
        return r;
    }

    PiecewiseQuartic recover(const std::vector<double>& e,
                             const GroupedObservations& grouped) const {
        const double f0 = grouped.left_endpoint_value;
        const double f1 = grouped.right_endpoint_value;
        const std::vector<double> c = multiply(C, e);
        const std::vector<double> d = multiply(D, e);
        const std::vector<double> vb1 = vbar1(f0, f1);
        const std::vector<double> vb2 = vbar2(vb1, f0, f1);
        std::vector<double> a = multiply(Atil, e);
        for (std::size_t i = 0; i < a.size(); ++i) {
            a[i] -= vb1[i];
        }
        std::vector<double> b = multiply(Btil, e);
        for (std::size_t i = 0; i < b.size(); ++i) {
            b[i] -= vb2[i];
        }

        PiecewiseQuartic f;
        f.coarse_grid = UniformGrid{M};
        f.alpha_used = alpha;
        f.coefficients.resize(static_cast<std::size_t>(M));
        for (std::size_t i = 0; i < f.coefficients.size(); ++i) {
            QuarticCoeffs& q = f.coefficients[i];
            q.a = (i == 0) ? f0 : a[i - 1];
            q.b = b[i];
            q.c = (i == 0) ? 0.0 : c[i - 1];
            q.d = d[i];
            q.e = e[i];
        }
        return f;
    }
};

QuarticFitter::QuarticFitter(std::int64_t M, double alpha)
    : impl_(std::make_unique<Impl>(M, alpha)) {}

QuarticFitter::~QuarticFitter() = default;
QuarticFitter::QuarticFitter(QuarticFitter&&) noexcept = default;
QuarticFitter& QuarticFitter::operator=(QuarticFitter&&) noexcept = default;

std::int64_t QuarticFitter::group_count() const {
    return impl_->M;
}

double QuarticFitter::alpha() const {
    return impl_->alpha;
}

const Matrix& QuarticFitter::system_matrix() const {
    return impl_->G;
}

std::vector<double> QuarticFitter::rhs(const GroupedObservations& grouped) const {
    if (grouped.group_count() != impl_->M) {
        throw GridMismatchError("grouped observations do not match the fitter's group count");
    }
    return impl_->rhs(grouped);
}

PiecewiseQuartic QuarticFitter::recover(const std::vector<double>& e,
                                        const GroupedObservations& grouped) const {
    if (grouped.group_count() != impl_->M) {
        throw GridMismatchError("grouped observations do not match the fitter's group count");
    }
    if (static_cast<std::int64_t>(e.size()) != impl_->M) {
        throw LengthMismatchError("e vector length does not match the group count");
    }
    return impl_->recover(e, grouped);
}

PiecewiseQuartic QuarticFitter::fit(const GroupedObservations& grouped, double tau_solve) const {
    if (grouped.group_count() != impl_->M) {
        throw GridMismatchError("grouped observations do not match the fitter's group count");
    }
    if (!impl_->lu) {
        impl_->lu.emplace(impl_->G);
    }
    const std::vector<double> r = impl_->rhs(grouped);
    std::vector<double> e = impl_->lu->solve(r);
    // One refinement pass, then certify.
    std::vector<double> res = multiply(impl_->G, e);
    for (std::size_t i = 0; i < res.size(); ++i) {
        res[i] = r[i] - res[i];
    }
    const std::vector<double> de = impl_->lu->solve(res);
    for (std::size_t i = 0; i < e.size(); ++i) {
        e[i] += de[i];
    }
    res = multiply(impl_->G, e);
    double err = 0.0;
    double scale = 1.0;
    for (std::size_t i = 0; i < res.size(); ++i) {
        err = std::max(err, std::abs(r[i] - res[i]));
        scale = std::max(scale, std::abs(r[i]));
    }
    if (!(err <= tau_solve * scale)) {
        throw NumericalError("reduced solve residual " + std::to_string(err) +
                             " exceeds tolerance");
    }
    return impl_->recover(e, grouped);
}

DenseLinearSystem assemble_full_kkt(const GroupedObservations& grouped, double alpha) {
    check_fit_inputs(grouped, alpha);
    const std::int64_t M = grouped.group_count();
    const double h = grouped.coarse_grid.meshsize();
    const std::size_t n = static_cast<std::size_t>(5 * M);

    DenseLinearSystem sys;
    sys.kind = DenseLinearSystem::Kind::full_kkt;
    sys.matrix = Matrix(n, n);
    sys.rhs.assign(n, 0.0);
    Matrix& A = sys.matrix;

    const auto col = [](std::int64_t interval, int coeff) {
        return static_cast<std::size_t>(5 * interval + coeff);
    };

    std::size_t row = 0;
    // Continuity of f, f', f'', f''' across each interior knot.
    for (std::int64_t i = 0; i + 1 < M; ++i, row += 4) {
        const double h2 = h * h;
        const double h3 = h2 * h;
        const double h4 = h3 * h;
        A(row, col(i, 0)) = 1.0;
        A(row, col(i, 1)) = h;
        A(row, col(i, 2)) = h2;
        A(row, col(i, 3)) = h3;
        A(row, col(i, 4)) = h4;
        A(row, col(i + 1, 0)) = -1.0;

        A(row + 1, col(i, 1)) = 1.0;
        A(row + 1, col(i, 2)) = 2.0 * h;
        A(row + 1, col(i, 3)) = 3.0 * h2;
        A(row + 1, col(i, 4)) = 4.0 * h3;
        A(row + 1, col(i + 1, 1)) = -1.0;

        A(row + 2, col(i, 2)) = 2.0;
        A(row + 2, col(i, 3)) = 6.0 * h;
        A(row + 2, col(i, 4)) = 12.0 * h2;
        A(row + 2, col(i + 1, 2)) = -2.0;

        A(row + 3, col(i, 3)) = 6.0;
        A(row + 3, col(i, 4)) = 24.0 * h;
        A(row + 3, col(i + 1, 3)) = -6.0;
    }
    // Stationarity: 24 e_i + (1/alpha) M_i(f) = (1/alpha) Ytilde_{i+1}.
    const double inv_alpha = 1.0 / alpha;
    for (std::int64_t i = 0; i < M; ++i, ++row) {
        A(row, col(i, 0)) = inv_alpha;
        A(row, col(i, 1)) = inv_alpha * h / 2.0;
        A(row, col(i, 2)) = inv_alpha * h * h / 3.0;
        A(row, col(i, 3)) = inv_alpha * h * h * h / 4.0;
        A(row, col(i, 4)) = 24.0 + inv_alpha * h * h * h * h / 5.0;
        sys.rhs[row] = inv_alpha * grouped.group_means[static_cast<std::size_t>(i)];
    }
    // Natural boundary conditions f''(0) = f''(1) = 0.
    A(row, col(0, 2)) = 2.0;
    ++row;
    A(row, col(M - 1, 2)) = 2.0;
    A(row, col(M - 1, 3)) = 6.0 * h;
    A(row, col(M - 1, 4)) = 12.0 * h * h;
    ++row;
    // Endpoint interpolation.
    A(row, col(0, 0)) = 1.0;
    sys.rhs[row] = grouped.left_endpoint_value;
    ++row;
    A(row, col(M - 1, 0)) = 1.0;
    A(row, col(M - 1, 1)) = h;
    A(row, col(M - 1, 2)) = h * h;
    A(row, col(M - 1, 3)) = h * h * h;
    A(row, col(M - 1, 4)) = h * h * h * h;
    sys.rhs[row] = grouped.right_endpoint_value;
    return sys;
}

DenseLinearSystem assemble_reduced(const GroupedObservations& grouped, double alpha) {
    check_fit_inputs(grouped, alpha);
    const QuarticFitter fitter(grouped.group_count(), alpha);
    DenseLinearSystem sys;
    sys.kind = DenseLinearSystem::Kind::reduced_e;
    sys.matrix = fitter.system_matrix();
    sys.rhs = fitter.rhs(grouped);
    return sys;
}

PiecewiseQuartic recover_coefficients(const std::vector<double>& e,
                                      const GroupedObservations& grouped, double alpha) {
    check_fit_inputs(grouped, alpha);
    const QuarticFitter fitter(grouped.group_count(), alpha);
    return fitter.recover(e, grouped);
}

PiecewiseQuartic fit(const GroupedObservations& grouped, const FitConfig& config) {
    checked(grouped);
    checked(config);
    const double alpha = resolved_alpha(config);
    if (config.solver == SolverPath::reduced) {
        const QuarticFitter fitter(grouped.group_count(), alpha);
        return fitter.fit(grouped, config.tau_solve);
    }

    const DenseLinearSystem sys = assemble_full_kkt(grouped, alpha);
    const SolveReport report = solve(sys.matrix, sys.rhs);
    double scale = 1.0;
    for (double v : sys.rhs) {
        scale = std::max(scale, std::abs(v));
    }
    if (!(report.residual_inf <= config.tau_solve * scale)) {
        throw NumericalError("full KKT solve residual " + std::to_string(report.residual_inf) +
                             " exceeds tolerance");
    }
    const std::int64_t M = grouped.group_count();
    PiecewiseQuartic f;
    f.coarse_grid = grouped.coarse_grid;
    f.alpha_used = alpha;
    f.coefficients.resize(static_cast<std::size_t>(M));
    for (std::int64_t i = 0; i < M; ++i) {
        QuarticCoeffs& q = f.coefficients[static_cast<std::size_t>(i)];
        q.a = report.x[static_cast<std::size_t>(5 * i + 0)];
        q.b = report.x[static_cast<std::size_t>(5 * i + 1)];
        q.c = report.x[static_cast<std::size_t>(5 * i + 2)];
        q.d = report.x[static_cast<std::size_t>(5 * i + 3)];
        q.e = report.x[static_cast<std::size_t>(5 * i + 4)];
    }
    return f;
}

double evaluate(const PiecewiseQuartic& f, double x, int order) {
    if (order < 0 || order > 4) {
        throw OrderError("derivative order must lie in 0..4");
    }
    if (!(x >= 0.0 && x <= 1.0)) {
        throw DomainError("evaluation point must lie in [0, 1]");
    }
    const std::int64_t M = f.interval_count();
    std::int64_t i = static_cast<std::int64_t>(x * static_cast<double>(M));
    if (i >= M) {
        i = M - 1;
    }
    // Knots are right-continuous; guard against floating classification.
    if (i + 1 < M && x >= f.coarse_grid.node(i + 1)) {
        ++i;
    } else if (i > 0 && x < f.coarse_grid.node(i)) {
        --i;
    }
    const double t = x - f.coarse_grid.node(i);
    return knot_value(f.coefficients[static_cast<std::size_t>(i)], t, order);
}

double interval_mean(const PiecewiseQuartic& f, std::int64_t i) {
    if (i < 0 || i >= f.interval_count()) {
        throw IndexError("interval index out of range");
    }
    return local_mean(f.coefficients[static_cast<std::size_t>(i)], f.coarse_grid.meshsize());
}

double derivative_l2_norm_sq(const PiecewiseQuartic& f, int order) {
    if (order < 0 || order > 4) {
        throw OrderError("derivative order must lie in 0..4");
    }
    const double h = f.coarse_grid.meshsize();
    double total = 0.0;
    for (const QuarticCoeffs& q : f.coefficients) {
        // Coefficients of the order-th derivative in the local variable.
        double p[5] = {0, 0, 0, 0, 0};
        const double raw[5] = {q.a, q.b, q.c, q.d, q.e};
        for (int n = order; n <= 4; ++n) {
            double factor = 1.0;
            for (int k = 0; k < order; ++k) {
                factor *= static_cast<double>(n - k);
            }
            p[n - order] = raw[n] * factor;
        }
        const int deg = 4 - order;
        // Integrate the squared polynomial exactly.
        for (int u = 0; u <= deg; ++u) {
            for (int v = 0; v <= deg; ++v) {
                const int pw = u + v + 1;
                total += p[u] * p[v] * std::pow(h, pw) / static_cast<double>(pw);
            }
        }
    }
    return total;
}

std::vector<std::string> continuity_report(const PiecewiseQuartic& f, double tau_cont) {
    std::vector<std::string> report;
    const std::int64_t M = f.interval_count();
    const double h = f.coarse_grid.meshsize();
    for (int order = 0; order <= 3; ++order) {
        double scale = 1.0;
        for (std::int64_t i = 0; i < M; ++i) {
            scale = std::max(scale,
                             std::abs(knot_value(f.coefficients[static_cast<std::size_t>(i)],
                                                 0.0, order)));
        }
        for (std::int64_t i = 0; i + 1 < M; ++i) {
            const double left =
                knot_value(f.coefficients[static_cast<std::size_t>(i)], h, order);
            const double right =
                knot_value(f.coefficients[static_cast<std::size_t>(i + 1)], 0.0, order);
            if (!(std::abs(left - right) <= tau_cont * scale)) {
                report.push_back("derivative order " + std::to_string(order) +
                                 " jumps at knot " + std::to_string(i + 1) + " by " +
                                 std::to_string(left - right));
            }
        }
        if (order == 2) {
            const double at0 = knot_value(f.coefficients.front(), 0.0, 2);
            const double at1 = knot_value(f.coefficients.back(), h, 2);
            if (!(std::abs(at0) <= tau_cont * scale)) {
                report.push_back("f''(0) = " + std::to_string(at0) + " violates the natural condition");
            }
            if (!(std::abs(at1) <= tau_cont * scale)) {
                report.push_back("f''(1) = " + std::to_string(at1) + " violates the natural condition");
            }
        }
    }
    return report;
}

std::vector<std::string> euler_lagrange_report(const PiecewiseQuartic& f,
                                               const GroupedObservations& grouped,
                                               double tau_el) {
    std::vector<std::string> report;
    if (grouped.group_count() != f.interval_count()) {
        throw GridMismatchError("grouped observations do not match the fit's coarse grid");
    }
    const double alpha = f.alpha_used;
    for (std::int64_t i = 0; i < f.interval_count(); ++i) {
        const double lhs = 24.0 * f.coefficients[static_cast<std::size_t>(i)].e;
        const double rhs =
            (grouped.group_means[static_cast<std::size_t>(i)] - interval_mean(f, i)) / alpha;
        const double tol = tau_el * std::max({1.0, std::abs(lhs), std::abs(rhs)});
        if (!(std::abs(lhs - rhs) <= tol)) {
            report.push_back("stationarity violated on interval " + std::to_string(i) +
                             ": 24 e = " + std::to_string(lhs) + " vs " + std::to_string(rhs));
        }
    }
    return report;
}

}  // namespace groupdiff
