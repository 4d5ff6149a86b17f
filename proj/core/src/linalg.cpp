#include "groupdiff/linalg.hpp"

#include <cmath>
#include <string>

#include "groupdiff/errors.hpp"

namespace groupdiff {

namespace {

constexpr double kPivotRatio = 1e-13;

double inf_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

double row_inf_norm(const Matrix& A) {
    double m = 0.0;
    for (std::size_t i = 0; i < A.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < A.cols(); ++j) {
            s += std::abs(A(i, j));
        }
        m = std::max(m, s);
    }
    return m;
}

std::vector<double> residual(const Matrix& A, const std::vector<double>& x,
                             const std::vector<double>& b) {
    std::vector<double> r = multiply(A, x);
    for (std::size_t i = 0; i < r.size(); ++i) {
        r[i] = b[i] - r[i];
    }
    return r;
}

// Hager-style estimate of ||inv(A)||_inf via ||inv(A')||_1, using the
// factorization for the required solves.
double inverse_inf_norm_estimate(const LuFactorization& lu) {
    const std::size_t n = lu.size();
    std::vector<double> x(n, 1.0 / static_cast<double>(n));
    double estimate = 0.0;
    for (int pass = 0; pass < 5; ++pass) {
        const std::vector<double> y = lu.solve_transpose(x);
        double norm1 = 0.0;
        std::vector<double> xi(n);
        for (std::size_t i = 0; i < n; ++i) {
            norm1 += std::abs(y[i]);
            xi[i] = (y[i] >= 0.0) ? 1.0 : -1.0;
        }
        estimate = std::max(estimate, norm1);
        const std::vector<double> z = lu.solve(xi);
        double zmax = 0.0;
        std::size_t jmax = 0;
        double ztx = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            ztx += z[i] * x[i];
            if (std::abs(z[i]) > zmax) {
                zmax = std::abs(z[i]);
                jmax = i;
            }
        }
        if (zmax <= ztx + 1e-30) {
            break;
        }
        x.assign(n, 0.0);
        x[jmax] = 1.0;
    }
    return estimate;
}

}  // namespace

Matrix Matrix::identity(std::size_t n) {
    Matrix I(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        I(i, i) = 1.0;
    }
    return I;
}

std::vector<double> multiply(const Matrix& A, const std::vector<double>& x) {
    std::vector<double> y(A.rows(), 0.0);
    for (std::size_t i = 0; i < A.rows(); ++i) {
        const double* row = A.row(i);
        double s = 0.0;
        for (std::size_t j = 0; j < A.cols(); ++j) {
            s += row[j] * x[j];
        }
        y[i] = s;
    }
    return y;
}

LuFactorization::LuFactorization(const Matrix& A) : lu_(A), perm_(A.rows()) {
    if (A.rows() != A.cols()) {
        throw DomainError("LU factorization requires a square matrix");
    }
    const std::size_t n = lu_.rows();
    std::vector<double> scale(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        perm_[i] = i;
        for (std::size_t j = 0; j < n; ++j) {
            scale[i] = std::max(scale[i], std::abs(lu_(i, j)));
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot_row = k;
        double pivot = std::abs(lu_(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(lu_(i, k)) > pivot) {
                pivot = std::abs(lu_(i, k));
                pivot_row = i;
            }
        }
        if (pivot <= kPivotRatio * scale[pivot_row]) {
            throw SingularMatrixError("pivot " + std::to_string(pivot) + " at column " +
                                      std::to_string(k) + " is below the singularity threshold");
        }
        if (pivot_row != k) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(lu_(k, j), lu_(pivot_row, j));
            }
            std::swap(scale[k], scale[pivot_row]);
            std::swap(perm_[k], perm_[pivot_row]);
        }
        const double inv = 1.0 / lu_(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double factor = lu_(i, k) * inv;
            lu_(i, k) = factor;
            if (factor != 0.0) {
                const double* src = lu_.row(k);
                double* dst = lu_.row(i);
                for (std::size_t j = k + 1; j < n; ++j) {
                    dst[j] -= factor * src[j];
                }
            }
        }
    }
}

std::vector<double> LuFactorization::solve(const std::vector<double>& b) const {
    const std::size_t n = lu_.rows();
    if (b.size() != n) {
        throw LengthMismatchError("right-hand side length does not match matrix size");
    }
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = b[perm_[i]];
    }
    for (std::size_t i = 1; i < n; ++i) {
        double s = x[i];
        const double* row = lu_.row(i);
        for (std::size_t j = 0; j < i; ++j) {
            s -= row[j] * x[j];
        }
        x[i] = s;
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double s = x[ii];
        const double* row = lu_.row(ii);
        for (std::size_t j = ii + 1; j < n; ++j) {
            s -= row[j] * x[j];
        }
        x[ii] = s / row[ii];
    }
    return x;
}

std::vector<double> LuFactorization::solve_transpose(const std::vector<double>& b) const {
    const std::size_t n = lu_.rows();
    if (b.size() != n) {
        throw LengthMismatchError("right-hand side length does not match matrix size");
    }
    // A' = (P' L U)' = U' L' P, so solve U' z = b, L' w = z, x = P' w.
    std::vector<double> z = b;
    for (std::size_t i = 0; i < n; ++i) {
        double s = z[i];
        for (std::size_t j = 0; j < i; ++j) {
            s -= lu_(j, i) * z[j];
        }
        z[i] = s / lu_(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double s = z[ii];
        for (std::size_t j = ii + 1; j < n; ++j) {
            s -= lu_(j, ii) * z[j];
        }
        z[ii] = s;
    }
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[perm_[i]] = z[i];
    }
    return x;
}

SolveReport solve(const Matrix& A, const std::vector<double>& b) {
    if (A.rows() != A.cols()) {
        throw DomainError("solve requires a square matrix");
    }
    if (b.size() != A.rows()) {
        throw LengthMismatchError("right-hand side length does not match matrix size");
    }
    const LuFactorization lu(A);
    SolveReport report;
    report.x = lu.solve(b);
    // One refinement pass tightens the residual to near round-off.
    std::vector<double> r = residual(A, report.x, b);
    const std::vector<double> dx = lu.solve(r);
    for (std::size_t i = 0; i < report.x.size(); ++i) {
        report.x[i] += dx[i];
    }
    report.residual_inf = inf_norm(residual(A, report.x, b));
    report.condition_estimate = row_inf_norm(A) * inverse_inf_norm_estimate(lu);
    return report;
}

std::vector<double> solve_second_difference(std::vector<double> rhs) {
    const std::size_t n = rhs.size();
    if (n == 0) {
        return rhs;
    }
    // Thomas algorithm for tridiag(1, -2, 1); the pivots are -(i+1)/i.
    std::vector<double> m(n);
    m[0] = -2.0;
    for (std::size_t i = 1; i < n; ++i) {
        const double factor = 1.0 / m[i - 1];
        m[i] = -2.0 - factor;
        rhs[i] -= factor * rhs[i - 1];
    }
    rhs[n - 1] /= m[n - 1];
    for (std::size_t ii = n - 1; ii-- > 0;) {
        rhs[ii] = (rhs[ii] - rhs[ii + 1]) / m[ii];
    }
    return rhs;
}

Matrix solve_second_difference(Matrix rhs) {
    const std::size_t n = rhs.rows();
    if (n == 0) {
        return rhs;
    }
    const std::size_t w = rhs.cols();
    std::vector<double> m(n);
    m[0] = -2.0;
    for (std::size_t i = 1; i < n; ++i) {
        const double factor = 1.0 / m[i - 1];
        m[i] = -2.0 - factor;
        double* cur = rhs.row(i);
        const double* prev = rhs.row(i - 1);
        for (std::size_t j = 0; j < w; ++j) {
            cur[j] -= factor * prev[j];
        }
    }
    {
        double* last = rhs.row(n - 1);
        const double inv = 1.0 / m[n - 1];
        for (std::size_t j = 0; j < w; ++j) {
            last[j] *= inv;
        }
    }
    for (std::size_t ii = n - 1; ii-- > 0;) {
        double* cur = rhs.row(ii);
        const double* next = rhs.row(ii + 1);
        const double inv = 1.0 / m[ii];
        for (std::size_t j = 0; j < w; ++j) {
            cur[j] = (cur[j] - next[j]) * inv;
        }
    }
    return rhs;
}

}  // namespace groupdiff
