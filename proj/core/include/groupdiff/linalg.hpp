#ifndef GROUPDIFF_LINALG_HPP
#define GROUPDIFF_LINALG_HPP

#include <cstddef>
#include <vector>

namespace groupdiff {

// Row-major dense matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* row(std::size_t i) { return data_.data() + i * cols_; }
    const double* row(std::size_t i) const { return data_.data() + i * cols_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

std::vector<double> multiply(const Matrix& A, const std::vector<double>& x);

// LU factorization with partial pivoting, reusable across right-hand sides.
// Elimination aborts with SingularMatrixError when the chosen pivot falls
// below 1e-13 times the infinity norm of its original row.
class LuFactorization {
public:
    explicit LuFactorization(const Matrix& A);

    std::vector<double> solve(const std::vector<double>& b) const;
    std::vector<double> solve_transpose(const std::vector<double>& b) const;

    std::size_t size() const { return lu_.rows(); }

private:
    Matrix lu_;
    std::vector<std::size_t> perm_;
};

struct SolveReport {
    std::vector<double> x;
    double residual_inf = 0.0;       // ||Ax - b||_inf after refinement
    double condition_estimate = 0.0; // Hager-style estimate of cond_inf(A)
};

// Gaussian elimination with partial pivoting plus one step of iterative
// refinement. The reported residual self-certifies the solution.
SolveReport solve(const Matrix& A, const std::vector<double>& b);

// Solves T x = rhs for the (M-1)x(M-1) tridiagonal matrix with diagonal -2
// and off-diagonals 1 (the interior second-difference matrix). rhs may have
// several columns packed as a dense matrix; the solve is column-wise.
std::vector<double> solve_second_difference(std::vector<double> rhs);
Matrix solve_second_difference(Matrix rhs);

}  // namespace groupdiff

#endif
