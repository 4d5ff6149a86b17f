#include "groupdiff/quadrature.hpp"

#include <cmath>

#include "groupdiff/errors.hpp"

namespace groupdiff {

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    if (n < 2 || (n % 2) != 0) {
        throw QuadratureError("simpson requires an even subinterval count >= 2");
    }
    const double h = (b - a) / n;
    double odd = 0.0;
    double even = 0.0;
    for (int i = 1; i < n; i += 2) {
        odd += f(a + i * h);
    }
    for (int i = 2; i < n; i += 2) {
        even += f(a + i * h);
    }
    return (h / 3.0) * (f(a) + f(b) + 4.0 * odd + 2.0 * even);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& options) {
    int n = options.initial_subintervals;
    if (n < 2) {
        n = 2;
    }
    if (n % 2) {
        ++n;
    }
    double previous = simpson(f, a, b, n);
    for (int pass = 0; pass < options.max_doublings; ++pass) {
        n *= 2;
        const double current = simpson(f, a, b, n);
        const double tol = options.abs_tol + options.rel_tol * std::abs(current);
        if (std::abs(current - previous) < tol) {
            return current;
        }
        previous = current;
    }
    throw QuadratureError("quadrature refinement did not converge");
}

}  // namespace groupdiff
