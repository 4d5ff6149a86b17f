#ifndef GROUPDIFF_QUADRATURE_HPP
#define GROUPDIFF_QUADRATURE_HPP

#include <functional>

namespace groupdiff {

struct QuadratureOptions {
    int initial_subintervals = 64;  // per call, must be even
    double abs_tol = 1e-10;
    double rel_tol = 0.0;
    int max_doublings = 22;
};

// Composite Simpson with n subintervals (n even).
double simpson(const std::function<double(double)>& f, double a, double b, int n);

// Composite Simpson, doubling the subdivision until two successive
// estimates differ by less than abs_tol + rel_tol*|estimate|. Throws
// QuadratureError if the refinement budget is exhausted.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& options = {});

}  // namespace groupdiff

#endif
