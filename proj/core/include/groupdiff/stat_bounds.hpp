#ifndef GROUPDIFF_STAT_BOUNDS_HPP
#define GROUPDIFF_STAT_BOUNDS_HPP

#include <cstdint>

#include "groupdiff/types.hpp"

namespace groupdiff {

// z_bar(M, p): unique root in (1, inf) of x e^(1-x) = p^(2/M), for
// p in (0, 0.37). The scaled mean-square group perturbation
// (M N / sigma^2) Delta_M^2 is chi-square with M degrees of freedom, and
// P(Delta_M^2 <= z_bar sigma^2 / N) >= 1 - p. Decreasing in M with limit 1.
double chi_upper_quantile_bound(std::int64_t M, double p);

struct CoverageReport {
    std::int64_t M = 0;
    std::int64_t N = 0;
    double sigma2 = 0.0;
    double p = 0.0;
    double z_bar = 0.0;
    std::int64_t trials = 0;
    double coverage = 0.0;
    std::uint64_t seed = 0;
};

// Monte-Carlo estimate of P(Delta_M^2 <= z_bar sigma^2 / N) over the given
// number of simulated draws of the M group-mean perturbations.
CoverageReport coverage_probability(std::int64_t M, std::int64_t N, double sigma2, double p,
                                    std::int64_t trials, std::uint64_t seed);

// Bound on ||e''|| where e = f* - y, alpha = c_bar sigma^2 / N:
//   sqrt(2 z_bar / c_bar + 2 Q^2 h_M^2 / (c_bar N sigma^2)) + 2 ||y''||.
double bound_ek(const BoundInputs& inputs, double c_bar, double h_M);

// Bound on ||e|| given a bound e1_norm on ||e'||:
//   h ||e'|| + sqrt((8 z_bar sigma^2 + 2 c_bar sigma^2 ||y''||^2) / N
//                   + 8 Q^2 h_M^2 / N^2),
// h being the fine meshsize 1/(M N). Accepts sigma2 = 0.
double bound_e(const BoundInputs& inputs, double c_bar, double h_M, double h, double e1_norm);

// Interpolation-rate form for derivative order j in 0..k (k = 2):
//   C1 h_M^(k-j) + C2 (sigma^2 / N)^((k-j)/(2k)).
double bound_rate(const BoundInputs& inputs, int j, double h_M);

}  // namespace groupdiff

#endif
