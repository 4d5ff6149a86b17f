#include "harness/functions.hpp"

#include <cmath>
#include <numbers>

#include "groupdiff/errors.hpp"
#include "groupdiff/quadrature.hpp"

namespace harness {

FunctionSpec FunctionSpec::builtin(const std::string& id) {
    FunctionSpec f;
    f.id_ = id;
    if (id == "cubic") {
        f.poly_ = {1.0, -0.5, 2.0, 1.0};
    } else if (id == "bump") {
        // 1 + 10 x^2 (1-x)^2 expanded in ascending powers.
        f.poly_ = {1.0, 0.0, 10.0, -20.0, 10.0};
    } else if (id == "sine") {
        f.is_sine_ = true;
        f.sine_amplitude_ = 0.1;
    } else {
        throw groupdiff::ConfigError("unknown function_id '" + id + "'");
    }
    return f;
}

FunctionSpec FunctionSpec::polynomial(std::vector<double> ascending_coefficients) {
    if (ascending_coefficients.empty()) {
        throw groupdiff::ConfigError("custom polynomial needs at least one coefficient");
    }
    FunctionSpec f;
    f.id_ = "custom";
    f.poly_ = std::move(ascending_coefficients);
    return f;
}

double FunctionSpec::operator()(double x, int order) const {
    if (order < 0) {
        throw groupdiff::OrderError("derivative order must be nonnegative");
    }
    if (is_sine_) {
        const double pi = std::numbers::pi;
        // d^n/dx^n sin(pi x) = pi^n sin(pi x + n pi / 2)
        return sine_amplitude_ * std::pow(pi, order) * std::sin(pi * x + order * pi / 2.0);
    }
    const auto n = static_cast<int>(poly_.size());
    if (order >= n) {
        return 0.0;
    }
    // Horner on the order-times differentiated coefficients.
    double value = 0.0;
    for (int i = n - 1; i >= order; --i) {
        double c = poly_[static_cast<std::size_t>(i)];
        for (int k = 0; k < order; ++k) {
            c *= static_cast<double>(i - k);
        }
        value = value * x + c;
    }
    return value;
}

double FunctionSpec::derivative_l2_norm(int order) const {
    if (is_sine_) {
        // integral of sin^2 or cos^2 over a half period is 1/2.
        const double pi = std::numbers::pi;
        return sine_amplitude_ * std::pow(pi, order) * std::sqrt(0.5);
    }
    const auto square = [this, order](double x) {
        const double v = (*this)(x, order);
        return v * v;
    };
    groupdiff::QuadratureOptions options;
    options.abs_tol = 1e-14;
    options.rel_tol = 1e-14;
    return std::sqrt(groupdiff::integrate(square, 0.0, 1.0, options));
}

}  // namespace harness
