#pragma once

#include <string>
#include <vector>

namespace harness {

// Test function with exact derivatives of every order.  Either a polynomial
// in ascending-power coefficients or a scaled sin(pi x); derivatives are
// computed symbolically so error norms carry no oracle noise.
class FunctionSpec {
  public:
    static FunctionSpec builtin(const std::string& id);
    static FunctionSpec polynomial(std::vector<double> ascending_coefficients);

    double operator()(double x, int order = 0) const;

    const std::string& id() const { return id_; }

    // L2(0,1) norm of the order-th derivative, exact for polynomials and sine.
    double derivative_l2_norm(int order) const;

  private:
    FunctionSpec() = default;

    std::string id_;
    std::vector<double> poly_;
    bool is_sine_ = false;
    double sine_amplitude_ = 0.0;
};

}  // namespace harness
