#pragma once

#include <functional>
#include <vector>

namespace adacomp {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};

/// Adaptive Gauss-Kronrod integration of f over [a, b], split at every
/// breakpoint inside the interval. Throws NumericError when the error
/// estimate exceeds abs_tol or the integrand is not finite.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const std::vector<double>& breakpoints = {}, double abs_tol = 1e-8);

}  // namespace adacomp
