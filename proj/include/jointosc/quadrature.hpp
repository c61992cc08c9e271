#pragma once

#include <complex>
#include <functional>

namespace jointosc {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int evaluations = 0;
};

/// Adaptive Gauss-Kronrod (7/15) on [a, b]. Integrable endpoint singularities
/// are handled by bisection; the integrand is never evaluated at a or b.
QuadratureResult integrate(const std::function<double(double)>& g, double a, double b, double abs_tol = 1e-13,
                           double rel_tol = 1e-12, int max_depth = 60);

std::complex<double> integrate_complex(const std::function<std::complex<double>(double)>& g, double a, double b,
                                       double abs_tol = 1e-13, double rel_tol = 1e-12);

}  // namespace jointosc
