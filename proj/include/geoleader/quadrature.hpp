#pragma once

#include <functional>

namespace geoleader {

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;
  int intervals = 0;
};

/// Globally adaptive 15-point Gauss-Kronrod quadrature on [a, b].
/// Throws CertificationError if `abs_tol` is not reached within `max_intervals`
/// subdivisions.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double abs_tol = 1e-12, int max_intervals = 4000);

}  // namespace geoleader
