#pragma once

#include <cstddef>

#include "curveflow/speed_functions.hpp"

namespace curveflow::oracles {

struct RateReference {
  double kappa_bar = 0.0;          // 2pi/L
  double theory_lower_rate = 0.0;  // F'(kappa_bar) kappa_bar^2
  double linearized_rate = 0.0;    // 3 F'(kappa_bar) kappa_bar^2
};

/// Decay rates of small perturbations of the circle of length L. A mode
/// exp(ik theta) of the speed decays like exp(-F'(kb) kb^2 (k^2 - 1) t);
/// k = 2 is the slowest surviving mode.
RateReference linearized_rate(const SpeedFunction& f, double L);

/// Result of a quadrature at n points with its half-resolution companion.
struct Quadrature {
  double value = 0.0;
  double coarse = 0.0;  // same rule at n/2 points
  std::size_t n = 0;

  double richardson_gap() const;
};

/// (1/2pi) integral F(1/(1 - c cos 2theta)) dtheta, directly on the closed-form
/// curvature (no support function, no spectral calculus). Requires |c| < 1.
Quadrature lambda_cos2(const SpeedFunction& f, double c, std::size_t n);

/// Perimeter of the ellipse (a cos t, b sin t) by the trapezoid rule on the
/// parametric speed.
Quadrature ellipse_perimeter(double a, double b, std::size_t n);

/// Enclosed area of the same ellipse from 1/2 integral (x y' - y x') dt.
Quadrature ellipse_area(double a, double b, std::size_t n);

}  // namespace curveflow::oracles
