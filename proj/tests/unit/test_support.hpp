#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include <boost/math/special_functions/ellint_2.hpp>

#include "curveflow/curve_geometry.hpp"
#include "curveflow/speed_functions.hpp"

namespace curveflow::testing {

inline constexpr double kPi = std::numbers::pi;

inline std::vector<double> sample(std::size_t n, const std::function<double(double)>& fn) {
  const AngleGrid grid(n);
  std::vector<double> v(n);
  for (std::size_t j = 0; j < n; ++j) v[j] = fn(grid.theta(j));
  return v;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
  return m;
}

inline double max_abs(const std::vector<double>& a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

inline std::vector<double> ellipse_support(std::size_t n, double a, double b) {
  return sample(n, [=](double t) { return std::sqrt(a * a * std::cos(t) * std::cos(t) + b * b * std::sin(t) * std::sin(t)); });
}

/// Perimeter of an ellipse from the complete elliptic integral of the second kind.
inline double ellipse_perimeter_exact(double a, double b) {
  const double k = std::sqrt(1.0 - (b * b) / (a * a));
  return 4.0 * a * boost::math::ellint_2(k);
}

/// Random smooth convex support function a0 + sum_{k=2}^{kmax} eps_k cos(k t + phi_k)
/// with sum eps_k (k^2 - 1) = budget * a0.
inline std::vector<double> random_convex_support(std::mt19937_64& rng, std::size_t n, int kmax = 6,
                                                 double budget = 0.7) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double a0 = 0.5 + 2.0 * unit(rng);
  std::vector<double> eps, phase;
  double weight = 0.0;
  for (int k = 2; k <= kmax; ++k) {
    eps.push_back(unit(rng));
    phase.push_back(2.0 * kPi * unit(rng));
    weight += eps.back() * (k * k - 1.0);
  }
  for (double& e : eps) e *= budget * a0 / weight;
  return sample(n, [&](double t) {
    double p = a0;
    for (int k = 2; k <= kmax; ++k) p += eps[k - 2] * std::cos(k * t + phase[k - 2]);
    return p;
  });
}

inline SpeedFunction power(double alpha) { return make_builtin(BuiltinSpeed::Power, std::vector<double>{alpha}); }

inline std::vector<SpeedFunction> all_builtins() {
  return {power(1.0), make_builtin(BuiltinSpeed::Log1p), make_builtin(BuiltinSpeed::Exp),
          make_builtin(BuiltinSpeed::LinearPlusSine), make_builtin(BuiltinSpeed::SqLogPlusLinear), power(0.5)};
}

}  // namespace curveflow::testing
