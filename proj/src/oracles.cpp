#include "curveflow/oracles.hpp"

#include <cmath>
#include <numbers>

#include "curveflow/errors.hpp"

namespace curveflow::oracles {

namespace {

constexpr double kPi = std::numbers::pi;

template <class Fn>
double trapezoid(Fn&& fn, std::size_t n) {
  const double h = 2.0 * kPi / static_cast<double>(n);
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) sum += fn(h * static_cast<double>(j));
  return h * sum;
}

template <class Fn>
Quadrature paired(Fn&& fn, std::size_t n) {
  if (n < 4 || n % 2 != 0) throw InvalidParams("quadrature needs an even n >= 4");
  return {trapezoid(fn, n), trapezoid(fn, n / 2), n};
}

}  // namespace

double Quadrature::richardson_gap() const { return std::abs(value - coarse); }

RateReference linearized_rate(const SpeedFunction& f, double L) {
  if (!(L > 0.0)) throw InvalidParams("length must be positive");
  RateReference r;
  r.kappa_bar = 2.0 * kPi / L;
  r.theory_lower_rate = f(r.kappa_bar).df * r.kappa_bar * r.kappa_bar;
  r.linearized_rate = 3.0 * r.theory_lower_rate;
  return r;
}

Quadrature lambda_cos2(const SpeedFunction& f, double c, std::size_t n) {
  if (!(std::abs(c) < 1.0)) throw InvalidParams("lambda oracle needs |c| < 1");
  auto q = paired([&](double th) { return f.value(1.0 / (1.0 - c * std::cos(2.0 * th))); }, n);
  q.value /= 2.0 * kPi;
  q.coarse /= 2.0 * kPi;
  return q;
}

Quadrature ellipse_perimeter(double a, double b, std::size_t n) {
  if (!(a > 0.0 && b > 0.0)) throw InvalidParams("ellipse semi-axes must be positive");
  return paired([&](double t) { return std::hypot(a * std::sin(t), b * std::cos(t)); }, n);
}

Quadrature ellipse_area(double a, double b, std::size_t n) {
  if (!(a > 0.0 && b > 0.0)) throw InvalidParams("ellipse semi-axes must be positive");
  return paired(
      [&](double t) {
        const double x = a * std::cos(t), y = b * std::sin(t);
        const double dx = -a * std::sin(t), dy = b * std::cos(t);
        return 0.5 * (x * dy - y * dx);
      },
      n);
}

}  // namespace curveflow::oracles
