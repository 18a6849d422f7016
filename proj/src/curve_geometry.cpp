#include "curveflow/curve_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "curveflow/errors.hpp"
#include "curveflow/spectral.hpp"

namespace curveflow {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

CurveState make_curve_state(std::span<const double> p, double t) {
  AngleGrid grid(p.size());
  const auto [lo, hi] = std::minmax_element(p.begin(), p.end());
  if (!(*lo > 0.0)) {
    std::ostringstream msg;
    msg << "support function must be positive (origin inside the curve), min p = " << *lo;
    throw NotConvex(msg.str());
  }
  const auto rho = curvature_radius(p);
  const double rho_min = *std::min_element(rho.begin(), rho.end());
  if (!(rho_min > 0.0)) {
    std::ostringstream msg;
    msg << "curve is not convex, min(p + p_thth) = " << rho_min;
    throw NotConvex(msg.str());
  }
  if (first_harmonic_magnitude(p) > kSteinerTolerance * *hi) {
    throw InvalidGeometry("support function is not Steiner-normalized (first harmonics present)");
  }
  return CurveState{grid, std::vector<double>(p.begin(), p.end()), t};
}

std::vector<double> curvature_radius(std::span<const double> p) {
  auto rho = spectral_derivative(p, 2);
  for (std::size_t j = 0; j < rho.size(); ++j) rho[j] += p[j];
  return rho;
}

std::vector<double> curvature_from_support(std::span<const double> p) {
  auto rho = curvature_radius(p);
  const double rho_min = *std::min_element(rho.begin(), rho.end());
  if (!(rho_min > 0.0)) {
    std::ostringstream msg;
    msg << "convexity lost: min(p + p_thth) = " << rho_min;
    throw ConvexityLost(msg.str());
  }
  for (double& r : rho) r = 1.0 / r;
  return rho;
}

std::vector<double> curvature_from_support(const CurveState& state) {
  return curvature_from_support(std::span<const double>(state.p));
}

std::complex<double> closing_defect(std::span<const double> kappa) {
  const double h = 2.0 * kPi / static_cast<double>(kappa.size());
  std::complex<double> sum = 0.0;
  for (std::size_t j = 0; j < kappa.size(); ++j) {
    const double theta = h * static_cast<double>(j);
    sum += std::polar(1.0 / kappa[j], theta);
  }
  return h * sum;
}

std::vector<double> support_from_curvature(std::span<const double> kappa, const AngleGrid& grid,
                                           double relative_tolerance) {
  if (kappa.size() != grid.size()) throw InvalidParams("curvature samples do not match the grid");
  std::vector<double> rho(kappa.size());
  for (std::size_t j = 0; j < kappa.size(); ++j) {
    if (!(kappa[j] > 0.0)) throw ConvexityLost("curvature must be positive to recover a support function");
    rho[j] = 1.0 / kappa[j];
  }
  const double defect = std::abs(closing_defect(kappa));
  const double scale = periodic_integral(rho);
  if (defect > relative_tolerance * scale) {
    std::ostringstream msg;
    msg << "closing condition violated: |integral exp(i theta)/kappa| = " << defect;
    throw ClosingConditionViolated(msg.str());
  }
  const auto& ops = SpectralOps::for_size(grid.size());
  auto c = ops.forward(rho);
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (k == 1) {
      c[k] = 0.0;
      continue;
    }
    const double wave = static_cast<double>(k);
    c[k] /= 1.0 - wave * wave;
  }
  return ops.inverse(c);
}

double length(const CurveState& state) { return periodic_integral(state.p); }

double area(const CurveState& state) {
  const auto dp = spectral_derivative(state.p, 1);
  std::vector<double> integrand(state.p.size());
  for (std::size_t j = 0; j < integrand.size(); ++j) {
    integrand[j] = state.p[j] * state.p[j] - dp[j] * dp[j];
  }
  return 0.5 * periodic_integral(integrand);
}

std::pair<double, double> bonnesen_bounds(double length, double area) {
  double disc = length * length - 4.0 * kPi * area;
  if (disc < 0.0) {
    if (disc < -1e-12 * length * length) {
      std::ostringstream msg;
      msg << "isoperimetric inequality violated: L^2 - 4 pi A = " << disc;
      throw InvalidGeometry(msg.str());
    }
    disc = 0.0;
  }
  const double s = std::sqrt(disc);
  return {(length - s) / (2.0 * kPi), (length + s) / (2.0 * kPi)};
}

GeometricSummary summarize(const CurveState& state) {
  GeometricSummary g;
  g.length = length(state);
  g.area = area(state);
  g.isoperimetric_ratio = g.length * g.length / (4.0 * kPi * g.area);
  std::tie(g.inradius_lower, g.outradius_upper) = bonnesen_bounds(g.length, g.area);
  const auto kappa = curvature_from_support(state);
  const auto [lo, hi] = std::minmax_element(kappa.begin(), kappa.end());
  g.kappa_min = *lo;
  g.kappa_max = *hi;
  return g;
}

std::vector<double> steiner_normalize(std::span<const double> p) {
  const auto& ops = SpectralOps::for_size(p.size());
  auto c = ops.forward(p);
  c[1] = 0.0;
  return ops.inverse(c);
}

double first_harmonic_magnitude(std::span<const double> p) {
  const auto c = SpectralOps::for_size(p.size()).forward(p);
  // Real amplitude of the cos/sin pair is 2|c_1|.
  return 2.0 * std::abs(c[1]);
}

std::vector<Point2> reconstruct_curve(const CurveState& state) {
  const auto dp = spectral_derivative(state.p, 1);
  std::vector<Point2> pts(state.p.size());
  for (std::size_t j = 0; j < pts.size(); ++j) {
    const double th = state.grid.theta(j);
    const double c = std::cos(th), s = std::sin(th);
    pts[j] = {state.p[j] * c - dp[j] * s, state.p[j] * s + dp[j] * c};
  }
  return pts;
}

}  // namespace curveflow
