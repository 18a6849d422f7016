#pragma once

#include <array>
#include <complex>
#include <span>
#include <utility>
#include <vector>

#include "curveflow/grid.hpp"

namespace curveflow {

/// A convex curve described by its support function sampled on the tangent
/// angle grid, together with the simulation time it belongs to.
///
/// Construct through make_curve_state() to get the invariants checked
/// (p > 0, p + p_thth > 0, vanishing first harmonics); the plain aggregate is
/// also used for intermediate RK stages where those checks are deferred.
struct CurveState {
  AngleGrid grid{8};
  std::vector<double> p;
  double t = 0.0;
};

struct GeometricSummary {
  double length = 0.0;
  double area = 0.0;
  double isoperimetric_ratio = 0.0;
  double inradius_lower = 0.0;
  double outradius_upper = 0.0;
  double kappa_min = 0.0;
  double kappa_max = 0.0;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Relative tolerance for the first-harmonic content of a normalized state.
inline constexpr double kSteinerTolerance = 1e-10;

/// Validates and wraps support samples. Throws InvalidGrid, NotConvex
/// (p <= 0 somewhere or p + p_thth <= 0) or InvalidGeometry (non-normalized).
CurveState make_curve_state(std::span<const double> p, double t = 0.0);

/// kappa_j = 1/(p + p_thth)_j. Throws ConvexityLost when min(p + p_thth) <= 0.
std::vector<double> curvature_from_support(const CurveState& state);
std::vector<double> curvature_from_support(std::span<const double> p);

/// Radius of curvature rho = p + p_thth without the sign check.
std::vector<double> curvature_radius(std::span<const double> p);

/// Default closing tolerance used by support_from_curvature, relative to
/// the length integral of 1/kappa.
inline constexpr double kClosingTolerance = 1e-8;

/// Solves p_thth + p = 1/kappa spectrally with the k = 1 modes of p set to
/// zero. Throws ClosingConditionViolated when |closing_defect| exceeds
/// relative_tolerance * integral(1/kappa).
std::vector<double> support_from_curvature(std::span<const double> kappa,
                                           const AngleGrid& grid,
                                           double relative_tolerance = kClosingTolerance);

/// Trapezoid approximation of integral_0^{2pi} exp(i theta) / kappa dtheta.
std::complex<double> closing_defect(std::span<const double> kappa);

double length(const CurveState& state);
double area(const CurveState& state);

/// Bonnesen radii ((L - s)/2pi, (L + s)/2pi), s = sqrt(L^2 - 4piA).
/// Discriminants down to -1e-12 L^2 are clamped to zero; below that the
/// input is rejected with InvalidGeometry.
std::pair<double, double> bonnesen_bounds(double length, double area);

GeometricSummary summarize(const CurveState& state);

/// Removes the k = 1 Fourier modes (a translation of the curve).
std::vector<double> steiner_normalize(std::span<const double> p);

/// Magnitude of the k = 1 Fourier coefficient of p.
double first_harmonic_magnitude(std::span<const double> p);

/// Boundary points X(theta_j) = p n(theta_j) + p_th t(theta_j), ordered by
/// increasing theta (counter-clockwise).
std::vector<Point2> reconstruct_curve(const CurveState& state);

}  // namespace curveflow
