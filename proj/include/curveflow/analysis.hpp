#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "curveflow/curve_geometry.hpp"
#include "curveflow/speed_functions.hpp"

namespace curveflow {

/// Snapshot of every monitored quantity at one time.
struct DiagnosticsRecord {
  double t = 0.0;
  double L = 0.0;
  double A = 0.0;
  double I = 0.0;
  double lambda = 0.0;
  double kappa_min = 0.0;
  double kappa_max = 0.0;
  double speed_sup = 0.0;           // sup |F - lambda|
  double grad_energy = 0.0;         // integral (dF/dtheta)^2
  double kappa_deviation = 0.0;     // sup |kappa - 2pi/L(0)|
  double closing_defect_mod = 0.0;
  double bonnesen_slack = 0.0;      // min over the two Bonnesen radii of rL - A - pi r^2
  double andrews_slack = 0.0;       // dA/dt
  double phi_max = 0.0;
  double psi_min = 0.0;
  double barrier_f = 0.0;

  friend bool operator==(const DiagnosticsRecord&, const DiagnosticsRecord&) = default;
};

struct Snapshot {
  double t = 0.0;
  std::vector<double> p;
};

struct TrajectoryLog {
  std::vector<DiagnosticsRecord> records;
  std::vector<Snapshot> snapshots;
};

/// Parameters of the monitors that are not functions of the current state.
struct MonitorParams {
  double delta = 0.0;       // offset of phi = F/(p - delta), 0 < delta < min p
  double Delta = 0.0;       // offset of psi = F/(Delta - p), Delta >= 2 max p
  double kappa0_min = 0.0;  // min curvature of the initial curve
  double F_of_M = 0.0;      // F at the running curvature maximum
  double L0 = 0.0;          // initial length; the limit curvature is 2pi/L0
};

/// Evaluates every monitored quantity. Throws InvalidMonitorParams when
/// delta or Delta violate their bounds for this state.
DiagnosticsRecord diagnostics(const CurveState& state, const SpeedFunction& f, const MonitorParams& params);

/// Same, with the curvature supplied by the caller (the curvature formulation
/// evolves kappa directly and p is derived from it).
DiagnosticsRecord diagnostics(const CurveState& state, std::span<const double> kappa,
                              const SpeedFunction& f, const MonitorParams& params);

/// Lower barrier for the minimum curvature:
/// f(t) = (kappa0_min/2) / (F(M) kappa0_min t / 2 + 1).
double barrier_f(double t, double kappa0_min, double F_of_M);

struct ProtectionConstants {
  double r0 = 0.0;  // radius guaranteed inside the curve for all time
  double T1 = 0.0;  // time a circle of radius r0 needs to shrink to r0/2 under F, bounded below
};

/// r0 = (L/2pi)(sqrt(I0) + sqrt(I0 - 1))^-2, T1 = r0 / (2 F(2/r0)).
ProtectionConstants protection_constants(double L, double I0, const SpeedFunction& f);

/// max_j F(kappa_j) / (p_j - delta).
double monitor_phi(const CurveState& state, const SpeedFunction& f, double delta);
double monitor_phi(const CurveState& state, std::span<const double> kappa, const SpeedFunction& f, double delta);

/// min_j F(kappa_j) / (Delta - p_j).
double monitor_psi(const CurveState& state, const SpeedFunction& f, double Delta);
double monitor_psi(const CurveState& state, std::span<const double> kappa, const SpeedFunction& f, double Delta);

/// Stand-in for the existential constant U0 bounding the phi ceiling: the
/// first u on a geometric ladder over [1e-6, 1e6] where F'u^2/F exceeds
/// 2/delta. Empty when the ladder never gets there.
std::optional<double> u0_proxy(const SpeedFunction& f, double delta);

/// max{phi_max(0), F(max{2/delta, u0}) / delta}.
double phi_ceiling(double phi0, double delta, double u0, const SpeedFunction& f);

/// Monitor offsets used by a run: delta = min(min p / 4, r0 / 4), Delta = L.
MonitorParams default_monitor_params(const CurveState& initial, const SpeedFunction& f);

/// (integral (F - lambda)^2, integral F_theta^2) for the current state.
std::pair<double, double> wirtinger_gap(const CurveState& state, const SpeedFunction& f);

/// The same pair for an arbitrary sampled speed field.
std::pair<double, double> wirtinger_gap(std::span<const double> speed_field);

/// integral over one period of (dF/dtheta)^2.
double grad_energy(std::span<const double> speed_field);

struct DecayFit {
  double t0 = 0.0;
  double t1 = 0.0;
  double fitted_rate = 0.0;       // -d/dt ln(grad_energy)
  double amplitude_rate = 0.0;    // -d/dt ln ||F_theta||, half of fitted_rate
  double r_squared = 0.0;
  double theory_lower_rate = 0.0; // F'(2pi/L)(2pi/L)^2
  double linearized_rate = 0.0;   // 3 F'(2pi/L)(2pi/L)^2, decay of the k = 2 mode
  std::size_t records_used = 0;
};

/// Least-squares fit of ln(grad_energy) against t over the final
/// tail_fraction of the records whose energy has dropped below 1e-2 of its
/// initial value. Throws InsufficientData below 10 usable records.
DecayFit fit_decay_rate(const TrajectoryLog& log, const SpeedFunction& f, double tail_fraction = 0.3);

}  // namespace curveflow
