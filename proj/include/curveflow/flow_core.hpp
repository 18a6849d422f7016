#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "curveflow/analysis.hpp"
#include "curveflow/curve_geometry.hpp"
#include "curveflow/speed_functions.hpp"

namespace curveflow {

enum class Formulation { Support, Curvature };

struct FlowConfig {
  std::size_t n = 128;
  Formulation formulation = Formulation::Support;
  double cfl_safety = 0.2;
  double t_max = 50.0;
  double convergence_tol = 1e-8;  // on sup |kappa - 2pi/L(0)|
  std::size_t record_every = 1;
  std::size_t snapshot_every = 0;  // 0 disables snapshots
  std::size_t max_steps = 0;       // 0 means unlimited
  double delta = 0.0;              // phi offset, 0 selects the default
  double Delta = 0.0;              // psi offset, 0 selects L(0)

  /// Throws InvalidParams.
  void validate() const;
};

struct StepResult {
  CurveState state;
  double dt_used = 0.0;
  double lambda = 0.0;
  double closing_defect = 0.0;  // |closing defect| of the evolved kappa; 0 for the support form
};

/// (1/2pi) * integral F(kappa) dtheta.
double lambda(std::span<const double> kappa, const SpeedFunction& f);

/// dp/dt = lambda - F(kappa). Throws ConvexityLost.
std::vector<double> rhs_support(const CurveState& state, const SpeedFunction& f);
std::vector<double> rhs_support(std::span<const double> p, const SpeedFunction& f);

/// dkappa/dt = kappa^2 (F' kappa_thth + F'' kappa_th^2 + F - lambda).
std::vector<double> rhs_curvature(std::span<const double> kappa, const SpeedFunction& f);

/// dF/dt = F' kappa^2 (F_thth + F - lambda) with F_thth taken spectrally.
std::vector<double> rhs_F_monitor(const CurveState& state, const SpeedFunction& f);

/// safety * h^2 / (2 max kappa^2 F'(kappa)), h = 2pi/n.
double cfl_dt(const CurveState& state, const SpeedFunction& f, double safety);
double cfl_dt(std::span<const double> kappa, const SpeedFunction& f, double safety);

/// One classical RK4 step. The support form renormalizes the Steiner point
/// afterwards; the curvature form reports the closing defect of the new kappa.
/// Throws ConvexityLost or NumericalBlowup.
StepResult step(const CurveState& state, const SpeedFunction& f, double dt,
                Formulation formulation = Formulation::Support);

/// RK4 step on the curvature samples themselves. lambda_out receives the
/// nonlocal term at the start of the step.
std::vector<double> step_curvature(std::span<const double> kappa, const SpeedFunction& f, double dt,
                                   double* lambda_out = nullptr);

enum class OutcomeStatus { Converged, TimedOut, Failed };
std::string_view outcome_name(OutcomeStatus s);

struct RunOutcome {
  OutcomeStatus status = OutcomeStatus::TimedOut;
  std::string reason;   // error kind for Failed, e.g. "ConvexityLost"
  std::string message;
};

struct RunResult {
  CurveState final_state;
  TrajectoryLog log;
  RunOutcome outcome;
  std::size_t steps = 0;
  MonitorParams monitors;
  double max_length_drift = 0.0;   // max over every step of |L - L0| / L0
  double max_closing_defect = 0.0; // curvature formulation only
  /// (integral (F - lambda)^2, integral F_theta^2) at each record.
  std::vector<std::pair<double, double>> wirtinger;
};

/// Runs the flow until sup |kappa - 2pi/L(0)| < convergence_tol (Converged),
/// t reaches t_max (TimedOut) or a step fails (Failed, with final_state the
/// last accepted state). Never throws for numerical failures; configuration
/// errors throw InvalidParams.
RunResult run(const CurveState& initial, const SpeedFunction& f, const FlowConfig& config);

}  // namespace curveflow
