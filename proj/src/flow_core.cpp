#include "curveflow/flow_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "curveflow/errors.hpp"
#include "curveflow/spectral.hpp"

namespace curveflow {

namespace {

constexpr double kPi = std::numbers::pi;

void require_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw NumericalBlowup(std::string("non-finite value in ") + what);
  }
}

// y + a * k
std::vector<double> axpy(std::span<const double> y, double a, std::span<const double> k) {
  std::vector<double> out(y.size());
  for (std::size_t j = 0; j < y.size(); ++j) out[j] = y[j] + a * k[j];
  return out;
}

template <class Rhs>
std::vector<double> rk4(std::span<const double> y, double dt, Rhs&& rhs) {
  const auto k1 = rhs(y);
  require_finite(k1, "RK stage 1");
  const auto y2 = axpy(y, 0.5 * dt, k1);
  const auto k2 = rhs(std::span<const double>(y2));
  require_finite(k2, "RK stage 2");
  const auto y3 = axpy(y, 0.5 * dt, k2);
  const auto k3 = rhs(std::span<const double>(y3));
  require_finite(k3, "RK stage 3");
  const auto y4 = axpy(y, dt, k3);
  const auto k4 = rhs(std::span<const double>(y4));
  require_finite(k4, "RK stage 4");
  std::vector<double> out(y.size());
  for (std::size_t j = 0; j < y.size(); ++j) {
    out[j] = y[j] + dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
  }
  require_finite(out, "RK update");
  return out;
}

double max_diffusion(std::span<const double> kappa, const SpeedFunction& f) {
  double d = 0.0;
  for (double k : kappa) d = std::max(d, k * k * f(k).df);
  return d;
}

double sup_deviation(std::span<const double> kappa, double target) {
  double d = 0.0;
  for (double k : kappa) d = std::max(d, std::abs(k - target));
  if (std::any_of(kappa.begin(), kappa.end(), [](double k) { return !std::isfinite(k); })) return INFINITY;
  return d;
}

}  // namespace

void FlowConfig::validate() const {
  if (n < 8 || n % 2 != 0) throw InvalidParams("flow.n must be even and >= 8");
  if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) throw InvalidParams("flow.cfl_safety must lie in (0, 1]");
  if (!(t_max > 0.0)) throw InvalidParams("flow.t_max must be positive");
  if (!(convergence_tol > 0.0)) throw InvalidParams("flow.convergence_tol must be positive");
  if (record_every == 0) throw InvalidParams("flow.record_every must be at least 1");
  if (delta < 0.0 || Delta < 0.0) throw InvalidParams("monitor offsets must be nonnegative");
}

double lambda(std::span<const double> kappa, const SpeedFunction& f) {
  std::vector<double> speed(kappa.size());
  for (std::size_t j = 0; j < kappa.size(); ++j) speed[j] = f.value(kappa[j]);
  return periodic_integral(speed) / (2.0 * kPi);
}

std::vector<double> rhs_support(std::span<const double> p, const SpeedFunction& f) {
  const auto kappa = curvature_from_support(p);
  std::vector<double> out(kappa.size());
  for (std::size_t j = 0; j < kappa.size(); ++j) out[j] = f.value(kappa[j]);
  const double lam = periodic_integral(out) / (2.0 * kPi);
  for (double& v : out) v = lam - v;
  return out;
}

std::vector<double> rhs_support(const CurveState& state, const SpeedFunction& f) {
  return rhs_support(std::span<const double>(state.p), f);
}

std::vector<double> rhs_curvature(std::span<const double> kappa, const SpeedFunction& f) {
  const auto& ops = SpectralOps::for_size(kappa.size());
  const auto k_th = ops.derivative(kappa, 1);
  const auto k_thth = ops.derivative(kappa, 2);
  const double lam = lambda(kappa, f);
  std::vector<double> out(kappa.size());
  for (std::size_t j = 0; j < kappa.size(); ++j) {
    const auto v = f(kappa[j]);
    const double k = kappa[j];
    out[j] = k * k * (v.df * k_thth[j] + v.d2f * k_th[j] * k_th[j] + v.f - lam);
  }
  return out;
}

std::vector<double> rhs_F_monitor(const CurveState& state, const SpeedFunction& f) {
  const auto kappa = curvature_from_support(state);
  std::vector<double> speed(kappa.size());
  for (std::size_t j = 0; j < kappa.size(); ++j) speed[j] = f.value(kappa[j]);
  const double lam = periodic_integral(speed) / (2.0 * kPi);
  const auto speed_thth = spectral_derivative(speed, 2);
  std::vector<double> out(kappa.size());
  for (std::size_t j = 0; j < kappa.size(); ++j) {
    const double k = kappa[j];
    out[j] = f(k).df * k * k * (speed_thth[j] + speed[j] - lam);
  }
  return out;
}

double cfl_dt(std::span<const double> kappa, const SpeedFunction& f, double safety) {
  const double h = 2.0 * kPi / static_cast<double>(kappa.size());
  return safety * h * h / (2.0 * max_diffusion(kappa, f));
}

double cfl_dt(const CurveState& state, const SpeedFunction& f, double safety) {
  return cfl_dt(curvature_from_support(state), f, safety);
}

std::vector<double> step_curvature(std::span<const double> kappa, const SpeedFunction& f, double dt,
                                   double* lambda_out) {
  if (lambda_out) *lambda_out = lambda(kappa, f);
  return rk4(kappa, dt, [&f](std::span<const double> k) {
    for (double x : k) {
      if (!(x > 0.0)) throw ConvexityLost("curvature became nonpositive during an RK stage");
    }
    return rhs_curvature(k, f);
  });
}

StepResult step(const CurveState& state, const SpeedFunction& f, double dt, Formulation formulation) {
  if (!(dt > 0.0)) throw InvalidParams("time step must be positive");
  StepResult result{state, dt, 0.0, 0.0};
  result.state.t = state.t + dt;
  if (formulation == Formulation::Support) {
    result.lambda = lambda(curvature_from_support(state), f);
    auto p = rk4(state.p, dt, [&f](std::span<const double> y) { return rhs_support(y, f); });
    result.state.p = steiner_normalize(p);
    // The new state must itself be convex.
    curvature_from_support(result.state);
    return result;
  }
  const auto kappa0 = curvature_from_support(state);
  const auto kappa1 = step_curvature(kappa0, f, dt, &result.lambda);
  for (double k : kappa1) {
    if (!(k > 0.0)) throw ConvexityLost("curvature became nonpositive");
  }
  result.closing_defect = std::abs(closing_defect(kappa1));
  result.state.p = support_from_curvature(kappa1, state.grid, INFINITY);
  return result;
}

std::string_view outcome_name(OutcomeStatus s) {
  switch (s) {
    case OutcomeStatus::Converged: return "Converged";
    case OutcomeStatus::TimedOut: return "TimedOut";
    case OutcomeStatus::Failed: return "Failed";
  }
  return "Failed";
}

RunResult run(const CurveState& initial, const SpeedFunction& f, const FlowConfig& config) {
  config.validate();
  if (initial.p.size() != config.n) throw InvalidParams("initial curve does not match flow.n");

  RunResult result;
  CurveState state{initial.grid, steiner_normalize(initial.p), initial.t};
  result.final_state = state;
  const bool curvature_form = config.formulation == Formulation::Curvature;

  std::vector<double> kappa;
  try {
    kappa = curvature_from_support(state);
    result.monitors = default_monitor_params(state, f);
  } catch (const Error& e) {
    result.outcome = {OutcomeStatus::Failed, e.kind(), e.what()};
    return result;
  }
  if (config.delta > 0.0) result.monitors.delta = config.delta;
  if (config.Delta > 0.0) result.monitors.Delta = config.Delta;
  MonitorParams& monitors = result.monitors;
  const double L0 = monitors.L0;
  const double target = 2.0 * kPi / L0;
  double running_kmax = *std::max_element(kappa.begin(), kappa.end());
  const double t_start = state.t;

  auto record = [&](std::size_t step_index) {
    monitors.F_of_M = f.value(running_kmax);
    DiagnosticsRecord rec = curvature_form ? diagnostics(state, kappa, f, monitors)
                                           : diagnostics(state, f, monitors);
    rec.t = state.t;
    result.log.records.push_back(rec);
    std::vector<double> speed(kappa.size());
    for (std::size_t j = 0; j < kappa.size(); ++j) speed[j] = f.value(kappa[j]);
    result.wirtinger.push_back(wirtinger_gap(speed));
    if (config.snapshot_every > 0 && step_index % config.snapshot_every == 0) {
      result.log.snapshots.push_back({state.t, state.p});
    }
  };

  std::size_t last_recorded = 0;
  try {
    record(0);
    for (;;) {
      if (sup_deviation(kappa, target) < config.convergence_tol) {
        result.outcome = {OutcomeStatus::Converged, "", ""};
        break;
      }
      const double remaining = config.t_max - (state.t - t_start);
      if (remaining <= 1e-14 * config.t_max ||
          (config.max_steps > 0 && result.steps >= config.max_steps)) {
        result.outcome = {OutcomeStatus::TimedOut, "", ""};
        break;
      }
      const double dt = std::min(cfl_dt(kappa, f, config.cfl_safety), remaining);
      if (!(dt > 1e-14 * std::max(1.0, std::abs(state.t)))) {
        throw NumericalBlowup("time step collapsed (curvature growing without bound)");
      }

      if (curvature_form) {
        auto next = step_curvature(kappa, f, dt);
        for (double k : next) {
          if (!(k > 0.0)) throw ConvexityLost("curvature became nonpositive");
        }
        const double defect = std::abs(closing_defect(next));
        auto p = support_from_curvature(next, state.grid, INFINITY);
        kappa = std::move(next);
        state.p = std::move(p);
        state.t += dt;
        result.max_closing_defect = std::max(result.max_closing_defect, defect);
      } else {
        auto p = rk4(state.p, dt, [&f](std::span<const double> y) { return rhs_support(y, f); });
        auto normalized = steiner_normalize(p);
        kappa = curvature_from_support(normalized);
        state.p = std::move(normalized);
        state.t += dt;
      }
      ++result.steps;
      running_kmax = std::max(running_kmax, *std::max_element(kappa.begin(), kappa.end()));
      result.max_length_drift = std::max(result.max_length_drift, std::abs(length(state) - L0) / L0);
      result.final_state = state;
      if (result.steps % config.record_every == 0) {
        record(result.steps);
        last_recorded = result.steps;
      }
    }
    if (last_recorded != result.steps) record(result.steps);
  } catch (const Error& e) {
    result.outcome = {OutcomeStatus::Failed, e.kind(), e.what()};
  }
  result.final_state = state;
  return result;
}

}  // namespace curveflow
