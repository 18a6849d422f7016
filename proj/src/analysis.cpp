#include "curveflow/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "curveflow/errors.hpp"
#include "curveflow/flow_core.hpp"
#include "curveflow/spectral.hpp"

namespace curveflow {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> speed_field(std::span<const double> kappa, const SpeedFunction& f) {
  std::vector<double> out(kappa.size());
  for (std::size_t j = 0; j < kappa.size(); ++j) out[j] = f.value(kappa[j]);
  return out;
}

void check_delta(const CurveState& state, double delta) {
  const double p_min = *std::min_element(state.p.begin(), state.p.end());
  if (!(delta > 0.0) || !(delta < p_min)) {
    std::ostringstream msg;
    msg << "phi offset delta=" << delta << " must satisfy 0 < delta < min p = " << p_min;
    throw InvalidMonitorParams(msg.str());
  }
}

void check_Delta(const CurveState& state, double Delta) {
  const double p_max = *std::max_element(state.p.begin(), state.p.end());
  if (!(Delta >= 2.0 * p_max)) {
    std::ostringstream msg;
    msg << "psi offset Delta=" << Delta << " must be at least 2 max p = " << 2.0 * p_max;
    throw InvalidMonitorParams(msg.str());
  }
}

}  // namespace

double grad_energy(std::span<const double> speed) {
  auto d = spectral_derivative(speed, 1);
  for (double& x : d) x *= x;
  return periodic_integral(d);
}

std::pair<double, double> wirtinger_gap(std::span<const double> speed) {
  const double mean = periodic_integral(speed) / (2.0 * kPi);
  std::vector<double> dev(speed.size());
  for (std::size_t j = 0; j < speed.size(); ++j) dev[j] = (speed[j] - mean) * (speed[j] - mean);
  return {periodic_integral(dev), grad_energy(speed)};
}

std::pair<double, double> wirtinger_gap(const CurveState& state, const SpeedFunction& f) {
  return wirtinger_gap(speed_field(curvature_from_support(state), f));
}

double monitor_phi(const CurveState& state, std::span<const double> kappa, const SpeedFunction& f,
                   double delta) {
  check_delta(state, delta);
  double phi = -INFINITY;
  for (std::size_t j = 0; j < kappa.size(); ++j) phi = std::max(phi, f.value(kappa[j]) / (state.p[j] - delta));
  return phi;
}

double monitor_phi(const CurveState& state, const SpeedFunction& f, double delta) {
  return monitor_phi(state, curvature_from_support(state), f, delta);
}

double monitor_psi(const CurveState& state, std::span<const double> kappa, const SpeedFunction& f,
                   double Delta) {
  check_Delta(state, Delta);
  double psi = INFINITY;
  for (std::size_t j = 0; j < kappa.size(); ++j) psi = std::min(psi, f.value(kappa[j]) / (Delta - state.p[j]));
  return psi;
}

double monitor_psi(const CurveState& state, const SpeedFunction& f, double Delta) {
  return monitor_psi(state, curvature_from_support(state), f, Delta);
}

double barrier_f(double t, double kappa0_min, double F_of_M) {
  const double half = 0.5 * kappa0_min;
  return half / (F_of_M * half * t + 1.0);
}

ProtectionConstants protection_constants(double L, double I0, const SpeedFunction& f) {
  if (!(L > 0.0)) throw InvalidParams("protection_constants needs L > 0");
  if (I0 < 1.0 - 1e-12) throw InvalidParams("protection_constants needs I0 >= 1");
  const double excess = std::max(0.0, I0 - 1.0);
  const double root = std::sqrt(std::max(1.0, I0)) + std::sqrt(excess);
  ProtectionConstants c;
  c.r0 = L / (2.0 * kPi) / (root * root);
  c.T1 = c.r0 / (2.0 * f.value(2.0 / c.r0));
  return c;
}

std::optional<double> u0_proxy(const SpeedFunction& f, double delta) {
  constexpr int kSamples = 241;
  const double lo = 1e-6, hi = 1e6;
  const double step = std::log(hi / lo) / (kSamples - 1);
  for (int i = 0; i < kSamples; ++i) {
    const double u = lo * std::exp(step * i);
    const auto v = f(u);
    if (!std::isfinite(v.f) || !std::isfinite(v.df)) break;
    if (v.df * u * u / v.f > 2.0 / delta) return u;
  }
  return std::nullopt;
}

double phi_ceiling(double phi0, double delta, double u0, const SpeedFunction& f) {
  return std::max(phi0, f.value(std::max(2.0 / delta, u0)) / delta);
}

MonitorParams default_monitor_params(const CurveState& initial, const SpeedFunction& f) {
  const auto kappa = curvature_from_support(initial);
  const auto [kmin, kmax] = std::minmax_element(kappa.begin(), kappa.end());
  MonitorParams m;
  m.L0 = length(initial);
  const double A0 = area(initial);
  const double I0 = m.L0 * m.L0 / (4.0 * kPi * A0);
  const double r0 = protection_constants(m.L0, I0, f).r0;
  const double p_min = *std::min_element(initial.p.begin(), initial.p.end());
  m.delta = std::min(0.25 * p_min, 0.25 * r0);
  m.Delta = m.L0;
  m.kappa0_min = *kmin;
  m.F_of_M = f.value(*kmax);
  return m;
}

DiagnosticsRecord diagnostics(const CurveState& state, std::span<const double> kappa,
                              const SpeedFunction& f, const MonitorParams& params) {
  check_delta(state, params.delta);
  check_Delta(state, params.Delta);

  DiagnosticsRecord r;
  r.t = state.t;
  r.L = length(state);
  r.A = area(state);
  r.I = r.L * r.L / (4.0 * kPi * r.A);

  const auto speed = speed_field(kappa, f);
  const double integral_F = periodic_integral(speed);
  r.lambda = integral_F / (2.0 * kPi);
  const auto [kmin, kmax] = std::minmax_element(kappa.begin(), kappa.end());
  r.kappa_min = *kmin;
  r.kappa_max = *kmax;

  const double target = 2.0 * kPi / params.L0;
  std::vector<double> f_over_kappa(kappa.size());
  for (std::size_t j = 0; j < kappa.size(); ++j) {
    r.speed_sup = std::max(r.speed_sup, std::abs(speed[j] - r.lambda));
    r.kappa_deviation = std::max(r.kappa_deviation, std::abs(kappa[j] - target));
    f_over_kappa[j] = speed[j] / kappa[j];
  }
  r.grad_energy = grad_energy(speed);
  r.closing_defect_mod = std::abs(closing_defect(kappa));

  const auto [r_in, r_out] = bonnesen_bounds(r.L, r.A);
  auto bonnesen = [&](double radius) { return radius * r.L - r.A - kPi * radius * radius; };
  r.bonnesen_slack = std::min(bonnesen(r_in), bonnesen(r_out));

  r.andrews_slack = -periodic_integral(f_over_kappa) + r.L / (2.0 * kPi) * integral_F;
  r.phi_max = monitor_phi(state, kappa, f, params.delta);
  r.psi_min = monitor_psi(state, kappa, f, params.Delta);
  r.barrier_f = barrier_f(state.t, params.kappa0_min, params.F_of_M);
  return r;
}

DiagnosticsRecord diagnostics(const CurveState& state, const SpeedFunction& f, const MonitorParams& params) {
  return diagnostics(state, curvature_from_support(state), f, params);
}

DecayFit fit_decay_rate(const TrajectoryLog& log, const SpeedFunction& f, double tail_fraction) {
  if (log.records.empty()) throw InsufficientData("empty trajectory log");
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) throw InvalidParams("tail_fraction must lie in (0, 1]");
  const double g0 = log.records.front().grad_energy;
  std::vector<const DiagnosticsRecord*> eligible;
  for (const auto& r : log.records) {
    if (r.grad_energy > 1e-300 && r.grad_energy < 1e-2 * g0) eligible.push_back(&r);
  }
  const auto take = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(eligible.size())));
  if (take < 10) {
    throw InsufficientData("decay fit needs at least 10 records in the tail window, have " + std::to_string(take));
  }
  const auto first = eligible.end() - static_cast<std::ptrdiff_t>(take);

  double st = 0, sy = 0, stt = 0, sty = 0;
  const double m = static_cast<double>(take);
  for (auto it = first; it != eligible.end(); ++it) {
    const double t = (*it)->t, y = std::log((*it)->grad_energy);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
  }
  const double denom = m * stt - st * st;
  if (!(denom > 0.0)) throw InsufficientData("tail window spans no time");
  const double slope = (m * sty - st * sy) / denom;
  const double intercept = (sy - slope * st) / m;
  double ss_res = 0, ss_tot = 0;
  const double y_mean = sy / m;
  for (auto it = first; it != eligible.end(); ++it) {
    const double y = std::log((*it)->grad_energy);
    const double fit = intercept + slope * (*it)->t;
    ss_res += (y - fit) * (y - fit);
    ss_tot += (y - y_mean) * (y - y_mean);
  }

  DecayFit fit;
  fit.t0 = (*first)->t;
  fit.t1 = eligible.back()->t;
  fit.fitted_rate = -slope;
  fit.amplitude_rate = -0.5 * slope;
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  const double kbar = 2.0 * kPi / log.records.front().L;
  fit.theory_lower_rate = f(kbar).df * kbar * kbar;
  fit.linearized_rate = 3.0 * fit.theory_lower_rate;
  fit.records_used = take;
  return fit;
}

}  // namespace curveflow
