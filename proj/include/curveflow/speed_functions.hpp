#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace curveflow {

/// F(u), F'(u), F''(u) at one point.
struct SpeedValue {
  double f = 0.0;
  double df = 0.0;
  double d2f = 0.0;
};

/// A speed function F on (0, inf) with its first two derivatives.
/// Evaluators are pure, so a SpeedFunction may be shared across threads.
class SpeedFunction {
 public:
  using Evaluator = std::function<SpeedValue(double)>;

  SpeedFunction(std::string name, std::vector<double> params, Evaluator eval)
      : name_(std::move(name)), params_(std::move(params)), eval_(std::move(eval)) {}

  const std::string& name() const noexcept { return name_; }
  std::span<const double> params() const noexcept { return params_; }

  SpeedValue operator()(double u) const { return eval_(u); }
  double value(double u) const { return eval_(u).f; }

  /// Human-readable label, e.g. "power(0.5)".
  std::string label() const;

 private:
  std::string name_;
  std::vector<double> params_;
  Evaluator eval_;
};

enum class BuiltinSpeed { Power, Log1p, Exp, LinearPlusSine, SqLogPlusLinear };

/// The registered builtin names: power, log1p, exp, linear_plus_sine,
/// sq_log_plus_linear.
std::optional<BuiltinSpeed> parse_builtin_speed(std::string_view name);
std::string_view builtin_speed_name(BuiltinSpeed kind);

/// power: F = u^alpha (params = {alpha}, alpha > 0); log1p: ln(1+u);
/// exp: e^u; linear_plus_sine: 2u + sin u; sq_log_plus_linear: u^2 ln u + u.
/// Throws InvalidParams on a bad parameter list.
SpeedFunction make_builtin(BuiltinSpeed kind, std::span<const double> params = {});

/// Speed function from an expression in `u`; derivatives are exact.
SpeedFunction make_custom(const std::string& expression);

enum class Verdict { Pass, Fail, Inconclusive };
std::string_view verdict_name(Verdict v);

struct ConditionSample {
  double u = 0.0;
  double f = 0.0;
  double df = 0.0;
  double df_u = 0.0;        // F'(u) u
  double df_u2_over_f = 0.0;  // F'(u) u^2 / F(u)
};

struct ConditionVerdict {
  Verdict status = Verdict::Inconclusive;
  std::optional<ConditionSample> witness;
  std::string detail;
};

/// Outcome of screening F against the admissibility conditions:
/// (i) F' > 0, (ii) F > 0, (iii) F'u^2/F -> inf as u -> inf and -> 0 as u -> 0+.
struct ConditionReport {
  std::string speed;
  double u_lo = 0.0;
  double u_hi = 0.0;
  std::vector<ConditionSample> samples;
  std::array<ConditionVerdict, 3> verdicts;
  std::vector<std::string> notes;

  bool any_fail() const;
  bool all_pass() const;
};

struct ConditionThresholds {
  double upper = 10.0;  // F'u^2/F must exceed this at u_hi
  double lower = 0.1;   // and be below this at u_lo
};

/// Samples F on a geometric ladder of n_samples points in [u_lo, u_hi].
/// Samples that overflow to +inf are kept but excluded from the (iii) trend
/// test. Throws InvalidParams on a bad range, EvalDomain if the evaluator
/// throws or returns NaN / -inf inside the range.
ConditionReport check_conditions(const SpeedFunction& f, double u_lo, double u_hi,
                                 int n_samples, ConditionThresholds thresholds = {});

struct FiniteDifferenceErrors {
  double err1 = 0.0;
  double err2 = 0.0;
};

/// Compares the evaluator's F', F'' against fourth-order central differences
/// with step h. Errors are relative to max(|F'|, |F|/u) and
/// max(|F''|, |F'|/u, |F|/u^2) respectively. Requires u - 2h > 0.
FiniteDifferenceErrors finite_difference_check(const SpeedFunction& f, double u, double h);

}  // namespace curveflow
