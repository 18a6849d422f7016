#include "curveflow/speed_functions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "curveflow/errors.hpp"
#include "curveflow/expression.hpp"

namespace curveflow {

std::string SpeedFunction::label() const {
  std::ostringstream out;
  out << name_;
  if (!params_.empty()) {
    out << '(';
    for (std::size_t i = 0; i < params_.size(); ++i) out << (i ? "," : "") << params_[i];
    out << ')';
  }
  return out.str();
}

std::optional<BuiltinSpeed> parse_builtin_speed(std::string_view name) {
  if (name == "power") return BuiltinSpeed::Power;
  if (name == "log1p") return BuiltinSpeed::Log1p;
  if (name == "exp") return BuiltinSpeed::Exp;
  if (name == "linear_plus_sine") return BuiltinSpeed::LinearPlusSine;
  if (name == "sq_log_plus_linear") return BuiltinSpeed::SqLogPlusLinear;
  return std::nullopt;
}

std::string_view builtin_speed_name(BuiltinSpeed kind) {
  switch (kind) {
    case BuiltinSpeed::Power: return "power";
    case BuiltinSpeed::Log1p: return "log1p";
    case BuiltinSpeed::Exp: return "exp";
    case BuiltinSpeed::LinearPlusSine: return "linear_plus_sine";
    case BuiltinSpeed::SqLogPlusLinear: return "sq_log_plus_linear";
  }
  return "unknown";
}

SpeedFunction make_builtin(BuiltinSpeed kind, std::span<const double> params) {
  const std::string name(builtin_speed_name(kind));
  if (kind == BuiltinSpeed::Power) {
    if (params.size() != 1) throw InvalidParams("power speed takes exactly one parameter (alpha)");
    const double alpha = params[0];
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
      throw InvalidParams("power speed requires alpha > 0, got " + std::to_string(alpha));
    }
    return SpeedFunction(name, {alpha}, [alpha](double u) {
      return SpeedValue{std::pow(u, alpha), alpha * std::pow(u, alpha - 1.0),
                        alpha * (alpha - 1.0) * std::pow(u, alpha - 2.0)};
    });
  }
  if (!params.empty()) throw InvalidParams(name + " speed takes no parameters");
  switch (kind) {
    case BuiltinSpeed::Log1p:
      return SpeedFunction(name, {}, [](double u) {
        const double s = 1.0 + u;
        return SpeedValue{std::log1p(u), 1.0 / s, -1.0 / (s * s)};
      });
    case BuiltinSpeed::Exp:
      return SpeedFunction(name, {}, [](double u) {
        const double e = std::exp(u);
        return SpeedValue{e, e, e};
      });
    case BuiltinSpeed::LinearPlusSine:
      return SpeedFunction(name, {}, [](double u) {
        return SpeedValue{2.0 * u + std::sin(u), 2.0 + std::cos(u), -std::sin(u)};
      });
    case BuiltinSpeed::SqLogPlusLinear:
      return SpeedFunction(name, {}, [](double u) {
        const double lu = std::log(u);
        return SpeedValue{u * u * lu + u, 2.0 * u * lu + u + 1.0, 2.0 * lu + 3.0};
      });
    case BuiltinSpeed::Power: break;
  }
  throw InvalidParams("unknown builtin speed");
}

SpeedFunction make_custom(const std::string& expression) {
  auto expr = Expression::parse(expression);
  return SpeedFunction("custom", {}, [expr](double u) {
    const Jet j = expr.evaluate(u);
    return SpeedValue{j.value, j.d1, j.d2};
  });
}

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

bool ConditionReport::any_fail() const {
  return std::any_of(verdicts.begin(), verdicts.end(),
                     [](const auto& v) { return v.status == Verdict::Fail; });
}

bool ConditionReport::all_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(),
                     [](const auto& v) { return v.status == Verdict::Pass; });
}

namespace {

std::string describe(const ConditionSample& s) {
  std::ostringstream out;
  out << "u=" << s.u << " F=" << s.f << " F'=" << s.df;
  return out.str();
}

ConditionVerdict sign_verdict(const std::vector<ConditionSample>& samples, double ConditionSample::*field,
                              const char* what) {
  for (const auto& s : samples) {
    if (!(s.*field > 0.0)) {
      return {Verdict::Fail, s, std::string(what) + " is not positive at " + describe(s)};
    }
  }
  return {Verdict::Pass, std::nullopt, std::string(what) + " positive at every sample"};
}

}  // namespace

ConditionReport check_conditions(const SpeedFunction& f, double u_lo, double u_hi, int n_samples,
                                 ConditionThresholds thresholds) {
  if (!(u_lo > 0.0) || !(u_hi > u_lo) || n_samples < 8) {
    throw InvalidParams("check_conditions needs 0 < u_lo < u_hi and n_samples >= 8");
  }
  ConditionReport report;
  report.speed = f.label();
  report.u_lo = u_lo;
  report.u_hi = u_hi;

  const double ratio = std::log(u_hi / u_lo) / static_cast<double>(n_samples - 1);
  std::vector<bool> finite(static_cast<std::size_t>(n_samples), true);
  for (int i = 0; i < n_samples; ++i) {
    const double u = i == n_samples - 1 ? u_hi : u_lo * std::exp(ratio * i);
    SpeedValue v;
    try {
      v = f(u);
    } catch (const std::exception& e) {
      throw EvalDomain("speed evaluator failed at u=" + std::to_string(u) + ": " + e.what());
    }
    if (std::isnan(v.f) || std::isnan(v.df) || v.f == -INFINITY || v.df == -INFINITY) {
      throw EvalDomain("speed evaluator returned a non-finite value at u=" + std::to_string(u));
    }
    ConditionSample s{u, v.f, v.df, v.df * u, v.df * u * u / v.f};
    if (!std::isfinite(v.f) || !std::isfinite(v.df)) {
      finite[static_cast<std::size_t>(i)] = false;
      report.notes.push_back("overflow at u=" + std::to_string(u) + "; sample excluded from the (iii) trend test");
    }
    report.samples.push_back(s);
  }

  report.verdicts[0] = sign_verdict(report.samples, &ConditionSample::df, "F'");
  report.verdicts[1] = sign_verdict(report.samples, &ConditionSample::f, "F");

  auto& third = report.verdicts[2];
  third.status = Verdict::Inconclusive;
  if (report.verdicts[1].status == Verdict::Fail) {
    third.detail = "F'u^2/F is meaningless where F <= 0";
    return report;
  }
  std::vector<double> r;
  std::vector<double> u;
  for (std::size_t i = 0; i < report.samples.size(); ++i) {
    if (finite[i]) {
      r.push_back(report.samples[i].df_u2_over_f);
      u.push_back(report.samples[i].u);
    }
  }
  const bool top_finite = finite.back();
  const std::size_t m = r.size();
  const bool upper_ok = top_finite && m >= 3 && r[m - 1] > thresholds.upper &&
                        r[m - 3] < r[m - 2] && r[m - 2] < r[m - 1];
  const bool lower_ok = finite.front() && m >= 3 && r[0] < thresholds.lower && r[0] < r[1] && r[1] < r[2];
  std::ostringstream detail;
  if (!top_finite) {
    detail << "upper limit: F overflows at u_hi; ";
  } else if (m > 0) {
    detail << "upper limit: F'u^2/F = " << r[m - 1] << " at u=" << u[m - 1]
           << (upper_ok ? " (rising, above threshold); " : " (trend not established); ");
  }
  if (m > 0) {
    detail << "lower limit: F'u^2/F = " << r[0] << " at u=" << u[0]
           << (lower_ok ? " (falling, below threshold)" : " (trend not established)");
  }
  third.detail = detail.str();
  if (upper_ok && lower_ok) third.status = Verdict::Pass;
  return report;
}

FiniteDifferenceErrors finite_difference_check(const SpeedFunction& f, double u, double h) {
  if (!(h > 0.0) || !(u - 2.0 * h > 0.0)) {
    throw InvalidParams("finite_difference_check requires h > 0 and u - 2h > 0");
  }
  const double fm2 = f.value(u - 2.0 * h), fm1 = f.value(u - h), f0 = f.value(u);
  const double fp1 = f.value(u + h), fp2 = f.value(u + 2.0 * h);
  const double d1 = (-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) / (12.0 * h);
  const double d2 = (-fp2 + 16.0 * fp1 - 30.0 * f0 + 16.0 * fm1 - fm2) / (12.0 * h * h);
  const SpeedValue exact = f(u);
  const double scale1 = std::max(std::abs(exact.df), std::abs(exact.f) / u);
  const double scale2 = std::max({std::abs(exact.d2f), std::abs(exact.df) / u, std::abs(exact.f) / (u * u)});
  return {std::abs(d1 - exact.df) / scale1, std::abs(d2 - exact.d2f) / scale2};
}

}  // namespace curveflow
