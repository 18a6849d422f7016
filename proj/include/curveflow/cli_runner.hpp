#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "curveflow/analysis.hpp"
#include "curveflow/curve_geometry.hpp"
#include "curveflow/flow_core.hpp"
#include "curveflow/speed_functions.hpp"

namespace curveflow {

inline constexpr const char* kVersion = "0.1.0";

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitConverged = 0,
  kExitConfigError = 1,
  kExitTimedOut = 2,
  kExitFailed = 3,
  kExitConditionFail = 4,
  kExitConditionInconclusive = 5,
};

int exit_code_for(OutcomeStatus status);

struct CurveSpec {
  std::string id;
  std::string kind;  // circle | ellipse | fourier
  nlohmann::json params = nlohmann::json::object();
};

struct SpeedSpec {
  std::string id;
  std::string kind;  // a builtin name or "custom"
  std::vector<double> params;
  std::string expr;  // custom only
};

struct OutputPaths {
  std::string diagnostics_csv;
  std::optional<std::string> snapshots_json;
  std::string report_json;
};

struct ExperimentConfig {
  CurveSpec initial_curve;
  SpeedSpec speed;
  FlowConfig flow;
  OutputPaths outputs;
  std::uint64_t seed = 0;
  bool enforce_conditions = true;
};

/// Throws ConfigError on missing keys, wrong types or unknown kinds.
ExperimentConfig parse_experiment_config(const nlohmann::json& j);
CurveSpec parse_curve_spec(const nlohmann::json& j);
SpeedSpec parse_speed_spec(const nlohmann::json& j);
FlowConfig parse_flow_config(const nlohmann::json& j);

/// circle {r}; ellipse {a, b}; fourier {a0, modes: [{k, amplitude, phase}]}
/// or fourier {a0, random: {k_max, budget}} drawn from `seed`.
/// Returns a Steiner-normalized state at t = 0. Throws NotConvex with the
/// offending min(p + p_thth), or ConfigError for bad parameters.
CurveState build_initial(const std::string& kind, const nlohmann::json& params, std::size_t n,
                         std::uint64_t seed = 0);

SpeedFunction build_speed(const SpeedSpec& spec);

/// Parses "builtin:name[:p1[,p2...]]".
SpeedSpec parse_builtin_token(const std::string& token);

struct InvariantViolations {
  double max_length_drift = 0.0;        // max |L - L0| / L0 over every step
  double max_area_dip = 0.0;            // max (A_k - A_{k+1}) / A0 between records, >= 0
  double max_isoperimetric_rise = 0.0;  // max I_{k+1} - I_k between records, >= 0
  double min_bonnesen_slack = 0.0;
  double min_wirtinger_slack = 0.0;     // min (rhs - lhs)
  double min_barrier_margin = 0.0;      // min kappa_min - barrier_f
  double min_andrews_slack = 0.0;
  double min_lambda_ratio = 0.0;        // min lambda(t) / lambda(0)
};

struct RunReport {
  std::string outcome;
  std::string failure_reason;
  std::string failure_message;
  double wall_time = 0.0;
  std::size_t step_count = 0;
  std::optional<GeometricSummary> final_summary;
  std::optional<DecayFit> decay_fit;
  std::string decay_fit_note;
  InvariantViolations violations;
  ProtectionConstants protection;
  MonitorParams monitors;
  double delta_r0 = 0.0;  // r0 / 4
  std::optional<double> u0_proxy;
  double phi_ceiling = 0.0;
  bool psi_min_nondecreasing = false;
  double final_kappa_deviation = 0.0;
  ConditionReport conditions;
};

/// Summarizes a finished run.
RunReport make_report(const SpeedFunction& f, const RunResult& result, const ConditionReport& conditions,
                      double wall_time);

InvariantViolations compute_violations(const RunResult& result);

nlohmann::json to_json(const RunReport& report);

/// Speed-function screening range used before runs.
inline constexpr double kRunCheckLo = 1e-3;
inline constexpr double kRunCheckHi = 1e3;
inline constexpr int kRunCheckSamples = 64;

int cmd_run(const std::string& config_path, std::ostream& err);
int cmd_sweep(const std::string& config_path, std::ostream& err);
int cmd_check_speed(const std::string& spec, std::optional<double> u_lo, std::optional<double> u_hi,
                    std::optional<int> n_samples, std::ostream& out, std::ostream& err);

struct OracleArgs {
  std::string speed = "builtin:power:1";
  std::optional<double> length;
  std::optional<double> c;
  std::optional<double> a;
  std::optional<double> b;
  std::optional<std::size_t> n;
  std::string target = "lambda";  // quadrature target: lambda | perimeter | area
};
int cmd_oracle(const std::string& kind, const OracleArgs& args, std::ostream& out, std::ostream& err);

/// Entry point of the curveflow executable.
int cli_main(int argc, char** argv);

}  // namespace curveflow
