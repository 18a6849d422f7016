#include "curveflow/cli_runner.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "curveflow/errors.hpp"
#include "curveflow/oracles.hpp"
#include "curveflow/serialization.hpp"

namespace curveflow {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

template <class T>
T get_required(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + ": bad value for '" + key + "': " + e.what());
  }
}

template <class T>
T get_optional(const json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return get_required<T>(j, key, where);
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed JSON in '" + path + "': " + e.what());
  }
}

std::ofstream open_output(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(parent, ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  return out;
}

double param(const json& params, const char* key, const std::string& kind) {
  return get_required<double>(params, key, kind + " params");
}

std::vector<double> fourier_support(const json& params, std::size_t n, std::uint64_t seed) {
  const double a0 = param(params, "a0", "fourier");
  if (!(a0 > 0.0)) throw ConfigError("fourier params: a0 must be positive");
  struct Mode {
    int k;
    double amplitude;
    double phase;
  };
  std::vector<Mode> modes;
  if (params.contains("modes")) {
    for (const auto& m : params.at("modes")) {
      modes.push_back({get_required<int>(m, "k", "fourier mode"), get_required<double>(m, "amplitude", "fourier mode"),
                       get_optional<double>(m, "phase", 0.0, "fourier mode")});
    }
  }
  if (params.contains("random")) {
    const auto& r = params.at("random");
    const int k_max = get_required<int>(r, "k_max", "fourier random");
    const double budget = get_optional<double>(r, "budget", 0.5, "fourier random");
    if (k_max < 2 || !(budget > 0.0 && budget < 1.0)) {
      throw ConfigError("fourier random: need k_max >= 2 and 0 < budget < 1");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Mode> drawn;
    double weight = 0.0;
    for (int k = 2; k <= k_max; ++k) {
      const double w = unit(rng);
      const double phase = 2.0 * kPi * unit(rng);
      drawn.push_back({k, w, phase});
      weight += w * (k * k - 1.0);
    }
    // Scale so that sum eps_k (k^2 - 1) = budget * a0 < a0.
    for (auto& m : drawn) m.amplitude *= budget * a0 / weight;
    modes.insert(modes.end(), drawn.begin(), drawn.end());
  }
  std::vector<double> p(n, a0);
  const AngleGrid grid(n);
  for (const auto& m : modes) {
    if (m.k < 1 || static_cast<std::size_t>(m.k) >= n / 2) {
      throw ConfigError("fourier mode k=" + std::to_string(m.k) + " must lie in [1, n/2)");
    }
    for (std::size_t j = 0; j < n; ++j) p[j] += m.amplitude * std::cos(m.k * grid.theta(j) + m.phase);
  }
  return p;
}

}  // namespace

int exit_code_for(OutcomeStatus status) {
  switch (status) {
    case OutcomeStatus::Converged: return kExitConverged;
    case OutcomeStatus::TimedOut: return kExitTimedOut;
    case OutcomeStatus::Failed: return kExitFailed;
  }
  return kExitFailed;
}

CurveSpec parse_curve_spec(const json& j) {
  CurveSpec c;
  c.kind = get_required<std::string>(j, "kind", "initial_curve");
  c.id = get_optional<std::string>(j, "id", c.kind, "initial_curve");
  if (c.kind != "circle" && c.kind != "ellipse" && c.kind != "fourier") {
    throw ConfigError("initial_curve: unknown kind '" + c.kind + "'");
  }
  c.params = j.contains("params") ? j.at("params") : json::object();
  return c;
}

SpeedSpec parse_speed_spec(const json& j) {
  SpeedSpec s;
  s.kind = get_required<std::string>(j, "kind", "speed");
  if (s.kind == "custom") {
    s.expr = get_required<std::string>(j, "expr", "speed");
  } else if (!parse_builtin_speed(s.kind)) {
    throw ConfigError("speed: unknown kind '" + s.kind + "'");
  }
  s.params = get_optional<std::vector<double>>(j, "params", {}, "speed");
  s.id = get_optional<std::string>(j, "id", s.kind, "speed");
  return s;
}

FlowConfig parse_flow_config(const json& j) {
  FlowConfig f;
  const std::string where = "flow";
  if (!j.is_object()) throw ConfigError("flow must be an object");
  f.n = get_optional<std::size_t>(j, "n", f.n, where);
  const auto form = get_optional<std::string>(j, "formulation", "support", where);
  if (form == "support") {
    f.formulation = Formulation::Support;
  } else if (form == "curvature") {
    f.formulation = Formulation::Curvature;
  } else {
    throw ConfigError("flow.formulation must be 'support' or 'curvature'");
  }
  f.cfl_safety = get_optional<double>(j, "cfl_safety", f.cfl_safety, where);
  f.t_max = get_optional<double>(j, "t_max", f.t_max, where);
  f.convergence_tol = get_optional<double>(j, "convergence_tol", f.convergence_tol, where);
  f.record_every = get_optional<std::size_t>(j, "record_every", f.record_every, where);
  f.snapshot_every = get_optional<std::size_t>(j, "snapshot_every", f.snapshot_every, where);
  f.max_steps = get_optional<std::size_t>(j, "max_steps", f.max_steps, where);
  f.delta = get_optional<double>(j, "delta", f.delta, where);
  f.Delta = get_optional<double>(j, "Delta", f.Delta, where);
  if (j.contains("lambda_rule") && j.at("lambda_rule") != "angle_integral") {
    throw ConfigError("flow.lambda_rule only supports 'angle_integral'");
  }
  try {
    f.validate();
  } catch (const InvalidParams& e) {
    throw ConfigError(e.what());
  }
  return f;
}

ExperimentConfig parse_experiment_config(const json& j) {
  if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
  ExperimentConfig c;
  c.initial_curve = parse_curve_spec(get_required<json>(j, "initial_curve", "config"));
  c.speed = parse_speed_spec(get_required<json>(j, "speed", "config"));
  c.flow = parse_flow_config(get_required<json>(j, "flow", "config"));
  const auto out = get_required<json>(j, "outputs", "config");
  c.outputs.diagnostics_csv = get_required<std::string>(out, "diagnostics_csv", "outputs");
  c.outputs.report_json = get_required<std::string>(out, "report_json", "outputs");
  if (out.contains("snapshots_json") && !out.at("snapshots_json").is_null()) {
    c.outputs.snapshots_json = get_required<std::string>(out, "snapshots_json", "outputs");
  }
  c.seed = get_optional<std::uint64_t>(j, "seed", 0, "config");
  c.enforce_conditions = get_optional<bool>(j, "enforce_conditions", true, "config");
  return c;
}

CurveState build_initial(const std::string& kind, const json& params, std::size_t n, std::uint64_t seed) {
  const AngleGrid grid(n);
  std::vector<double> p(n);
  if (kind == "circle") {
    const double r = param(params, "r", kind);
    if (!(r > 0.0)) throw ConfigError("circle params: r must be positive");
    std::fill(p.begin(), p.end(), r);
  } else if (kind == "ellipse") {
    const double a = param(params, "a", kind), b = param(params, "b", kind);
    if (!(a > 0.0 && b > 0.0)) throw ConfigError("ellipse params: a, b must be positive");
    for (std::size_t j = 0; j < n; ++j) {
      const double c = std::cos(grid.theta(j)), s = std::sin(grid.theta(j));
      p[j] = std::sqrt(a * a * c * c + b * b * s * s);
    }
  } else if (kind == "fourier") {
    p = fourier_support(params, n, seed);
  } else {
    throw ConfigError("unknown initial curve kind '" + kind + "'");
  }
  return make_curve_state(steiner_normalize(p), 0.0);
}

SpeedFunction build_speed(const SpeedSpec& spec) {
  if (spec.kind == "custom") return make_custom(spec.expr);
  const auto kind = parse_builtin_speed(spec.kind);
  if (!kind) throw ConfigError("unknown speed kind '" + spec.kind + "'");
  return make_builtin(*kind, spec.params);
}

SpeedSpec parse_builtin_token(const std::string& token) {
  const std::string prefix = "builtin:";
  if (token.rfind(prefix, 0) != 0) throw ConfigError("speed token must start with 'builtin:'");
  const std::string rest = token.substr(prefix.size());
  SpeedSpec s;
  s.id = token;
  const auto colon = rest.find(':');
  s.kind = rest.substr(0, colon);
  if (!parse_builtin_speed(s.kind)) throw ConfigError("unknown builtin speed '" + s.kind + "'");
  if (colon != std::string::npos) {
    std::stringstream list(rest.substr(colon + 1));
    std::string item;
    while (std::getline(list, item, ',')) {
      char* end = nullptr;
      const double v = std::strtod(item.c_str(), &end);
      if (item.empty() || *end != '\0') throw ConfigError("bad speed parameter '" + item + "'");
      s.params.push_back(v);
    }
  }
  return s;
}

InvariantViolations compute_violations(const RunResult& result) {
  InvariantViolations v;
  v.max_length_drift = result.max_length_drift;
  const auto& recs = result.log.records;
  if (recs.empty()) return v;
  const double A0 = recs.front().A;
  const double lambda0 = recs.front().lambda;
  v.min_bonnesen_slack = INFINITY;
  v.min_barrier_margin = INFINITY;
  v.min_andrews_slack = INFINITY;
  v.min_lambda_ratio = INFINITY;
  for (std::size_t k = 0; k < recs.size(); ++k) {
    const auto& r = recs[k];
    v.max_length_drift = std::max(v.max_length_drift, std::abs(r.L - recs.front().L) / recs.front().L);
    if (k > 0) {
      v.max_area_dip = std::max(v.max_area_dip, (recs[k - 1].A - r.A) / A0);
      v.max_isoperimetric_rise = std::max(v.max_isoperimetric_rise, r.I - recs[k - 1].I);
    }
    v.min_bonnesen_slack = std::min(v.min_bonnesen_slack, r.bonnesen_slack);
    v.min_barrier_margin = std::min(v.min_barrier_margin, r.kappa_min - r.barrier_f);
    v.min_andrews_slack = std::min(v.min_andrews_slack, r.andrews_slack);
    v.min_lambda_ratio = std::min(v.min_lambda_ratio, r.lambda / lambda0);
  }
  v.min_wirtinger_slack = INFINITY;
  for (const auto& [lhs, rhs] : result.wirtinger) v.min_wirtinger_slack = std::min(v.min_wirtinger_slack, rhs - lhs);
  if (result.wirtinger.empty()) v.min_wirtinger_slack = 0.0;
  return v;
}

RunReport make_report(const SpeedFunction& f, const RunResult& result, const ConditionReport& conditions,
                      double wall_time) {
  RunReport rep;
  rep.outcome = std::string(outcome_name(result.outcome.status));
  rep.failure_reason = result.outcome.reason;
  rep.failure_message = result.outcome.message;
  rep.wall_time = wall_time;
  rep.step_count = result.steps;
  rep.conditions = conditions;
  rep.monitors = result.monitors;
  try {
    rep.final_summary = summarize(result.final_state);
  } catch (const Error&) {
  }
  try {
    rep.decay_fit = fit_decay_rate(result.log, f);
  } catch (const Error& e) {
    rep.decay_fit_note = e.what();
  }
  rep.violations = compute_violations(result);
  const auto& recs = result.log.records;
  if (!recs.empty()) {
    const auto& first = recs.front();
    rep.protection = protection_constants(first.L, std::max(1.0, first.I), f);
    rep.delta_r0 = rep.protection.r0 / 4.0;
    rep.u0_proxy = u0_proxy(f, result.monitors.delta);
    rep.phi_ceiling = phi_ceiling(first.phi_max, result.monitors.delta, rep.u0_proxy.value_or(0.0), f);
    rep.psi_min_nondecreasing = true;
    for (std::size_t k = 1; k < recs.size(); ++k) {
      if (recs[k].psi_min < recs[k - 1].psi_min * (1.0 - 1e-12)) rep.psi_min_nondecreasing = false;
    }
    rep.final_kappa_deviation = recs.back().kappa_deviation;
  }
  return rep;
}

json to_json(const RunReport& r) {
  json j;
  j["outcome"] = r.outcome;
  j["failure_reason"] = r.failure_reason.empty() ? json(nullptr) : json(r.failure_reason);
  j["failure_message"] = r.failure_message.empty() ? json(nullptr) : json(r.failure_message);
  j["wall_time"] = r.wall_time;
  j["step_count"] = r.step_count;
  if (r.final_summary) {
    const auto& g = *r.final_summary;
    j["final_summary"] = {{"L", g.length},
                          {"A", g.area},
                          {"I", g.isoperimetric_ratio},
                          {"inradius_lower", g.inradius_lower},
                          {"outradius_upper", g.outradius_upper},
                          {"kappa_min", g.kappa_min},
                          {"kappa_max", g.kappa_max}};
  } else {
    j["final_summary"] = nullptr;
  }
  j["final_kappa_deviation"] = r.final_kappa_deviation;
  j["decay_fit"] = r.decay_fit ? to_json(*r.decay_fit) : json(nullptr);
  if (!r.decay_fit_note.empty()) j["decay_fit_note"] = r.decay_fit_note;
  const auto& v = r.violations;
  j["violations"] = {{"max_length_drift", v.max_length_drift},
                     {"max_area_dip", v.max_area_dip},
                     {"max_isoperimetric_rise", v.max_isoperimetric_rise},
                     {"min_bonnesen_slack", v.min_bonnesen_slack},
                     {"min_wirtinger_slack", v.min_wirtinger_slack},
                     {"min_barrier_margin", v.min_barrier_margin},
                     {"min_andrews_slack", v.min_andrews_slack},
                     {"min_lambda_ratio", v.min_lambda_ratio}};
  j["protection"] = {{"r0", r.protection.r0}, {"T1", r.protection.T1}};
  j["monitors"] = {{"delta", r.monitors.delta},
                   {"delta_r0", r.delta_r0},
                   {"Delta", r.monitors.Delta},
                   {"kappa0_min", r.monitors.kappa0_min},
                   {"L0", r.monitors.L0},
                   {"phi_ceiling", r.phi_ceiling},
                   {"phi_ceiling_u0", r.u0_proxy ? json(*r.u0_proxy) : json(nullptr)},
                   {"phi_ceiling_u0_is_proxy", true},
                   {"psi_min_nondecreasing", r.psi_min_nondecreasing}};
  j["conditions"] = to_json(r.conditions);
  return j;
}

namespace {

struct Prepared {
  SpeedFunction speed;
  CurveState initial;
  ConditionReport conditions;
};

// Builds the speed and initial curve, screens the speed function.
Prepared prepare(const SpeedSpec& speed_spec, const CurveSpec& curve_spec, std::size_t n, std::uint64_t seed) {
  auto f = build_speed(speed_spec);
  auto initial = build_initial(curve_spec.kind, curve_spec.params, n, seed);
  if (speed_spec.kind == "custom") {
    const auto kappa = curvature_from_support(initial);
    const auto [lo, hi] = std::minmax_element(kappa.begin(), kappa.end());
    for (double u : {*lo, 0.5 * (*lo + *hi), *hi}) {
      const auto e = finite_difference_check(f, u, 1e-4 * u);
      if (!(e.err1 < 1e-5 && e.err2 < 1e-5)) {
        throw ConfigError("custom speed failed its finite-difference self-test at u=" + std::to_string(u));
      }
    }
  }
  auto conditions = check_conditions(f, kRunCheckLo, kRunCheckHi, kRunCheckSamples);
  return {std::move(f), std::move(initial), std::move(conditions)};
}

struct CellOutput {
  RunReport report;
  RunResult result;
};

CellOutput execute(const Prepared& prep, const FlowConfig& flow, bool enforce) {
  CellOutput out;
  if (enforce && prep.conditions.any_fail()) {
    out.result.outcome = {OutcomeStatus::Failed, "ConditionsViolated",
                          "speed function fails the admissibility screen; set enforce_conditions=false to run anyway"};
    out.result.final_state = prep.initial;
    out.report = make_report(prep.speed, out.result, prep.conditions, 0.0);
    return out;
  }
  const auto start = std::chrono::steady_clock::now();
  out.result = run(prep.initial, prep.speed, flow);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.report = make_report(prep.speed, out.result, prep.conditions, wall);
  return out;
}

}  // namespace

int cmd_run(const std::string& config_path, std::ostream& err) {
  ExperimentConfig config;
  Prepared prep{make_builtin(BuiltinSpeed::Power, std::vector<double>{1.0}), {AngleGrid(8), {}, 0.0}, {}};
  std::ofstream csv, report_file, snapshots;
  try {
    config = parse_experiment_config(read_json_file(config_path));
    prep = prepare(config.speed, config.initial_curve, config.flow.n, config.seed);
    csv = open_output(config.outputs.diagnostics_csv);
    report_file = open_output(config.outputs.report_json);
    if (config.outputs.snapshots_json) snapshots = open_output(*config.outputs.snapshots_json);
  } catch (const Error& e) {
    err << "config error (" << e.kind() << "): " << e.what() << '\n';
    return kExitConfigError;
  }

  const auto cell = execute(prep, config.flow, config.enforce_conditions);
  write_diagnostics_csv(csv, cell.result.log.records);
  if (snapshots.is_open()) snapshots << snapshots_to_json(cell.result.log.snapshots).dump() << '\n';
  report_file << to_json(cell.report).dump(2) << '\n';
  if (!csv || !report_file) {
    err << "failed writing outputs\n";
    return kExitConfigError;
  }
  if (cell.result.outcome.status == OutcomeStatus::Failed) {
    err << "run failed (" << cell.result.outcome.reason << "): " << cell.result.outcome.message << '\n';
  }
  return exit_code_for(cell.result.outcome.status);
}

int cmd_sweep(const std::string& config_path, std::ostream& err) {
  std::vector<CurveSpec> curves;
  std::vector<SpeedSpec> speeds;
  FlowConfig flow;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool enforce = true, write_diagnostics = false;
  try {
    const auto j = read_json_file(config_path);
    if (!j.is_object()) throw ConfigError("sweep config must be a JSON object");
    for (const auto& c : get_required<json>(j, "initial_curves", "sweep")) curves.push_back(parse_curve_spec(c));
    for (const auto& s : get_required<json>(j, "speeds", "sweep")) speeds.push_back(parse_speed_spec(s));
    flow = parse_flow_config(get_required<json>(j, "flow", "sweep"));
    out_dir = get_required<std::string>(j, "output_dir", "sweep");
    seed = get_optional<std::uint64_t>(j, "seed", 0, "sweep");
    enforce = get_optional<bool>(j, "enforce_conditions", true, "sweep");
    write_diagnostics = get_optional<bool>(j, "write_diagnostics", false, "sweep");
    if (curves.empty() || speeds.empty()) throw ConfigError("sweep grid is empty");
    std::filesystem::create_directories(out_dir);
  } catch (const Error& e) {
    err << "config error (" << e.kind() << "): " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }

  struct Row {
    std::string curve_id, speed_id, outcome;
    double final_deviation = NAN, fitted_rate = NAN, theory_lower_rate = NAN, max_length_drift = NAN;
  };
  const std::size_t cells = curves.size() * speeds.size();
  std::vector<Row> rows(cells);

  auto work = [&](std::size_t index) {
    const auto& curve = curves[index / speeds.size()];
    const auto& speed = speeds[index % speeds.size()];
    Row& row = rows[index];
    row.curve_id = curve.id;
    row.speed_id = speed.id;
    const std::string stem = out_dir + "/" + curve.id + "__" + speed.id;
    json report;
    try {
      const auto prep = prepare(speed, curve, flow.n, seed + index / speeds.size());
      const auto cell = execute(prep, flow, enforce);
      report = to_json(cell.report);
      row.outcome = cell.report.outcome;
      row.final_deviation = cell.report.final_kappa_deviation;
      row.max_length_drift = cell.report.violations.max_length_drift;
      if (cell.report.decay_fit) {
        row.fitted_rate = cell.report.decay_fit->fitted_rate;
        row.theory_lower_rate = cell.report.decay_fit->theory_lower_rate;
      } else if (!cell.result.log.records.empty()) {
        row.theory_lower_rate = oracles::linearized_rate(prep.speed, cell.result.log.records.front().L).theory_lower_rate;
      }
      if (write_diagnostics) {
        std::ofstream csv(stem + ".diagnostics.csv", std::ios::binary | std::ios::trunc);
        write_diagnostics_csv(csv, cell.result.log.records);
      }
    } catch (const Error& e) {
      row.outcome = "Failed";
      report = {{"outcome", "Failed"}, {"failure_reason", e.kind()}, {"failure_message", e.what()}};
    }
    std::ofstream(stem + ".report.json", std::ios::binary | std::ios::trunc) << report.dump(2) << '\n';
  };

  std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CURVEFLOW_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) threads = static_cast<std::size_t>(v);
  }
  threads = std::min(threads, cells);
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < cells; i = next++) work(i);
      });
    }
  }

  std::ofstream agg(out_dir + "/aggregate.csv", std::ios::binary | std::ios::trunc);
  agg << "initial_id,speed_id,outcome,final_kappa_deviation,fitted_rate,theory_lower_rate,max_length_drift\n";
  bool any_failed = false, any_timeout = false;
  for (const auto& r : rows) {
    agg << r.curve_id << ',' << r.speed_id << ',' << r.outcome << ',' << format_double17(r.final_deviation) << ','
        << format_double17(r.fitted_rate) << ',' << format_double17(r.theory_lower_rate) << ','
        << format_double17(r.max_length_drift) << '\n';
    any_failed |= r.outcome == "Failed";
    any_timeout |= r.outcome == "TimedOut";
  }
  if (!agg) {
    err << "failed writing aggregate CSV\n";
    return kExitConfigError;
  }
  if (any_failed) return kExitFailed;
  if (any_timeout) return kExitTimedOut;
  return kExitConverged;
}

int cmd_check_speed(const std::string& spec, std::optional<double> u_lo, std::optional<double> u_hi,
                    std::optional<int> n_samples, std::ostream& out, std::ostream& err) {
  double lo = 1e-4, hi = 1e2;
  int samples = 64;
  try {
    SpeedSpec speed;
    if (spec.rfind("builtin:", 0) == 0) {
      speed = parse_builtin_token(spec);
    } else {
      const auto j = read_json_file(spec);
      speed = parse_speed_spec(j);
      lo = get_optional<double>(j, "u_lo", lo, "speed spec");
      hi = get_optional<double>(j, "u_hi", hi, "speed spec");
      samples = get_optional<int>(j, "n_samples", samples, "speed spec");
    }
    lo = u_lo.value_or(lo);
    hi = u_hi.value_or(hi);
    samples = n_samples.value_or(samples);
    const auto f = build_speed(speed);
    const auto report = check_conditions(f, lo, hi, samples);
    out << to_json(report).dump(2) << '\n';
    if (report.any_fail()) return kExitConditionFail;
    if (report.all_pass()) return kExitConverged;
    return kExitConditionInconclusive;
  } catch (const Error& e) {
    err << "check-speed error (" << e.kind() << "): " << e.what() << '\n';
    return kExitConfigError;
  }
}

int cmd_oracle(const std::string& kind, const OracleArgs& args, std::ostream& out, std::ostream& err) {
  try {
    const auto f = build_speed(parse_builtin_token(args.speed));
    json j;
    j["kind"] = kind;
    if (kind == "linearized_rate") {
      const double L = args.length.value_or(2.0 * kPi);
      const auto r = oracles::linearized_rate(f, L);
      j["speed"] = f.label();
      j["L"] = L;
      j["kappa_bar"] = r.kappa_bar;
      j["theory_lower_rate"] = r.theory_lower_rate;
      j["linearized_rate"] = r.linearized_rate;
    } else if (kind == "quadrature") {
      oracles::Quadrature q;
      j["target"] = args.target;
      if (args.target == "lambda") {
        const double c = args.c.value_or(0.3);
        q = oracles::lambda_cos2(f, c, args.n.value_or(4096));
        j["speed"] = f.label();
        j["c"] = c;
      } else if (args.target == "perimeter" || args.target == "area") {
        const double a = args.a.value_or(2.0), b = args.b.value_or(1.0);
        q = args.target == "perimeter" ? oracles::ellipse_perimeter(a, b, args.n.value_or(8192))
                                       : oracles::ellipse_area(a, b, args.n.value_or(8192));
        j["a"] = a;
        j["b"] = b;
      } else {
        throw InvalidParams("quadrature target must be lambda, perimeter or area");
      }
      j["n"] = q.n;
      j["value"] = q.value;
      j["coarse_value"] = q.coarse;
      j["richardson_gap"] = q.richardson_gap();
    } else {
      throw InvalidParams("oracle kind must be linearized_rate or quadrature");
    }
    out << j.dump(2) << '\n';
    return 0;
  } catch (const Error& e) {
    err << "oracle error (" << e.kind() << "): " << e.what() << '\n';
    return kExitConfigError;
  }
}

int cli_main(int argc, char** argv) {
  CLI::App app{"curveflow: generalized length-preserving curvature flow of convex plane curves"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string run_config;
  auto* run_cmd = app.add_subcommand("run", "Run one flow experiment from a JSON config");
  run_cmd->add_option("config", run_config, "Experiment config (JSON)")->required();

  std::string sweep_config;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a grid of (initial curve, speed) experiments");
  sweep_cmd->add_option("config", sweep_config, "Sweep config (JSON)")->required();

  std::string speed_spec;
  std::optional<double> u_lo, u_hi;
  std::optional<int> samples;
  auto* check_cmd = app.add_subcommand("check-speed", "Screen a speed function against the admissibility conditions");
  check_cmd->add_option("spec", speed_spec, "spec.json or builtin:name[:params]")->required();
  check_cmd->add_option("--u-lo", u_lo, "Lower end of the sample ladder");
  check_cmd->add_option("--u-hi", u_hi, "Upper end of the sample ladder");
  check_cmd->add_option("--samples", samples, "Number of ladder samples");

  std::string oracle_kind;
  OracleArgs oracle_args;
  auto* oracle_cmd = app.add_subcommand("oracle", "Print an independent reference value");
  oracle_cmd->add_option("kind", oracle_kind, "linearized_rate | quadrature")->required();
  oracle_cmd->add_option("--speed", oracle_args.speed, "builtin:name[:params]");
  oracle_cmd->add_option("--length", oracle_args.length, "Curve length L (linearized_rate)");
  oracle_cmd->add_option("--target", oracle_args.target, "lambda | perimeter | area (quadrature)");
  oracle_cmd->add_option("--c", oracle_args.c, "Amplitude c of kappa = 1/(1 - c cos 2theta)");
  oracle_cmd->add_option("--a", oracle_args.a, "Ellipse semi-axis a");
  oracle_cmd->add_option("--b", oracle_args.b, "Ellipse semi-axis b");
  oracle_cmd->add_option("--n", oracle_args.n, "Quadrature points");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigError;
  }

  if (*run_cmd) return cmd_run(run_config, std::cerr);
  if (*sweep_cmd) return cmd_sweep(sweep_config, std::cerr);
  if (*check_cmd) return cmd_check_speed(speed_spec, u_lo, u_hi, samples, std::cout, std::cerr);
  if (*oracle_cmd) return cmd_oracle(oracle_kind, oracle_args, std::cout, std::cerr);
  return kExitConfigError;
}

}  // namespace curveflow
