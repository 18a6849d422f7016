#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <boost/math/special_functions/bessel.hpp>
#include <json.hpp>

#include "curveflow/cli_runner.hpp"
#include "curveflow/errors.hpp"
#include "curveflow/serialization.hpp"
#include "test_support.hpp"

using namespace curveflow;
using namespace curveflow::testing;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("curveflow_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string write_json(const TempDir& dir, const std::string& name, const json& j) {
  const auto file = dir / name;
  std::ofstream(file) << j.dump(2);
  return file;
}

json read_json(const std::string& path) { return json::parse(std::ifstream(path)); }

std::string slurp(const std::string& path) {
  std::ostringstream ss;
  ss << std::ifstream(path).rdbuf();
  return ss.str();
}

json run_config(const TempDir& dir, json curve, json speed, json flow) {
  return {{"initial_curve", std::move(curve)},
          {"speed", std::move(speed)},
          {"flow", std::move(flow)},
          {"outputs", {{"diagnostics_csv", dir / "diag.csv"}, {"report_json", dir / "report.json"}}}};
}

// Support modes of the curve with radius of curvature exp(3 cos 2theta): long, nearly flat sides.
json flat_sided_curve() {
  json modes = json::array();
  for (int m = 1; m <= 16; ++m) {
    const double amp = 2 * boost::math::cyl_bessel_i(m, 3.0) / (4.0 * m * m - 1);
    modes.push_back({{"k", 2 * m}, {"amplitude", amp}, {"phase", kPi}});
  }
  return {{"kind", "fourier"}, {"params", {{"a0", boost::math::cyl_bessel_i(0, 3.0)}, {"modes", modes}}}};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CURVEFLOW_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("cli_runner") {

TEST_CASE("initial curve builders") {
  SUBCASE("circle") {
    const auto s = build_initial("circle", {{"r", 1.5}}, 32);
    for (double p : s.p) CHECK(p == doctest::Approx(1.5));
  }
  SUBCASE("ellipse curvature at the axes") {
    const auto s = build_initial("ellipse", {{"a", 2.0}, {"b", 1.0}}, 64);
    const auto k = curvature_from_support(s);
    CHECK(*std::min_element(k.begin(), k.end()) == doctest::Approx(0.25));  // b / a^2
    CHECK(*std::max_element(k.begin(), k.end()) == doctest::Approx(2.0));   // a / b^2
  }
  SUBCASE("explicit fourier modes") {
    const json params = {{"a0", 1.0}, {"modes", {{{"k", 2}, {"amplitude", 0.1}}, {{"k", 3}, {"amplitude", 0.05}}}}};
    const auto s = build_initial("fourier", params, 64);
    const AngleGrid g(64);
    for (std::size_t j = 0; j < 64; ++j)
      CHECK(s.p[j] == doctest::Approx(1.0 + 0.1 * std::cos(2 * g.theta(j)) + 0.05 * std::cos(3 * g.theta(j))));
  }
  SUBCASE("non-convex fourier input") {
    const json params = {{"a0", 1.0}, {"modes", {{{"k", 2}, {"amplitude", 0.5}}}}};
    try {
      build_initial("fourier", params, 64);
      FAIL("expected NotConvex");
    } catch (const NotConvex& e) {
      CHECK(std::string(e.what()).find("-0.5") != std::string::npos);
    }
  }
  SUBCASE("random fourier is seeded and convex") {
    const json params = {{"a0", 1.0}, {"random", {{"k_max", 6}, {"budget", 0.8}}}};
    const auto a = build_initial("fourier", params, 64, 42);
    const auto b = build_initial("fourier", params, 64, 42);
    const auto c = build_initial("fourier", params, 64, 43);
    CHECK(a.p == b.p);
    CHECK(a.p != c.p);
    const auto rho = curvature_radius(a.p);
    CHECK(*std::min_element(rho.begin(), rho.end()) > 0.0);
  }
  SUBCASE("bad parameters") {
    CHECK_THROWS_AS(build_initial("circle", {{"r", -1.0}}, 32), ConfigError);
    CHECK_THROWS_AS(build_initial("ellipse", {{"a", 1.0}}, 32), ConfigError);
    CHECK_THROWS_AS(build_initial("spiral", json::object(), 32), ConfigError);
  }
}

TEST_CASE("config parsing") {
  TempDir dir;
  const auto cfg = parse_experiment_config(run_config(dir, {{"kind", "ellipse"}, {"params", {{"a", 2}, {"b", 1}}}},
                                                      {{"kind", "power"}, {"params", {0.5}}},
                                                      {{"n", 64}, {"formulation", "curvature"}}));
  CHECK(cfg.flow.n == 64);
  CHECK(cfg.flow.formulation == Formulation::Curvature);
  CHECK(cfg.speed.params == std::vector<double>{0.5});
  CHECK(cfg.enforce_conditions);
  CHECK(build_speed(cfg.speed).label() == "power(0.5)");

  CHECK_THROWS_AS(parse_experiment_config(json::object()), ConfigError);
  CHECK_THROWS_AS(parse_flow_config({{"n", "many"}}), ConfigError);
  CHECK_THROWS_AS(parse_flow_config({{"formulation", "graph"}}), ConfigError);
  CHECK_THROWS_AS(parse_flow_config({{"lambda_rule", "arc_length"}}), ConfigError);
  CHECK_THROWS_AS(parse_curve_spec({{"kind", "polygon"}}), ConfigError);
  CHECK_THROWS_AS(parse_speed_spec({{"kind", "custom"}}), ConfigError);

  const auto tok = parse_builtin_token("builtin:power:2");
  CHECK(tok.kind == "power");
  CHECK(tok.params == std::vector<double>{2.0});
  CHECK(parse_builtin_token("builtin:exp").params.empty());
  CHECK_THROWS_AS(parse_builtin_token("power:2"), ConfigError);
  CHECK_THROWS_AS(parse_builtin_token("builtin:power:x"), ConfigError);
}

TEST_CASE("exit codes cover every outcome") {
  CHECK(exit_code_for(OutcomeStatus::Converged) == 0);
  CHECK(exit_code_for(OutcomeStatus::TimedOut) == 2);
  CHECK(exit_code_for(OutcomeStatus::Failed) == 3);
}

TEST_CASE("diagnostics CSV round trip is exact") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<DiagnosticsRecord> records;
  for (int i = 0; i < 50; ++i) {
    DiagnosticsRecord r;
    double* fields[] = {&r.t, &r.L, &r.A, &r.I, &r.lambda, &r.kappa_min, &r.kappa_max, &r.speed_sup,
                        &r.grad_energy, &r.kappa_deviation, &r.closing_defect_mod, &r.bonnesen_slack,
                        &r.andrews_slack, &r.phi_max, &r.psi_min, &r.barrier_f};
    for (double* f : fields) *f = unit(rng) * std::pow(10.0, 40 * unit(rng));
    records.push_back(r);
  }
  records[0].t = std::numeric_limits<double>::denorm_min();
  records[1].L = std::numeric_limits<double>::max();
  std::stringstream ss;
  write_diagnostics_csv(ss, records);
  CHECK(ss.str().substr(0, kDiagnosticsCsvHeader.size()) == kDiagnosticsCsvHeader);
  CHECK(read_diagnostics_csv(ss) == records);

  std::stringstream bad("t,L\n1,2\n");
  CHECK_THROWS_AS(read_diagnostics_csv(bad), ConfigError);
}

TEST_CASE("diagnostics JSON uses the CSV column names") {
  DiagnosticsRecord r;
  r.t = 0.125;
  r.psi_min = 3.0;
  const json j = r;
  for (const char* col : {"t", "L", "A", "I", "lambda", "kappa_min", "kappa_max", "speed_sup", "grad_energy",
                          "kappa_deviation", "closing_defect_mod", "bonnesen_slack", "andrews_slack", "phi_max",
                          "psi_min", "barrier_f"}) {
    CHECK(j.contains(col));
  }
  CHECK(j.size() == 16);
  CHECK(j.get<DiagnosticsRecord>() == r);
}

TEST_CASE("run command") {
  TempDir dir;
  SUBCASE("converging run writes CSV and report") {
    auto cfg = run_config(dir, {{"kind", "ellipse"}, {"params", {{"a", 2}, {"b", 1}}}},
                          {{"kind", "power"}, {"params", {1}}}, {{"n", 64}, {"t_max", 60}, {"record_every", 50}});
    cfg["outputs"]["snapshots_json"] = dir / "snap.json";
    cfg["flow"]["snapshot_every"] = 1000;
    std::ostringstream err;
    CHECK(cmd_run(write_json(dir, "cfg.json", cfg), err) == 0);
    const auto report = read_json(dir / "report.json");
    CHECK(report["outcome"] == "Converged");
    CHECK(report["final_kappa_deviation"].get<double>() < 1e-8);
    CHECK(report["final_summary"]["L"].get<double>() == doctest::Approx(ellipse_perimeter_exact(2, 1)).epsilon(1e-9));
    CHECK(report["violations"]["max_length_drift"].get<double>() < 1e-9);
    CHECK(report["conditions"]["verdicts"]["ii"]["status"] == "pass");
    CHECK_FALSE(report["decay_fit"].is_null());
    std::ifstream csv(dir / "diag.csv");
    const auto records = read_diagnostics_csv(csv);
    CHECK(records.size() >= 2);
    CHECK(records.back().kappa_deviation < 1e-8);
    CHECK(read_json(dir / "snap.json").size() >= 2);
  }
  SUBCASE("timeout") {
    const auto cfg = run_config(dir, {{"kind", "ellipse"}, {"params", {{"a", 2}, {"b", 1}}}},
                                {{"kind", "exp"}}, {{"n", 64}, {"t_max", 0.1}});
    std::ostringstream err;
    CHECK(cmd_run(write_json(dir, "cfg.json", cfg), err) == 2);
    CHECK(read_json(dir / "report.json")["outcome"] == "TimedOut");
  }
  SUBCASE("inadmissible speed is refused when conditions are enforced") {
    const auto cfg = run_config(dir, {{"kind", "ellipse"}, {"params", {{"a", 2}, {"b", 1}}}},
                                {{"kind", "custom"}, {"expr", "-1/u"}}, {{"n", 64}, {"t_max", 1}});
    std::ostringstream err;
    CHECK(cmd_run(write_json(dir, "cfg.json", cfg), err) == 3);
    const auto report = read_json(dir / "report.json");
    CHECK(report["outcome"] == "Failed");
    CHECK(report["failure_reason"] == "ConditionsViolated");
    CHECK(report["conditions"]["verdicts"]["ii"]["status"] == "fail");
  }
  SUBCASE("without enforcement the failed conditions are only noted") {
    auto cfg = run_config(dir, {{"kind", "ellipse"}, {"params", {{"a", 2}, {"b", 1}}}},
                          {{"kind", "custom"}, {"expr", "-1/u"}}, {{"n", 64}, {"t_max", 0.5}});
    cfg["enforce_conditions"] = false;
    std::ostringstream err;
    CHECK(cmd_run(write_json(dir, "cfg.json", cfg), err) != 1);
    const auto report = read_json(dir / "report.json");
    CHECK(report["conditions"]["verdicts"]["ii"]["status"] == "fail");
    CHECK(report["failure_reason"] != "ConditionsViolated");
  }
  SUBCASE("inadmissible speed loses convexity when forced") {
    auto cfg = run_config(dir, flat_sided_curve(), {{"kind", "custom"}, {"expr", "-1/u"}},
                          {{"n", 128}, {"t_max", 1}});
    cfg["enforce_conditions"] = false;
    std::ostringstream err;
    CHECK(cmd_run(write_json(dir, "cfg.json", cfg), err) == 3);
    const auto report = read_json(dir / "report.json");
    CHECK(report["failure_reason"] == "ConvexityLost");
    std::ifstream csv(dir / "diag.csv");
    CHECK(read_diagnostics_csv(csv).back().t < 1.0);
  }
  SUBCASE("configuration errors") {
    std::ostringstream err;
    std::ofstream(dir / "broken.json") << "{ not json";
    CHECK(cmd_run(dir / "broken.json", err) == 1);
    CHECK(cmd_run(dir / "missing.json", err) == 1);
    auto cfg = run_config(dir, {{"kind", "fourier"}, {"params", {{"a0", 1}, {"modes", {{{"k", 2}, {"amplitude", 0.5}}}}}}},
                          {{"kind", "power"}, {"params", {1}}}, {{"n", 64}});
    CHECK(cmd_run(write_json(dir, "nonconvex.json", cfg), err) == 1);
    cfg = run_config(dir, {{"kind", "circle"}, {"params", {{"r", 1}}}}, {{"kind", "power"}, {"params", {1}}}, {{"n", 63}});
    CHECK(cmd_run(write_json(dir, "odd.json", cfg), err) == 1);
    cfg = run_config(dir, {{"kind", "circle"}, {"params", {{"r", 1}}}}, {{"kind", "custom"}, {"expr", "u +"}}, {{"n", 64}});
    CHECK(cmd_run(write_json(dir, "expr.json", cfg), err) == 1);
    CHECK_FALSE(err.str().empty());
  }
}

TEST_CASE("sweep command") {
  TempDir dir;
  const json curves = {{{"id", "circle"}, {"kind", "circle"}, {"params", {{"r", 1}}}},
                       {{"id", "ellipse"}, {"kind", "ellipse"}, {"params", {{"a", 1.5}, {"b", 1}}}},
                       {{"id", "wavy"}, {"kind", "fourier"}, {"params", {{"a0", 1}, {"modes", {{{"k", 2}, {"amplitude", 0.1}}, {{"k", 3}, {"amplitude", 0.05}}}}}}}};
  const json speeds = {{{"kind", "power"}, {"params", {1}}}, {{"kind", "log1p"}}, {{"kind", "exp"}},
                       {{"kind", "linear_plus_sine"}}, {{"kind", "sq_log_plus_linear"}}};
  const json flow = {{"n", 64}, {"t_max", 80}, {"record_every", 100}};

  SUBCASE("grid of builtins converges and is deterministic") {
    std::ostringstream err;
    const json sweep = {{"initial_curves", curves}, {"speeds", speeds}, {"flow", flow}, {"output_dir", dir / "a"}};
    REQUIRE(cmd_sweep(write_json(dir, "sweep.json", sweep), err) == 0);
    int reports = 0;
    for (const auto& entry : fs::directory_iterator(dir.path / "a")) {
      if (entry.path().string().ends_with(".report.json")) {
        ++reports;
        CHECK(read_json(entry.path().string())["outcome"] == "Converged");
      }
    }
    CHECK(reports == 15);

    json again = sweep;
    again["output_dir"] = dir / "b";
    REQUIRE(cmd_sweep(write_json(dir, "sweep2.json", again), err) == 0);
    CHECK(slurp(dir / "a/aggregate.csv") == slurp(dir / "b/aggregate.csv"));
  }
  SUBCASE("empty grid") {
    std::ostringstream err;
    const json sweep = {{"initial_curves", json::array()}, {"speeds", speeds}, {"flow", flow}, {"output_dir", dir / "e"}};
    CHECK(cmd_sweep(write_json(dir, "empty.json", sweep), err) == 1);
  }
}

TEST_CASE("check-speed command") {
  TempDir dir;
  std::ostringstream out, err;
  CHECK(cmd_check_speed("builtin:power:2", {}, {}, {}, out, err) == 0);
  const auto custom = write_json(dir, "neg.json", {{"kind", "custom"}, {"expr", "-1/u"}, {"u_lo", 1.0}, {"u_hi", 100.0}});
  out.str("");
  CHECK(cmd_check_speed(custom, {}, {}, {}, out, err) == 4);
  const auto report = json::parse(out.str());
  CHECK(report["verdicts"]["ii"]["status"] == "fail");
  CHECK(report["verdicts"]["ii"]["witness"]["u"].get<double>() == doctest::Approx(1.0));
  CHECK(cmd_check_speed("builtin:exp", 0.5, 2.0, {}, out, err) == 5);
  CHECK(cmd_check_speed("builtin:cubic", {}, {}, {}, out, err) == 1);
  CHECK(cmd_check_speed("builtin:power", {}, {}, {}, out, err) == 1);
}

TEST_CASE("oracle command") {
  std::ostringstream out, err;
  OracleArgs args;
  REQUIRE(cmd_oracle("linearized_rate", args, out, err) == 0);
  CHECK(json::parse(out.str())["linearized_rate"].get<double>() == doctest::Approx(3.0));

  out.str("");
  args.c = 0.3;
  REQUIRE(cmd_oracle("quadrature", args, out, err) == 0);
  CHECK(json::parse(out.str())["value"].get<double>() == doctest::Approx(1.0 / std::sqrt(0.91)).epsilon(1e-12));

  out.str("");
  args.target = "perimeter";
  REQUIRE(cmd_oracle("quadrature", args, out, err) == 0);
  CHECK(json::parse(out.str())["value"].get<double>() == doctest::Approx(ellipse_perimeter_exact(2, 1)).epsilon(1e-12));

  CHECK(cmd_oracle("nonsense", args, out, err) == 1);
}

TEST_CASE("executable") {
  CHECK(run_cli("--version") == 0);
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("check-speed builtin:power:2") == 0);
  CHECK(run_cli("check-speed builtin:exp --u-lo 0.5 --u-hi 2") == 5);
  CHECK(run_cli("run /nonexistent/config.json") == 1);
  CHECK(run_cli("frobnicate") != 0);
}

}
