#include "curveflow/serialization.hpp"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

#include "curveflow/errors.hpp"

namespace curveflow {

namespace {

// Field table shared by the CSV and JSON encoders; order matches the header.
constexpr std::array<std::pair<const char*, double DiagnosticsRecord::*>, 16> kFields{{
    {"t", &DiagnosticsRecord::t},
    {"L", &DiagnosticsRecord::L},
    {"A", &DiagnosticsRecord::A},
    {"I", &DiagnosticsRecord::I},
    {"lambda", &DiagnosticsRecord::lambda},
    {"kappa_min", &DiagnosticsRecord::kappa_min},
    {"kappa_max", &DiagnosticsRecord::kappa_max},
    {"speed_sup", &DiagnosticsRecord::speed_sup},
    {"grad_energy", &DiagnosticsRecord::grad_energy},
    {"kappa_deviation", &DiagnosticsRecord::kappa_deviation},
    {"closing_defect_mod", &DiagnosticsRecord::closing_defect_mod},
    {"bonnesen_slack", &DiagnosticsRecord::bonnesen_slack},
    {"andrews_slack", &DiagnosticsRecord::andrews_slack},
    {"phi_max", &DiagnosticsRecord::phi_max},
    {"psi_min", &DiagnosticsRecord::psi_min},
    {"barrier_f", &DiagnosticsRecord::barrier_f},
}};

nlohmann::json sample_json(const ConditionSample& s) {
  return {{"u", s.u}, {"F", s.f}, {"dF", s.df}, {"dF_u", s.df_u}, {"dF_u2_over_F", s.df_u2_over_f}};
}

}  // namespace

std::string format_double17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string to_csv_row(const DiagnosticsRecord& r) {
  std::string row;
  for (std::size_t i = 0; i < kFields.size(); ++i) {
    if (i) row += ',';
    row += format_double17(r.*kFields[i].second);
  }
  return row;
}

void write_diagnostics_csv(std::ostream& out, const std::vector<DiagnosticsRecord>& records) {
  out << kDiagnosticsCsvHeader << '\n';
  for (const auto& r : records) out << to_csv_row(r) << '\n';
}

std::vector<DiagnosticsRecord> read_diagnostics_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kDiagnosticsCsvHeader) {
    throw ConfigError("diagnostics CSV header mismatch");
  }
  std::vector<DiagnosticsRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    DiagnosticsRecord r;
    std::istringstream row(line);
    std::string cell;
    std::size_t i = 0;
    while (std::getline(row, cell, ',')) {
      if (i >= kFields.size()) throw ConfigError("too many columns in diagnostics CSV row");
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0') throw ConfigError("malformed number '" + cell + "' in diagnostics CSV");
      r.*kFields[i].second = v;
      ++i;
    }
    if (i != kFields.size()) throw ConfigError("too few columns in diagnostics CSV row");
    records.push_back(r);
  }
  return records;
}

void to_json(nlohmann::json& j, const DiagnosticsRecord& r) {
  j = nlohmann::json::object();
  for (const auto& [name, field] : kFields) j[name] = r.*field;
}

void from_json(const nlohmann::json& j, DiagnosticsRecord& r) {
  for (const auto& [name, field] : kFields) r.*field = j.at(name).get<double>();
}

nlohmann::json to_json(const ConditionReport& report) {
  nlohmann::json j;
  j["speed"] = report.speed;
  j["u_lo"] = report.u_lo;
  j["u_hi"] = report.u_hi;
  j["samples"] = nlohmann::json::array();
  for (const auto& s : report.samples) j["samples"].push_back(sample_json(s));
  static constexpr std::array<const char*, 3> kNames{"i", "ii", "iii"};
  j["verdicts"] = nlohmann::json::object();
  for (std::size_t c = 0; c < 3; ++c) {
    const auto& v = report.verdicts[c];
    nlohmann::json entry{{"status", std::string(verdict_name(v.status))}, {"detail", v.detail}};
    entry["witness"] = v.witness ? sample_json(*v.witness) : nlohmann::json(nullptr);
    j["verdicts"][kNames[c]] = entry;
  }
  j["notes"] = report.notes;
  j["all_pass"] = report.all_pass();
  j["any_fail"] = report.any_fail();
  return j;
}

nlohmann::json to_json(const DecayFit& fit) {
  return {{"t0", fit.t0},
          {"t1", fit.t1},
          {"fitted_rate", fit.fitted_rate},
          {"amplitude_rate", fit.amplitude_rate},
          {"r_squared", fit.r_squared},
          {"theory_lower_rate", fit.theory_lower_rate},
          {"linearized_rate", fit.linearized_rate},
          {"records_used", fit.records_used}};
}

nlohmann::json snapshots_to_json(const std::vector<Snapshot>& snapshots) {
  auto arr = nlohmann::json::array();
  for (const auto& s : snapshots) arr.push_back({{"t", s.t}, {"p", s.p}});
  return arr;
}

}  // namespace curveflow
