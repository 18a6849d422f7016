#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "curveflow/analysis.hpp"
#include "curveflow/speed_functions.hpp"

namespace curveflow {

/// Column order of the diagnostics CSV.
inline constexpr std::string_view kDiagnosticsCsvHeader =
    "t,L,A,I,lambda,kappa_min,kappa_max,speed_sup,grad_energy,kappa_deviation,"
    "closing_defect_mod,bonnesen_slack,andrews_slack,phi_max,psi_min,barrier_f";

/// Doubles are written with 17 significant digits so rows parse back exactly.
std::string to_csv_row(const DiagnosticsRecord& r);
void write_diagnostics_csv(std::ostream& out, const std::vector<DiagnosticsRecord>& records);

/// Parses a CSV produced by write_diagnostics_csv. Throws ConfigError on a
/// header mismatch or malformed row.
std::vector<DiagnosticsRecord> read_diagnostics_csv(std::istream& in);

void to_json(nlohmann::json& j, const DiagnosticsRecord& r);
void from_json(const nlohmann::json& j, DiagnosticsRecord& r);

nlohmann::json to_json(const ConditionReport& report);
nlohmann::json to_json(const DecayFit& fit);
nlohmann::json snapshots_to_json(const std::vector<Snapshot>& snapshots);

/// Formats a double with 17 significant digits ("%.17g").
std::string format_double17(double x);

}  // namespace curveflow
