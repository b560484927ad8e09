#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "beamfe/benchmarks.hpp"

namespace beamfe::report {

/// 64-bit FNV-1a hash of a byte string.
std::uint64_t fnv1a(const std::string& text);

/// Canonical configuration string of a row (name, parameters, library
/// version); its FNV-1a hash identifies the configuration in reports.
std::string config_string(const bench::CaseRow& row);
std::uint64_t config_hash(const bench::CaseRow& row);

/// CSV table with the fixed header
/// benchmark,k,nelem,rho,integration,e_l2,rate,u1,u2,u3,newton_total_iters,wall_ms
/// one row per case; undefined numbers are written as nan.
std::string to_csv(const std::vector<bench::CaseRow>& rows);

/// JSON document with version, per-row configuration hashes, the CSV
/// columns, the sampled centerline, and any recorded series.
std::string to_json(const std::vector<bench::CaseRow>& rows);

/// Parses a document produced by to_json back into rows (centerline and
/// series included). Throws ParseError on malformed input.
std::vector<bench::CaseRow> rows_from_json(const std::string& text);

const char* scheme_name(IntegrationScheme scheme);
IntegrationScheme scheme_from_name(const std::string& name);

}  // namespace beamfe::report
