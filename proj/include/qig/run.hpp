// run.hpp - experiment driver behind the qig command-line tool
//
// Each command evaluates a set of bounded checks and emits a JSON report:
//
//   {"schema": "qig-report/1", "version": ..., "command": ...,
//    "config": {...}, "tolerances": {...}, "checks": [...],
//    "details": {...}, "verdict": "pass"|"fail", "wall_clock_seconds": ...}
//
// Everything except wall_clock_seconds is a deterministic function of the
// config.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qig/errors.hpp"

namespace qig {

inline constexpr const char* kReportSchema = "qig-report/1";
inline constexpr const char* kVersion = "0.1.0";

class UsageError : public Error {
 public:
  using Error::Error;
};

// Commands: bkm-equivalence, duality-scan, monotonicity, flatness, legendre, all.
const std::vector<std::string>& known_commands();

// Default tolerance table; keys accepted by --tolerance.
const std::map<std::string, double>& default_tolerances();

struct RunConfig {
  std::string command;
  int dim = 2;
  int samples = 20;
  int trials = 200;
  std::uint64_t seed = 1;
  std::map<std::string, double> tolerance_overrides;
  // Empty selects the command's default family.
  std::vector<std::string> functions;
  std::optional<std::string> out;
  bool csv = false;

  // Throws UsageError for an unknown command, dim < 2, samples < 1,
  // trials < 1 or an unknown tolerance key.
  void validate() const;
};

struct CheckRecord {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  // "<", "<=" or ">": the check passes when value <relation> bound.
  std::string relation;
  bool pass = false;
};

struct ExperimentReport {
  RunConfig config;
  std::map<std::string, double> tolerances;
  std::vector<CheckRecord> checks;
  nlohmann::json details = nlohmann::json::object();
  // Witness table rows for --csv: kind, label, index, value.
  std::vector<std::vector<std::string>> csv_rows;
  double wall_clock_seconds = 0.0;

  bool pass() const;
  // Full report including wall clock.
  nlohmann::json to_json() const;
  // Report without the wall-clock field.
  nlohmann::json body() const;
  std::string csv() const;
};

ExperimentReport run(const RunConfig& config);

}  // namespace qig
