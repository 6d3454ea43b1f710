#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "defectlab/model.hpp"

namespace defectlab {

extern const char* const kReportSchemaVersion;

// Everything a run needs, serializable so that config + seed reproduces the
// report byte for byte (wall-times aside).
struct RunConfig {
  double a2 = 1.0;
  double b2 = 1.0;
  double c2 = 1.0;
  int k = 1;
  bool whole_plane = false;
  double radius = 20.0;  // disk radius; ignored when whole_plane
  double r_eff = 0.0;    // whole-plane truncation override, 0 picks the default
  int n_elements = 512;
  std::string grading = "geometric";  // or "uniform"
  double grading_ratio = 1.5;
  double tol = 1e-10;
  std::vector<std::string> analyses;  // subset of {diagnose, stability, modes, check2d, uniqueness}
  std::string out;  // artifact directory; empty writes nothing
  std::uint64_t seed = 1;
  int jobs = 1;

  ModelParams params() const { return {a2, b2, c2, k}; }
  void validate() const;  // throws std::invalid_argument on bad fields
  bool operator==(const RunConfig&) const = default;
};

std::string serialize_config(const RunConfig& config);
RunConfig parse_config_json(const std::string& text);

struct RunOutcome {
  std::string report_json;
  bool all_verdicts_ok = true;
  std::vector<std::string> artifacts;  // paths written, report first
};

// Solve, run the requested analyses, and assemble the report. Artifacts are
// written under config.out when it is nonempty. Hard numeric failures
// propagate as the module exceptions with the failing stage prefixed;
// tolerance misses only clear all_verdicts_ok.
RunOutcome run(const RunConfig& config);

struct SweepOutcome {
  std::vector<std::string> reports;  // per value; empty string when that run failed
  std::vector<std::string> errors;   // per value; empty string when that run succeeded
  std::string aggregate_csv;
};

// Independent runs with the axis field substituted per value; failures are
// isolated per run. Axis is one of b2, R, k, n_elements.
SweepOutcome sweep(const RunConfig& base, const std::string& axis,
                   const std::vector<double>& values);

// Structural schema check of an emitted report; returns the list of problems,
// empty when the report validates.
std::vector<std::string> validate_report(const std::string& report_json);

}  // namespace defectlab
