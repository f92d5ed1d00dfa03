#pragma once

// The verification driver: loads a manifold, builds its tube and runs every
// check over Halton samples, producing a report.

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adaptube/flows.hpp"

namespace adaptube {

struct RunConfig {
  std::string example;    // registry name, or empty when spec_path is set
  std::string spec_path;
  int n = 1;
  std::optional<double> sigma_max;  // default: the spec's own
  int samples = 1000;
  std::uint64_t seed = 0;
  std::map<std::string, double> tolerances;  // overrides by check name
  IntegratorConfig integrator;

  void validate() const;
};

struct CheckReport {
  std::string name;
  int samples = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::vector<double> worst_point;
  std::string error;
  double timing_ms = 0.0;
};

struct Report {
  std::string version;
  RunConfig config;
  std::string manifold;
  double sigma_max = 0.0;
  std::string tube;  // "closed-form" or "flow"
  std::vector<CheckReport> checks;
  bool overall_pass = false;
};

/// Check names in report order.
const std::vector<std::string>& check_names();

/// Defaults for a manifold; the Heisenberg examples get the tighter set.
std::map<std::string, double> default_tolerances(const std::string& manifold);

/// Runs the suite. Spec loading and config problems throw SpecError or
/// std::invalid_argument; failures inside a check are recorded in it.
Report run_verify(const RunConfig& cfg);

std::string report_to_json(const Report& r, bool include_timing = true);
std::string report_to_csv(const Report& r, bool include_timing = true);

std::string integrator_name(IntegratorMethod m);
IntegratorMethod parse_integrator(const std::string& name);

}  // namespace adaptube
