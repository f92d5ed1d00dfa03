#pragma once

// JSON manifold-spec files.
//
// Required keys: dim_n, coords, theta, chart_box, embedding, ambient_J
// ("standard" or a 2N x 2N matrix), reeb_extension (over u1..u2N).
// Optional: reeb, closed_form_tube (over coords + "sigma"), name,
// sigma_max.

#include <cstdint>
#include <string>

#include "adaptube/contact.hpp"

namespace adaptube {

/// Schema violation; pointer() is the JSON pointer of the offending node.
class SchemaError : public SpecError {
 public:
  SchemaError(const std::string& pointer, const std::string& message);
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

class SpecValidationError : public SpecError {
 public:
  explicit SpecValidationError(ValidationReport report);
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

/// Parses and compiles a spec. No validation.
ManifoldSpec spec_from_json(const std::string& text);

/// Reads, parses and (unless validate_samples == 0) validates. Throws
/// SpecError on unreadable files, SchemaError, SpecValidationError.
ManifoldSpec load_manifold_spec(const std::string& path, int validate_samples = 100,
                                std::uint64_t seed = 0);

/// Pretty-printed JSON that spec_from_json reads back to an identical spec.
std::string export_spec(const ManifoldSpec& M);

void save_manifold_spec(const ManifoldSpec& M, const std::string& path);

}  // namespace adaptube
