#include "adaptube/spec_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace adaptube {

using json = nlohmann::ordered_json;

SchemaError::SchemaError(const std::string& pointer, const std::string& message)
    : SpecError("schema error at " + pointer + ": " + message), pointer_(pointer) {}

SpecValidationError::SpecValidationError(ValidationReport report)
    : SpecError("spec validation failed: " + report.summary()), report_(std::move(report)) {}

namespace {

const json& require(const json& j, const std::string& key) {
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError("/" + key, "missing required key");
  return *it;
}

std::vector<std::string> string_array(const json& j, const std::string& ptr) {
  if (!j.is_array()) throw SchemaError(ptr, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_string()) throw SchemaError(ptr + "/" + std::to_string(i), "expected a string");
    out.push_back(j[i].get<std::string>());
  }
  return out;
}

std::vector<ScalarExpr> expr_array(const json& j, const std::string& ptr,
                                   const std::vector<std::string>& coords) {
  std::vector<std::string> texts = string_array(j, ptr);
  std::vector<ScalarExpr> out;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    try {
      out.push_back(ScalarExpr::parse(texts[i], coords));
    } catch (const std::exception& e) {
      throw SchemaError(ptr + "/" + std::to_string(i), e.what());
    }
  }
  return out;
}

double number(const json& j, const std::string& ptr) {
  if (!j.is_number()) throw SchemaError(ptr, "expected a number");
  return j.get<double>();
}

json sources(const std::vector<ScalarExpr>& es) {
  json a = json::array();
  for (const auto& e : es) a.push_back(e.source());
  return a;
}

}  // namespace

ManifoldSpec spec_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("", std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw SchemaError("", "top level must be an object");

  ManifoldSpec M;
  const json& n = require(j, "dim_n");
  if (!n.is_number_integer() || n.get<int>() < 1) throw SchemaError("/dim_n", "expected a positive integer");
  M.n = n.get<int>();
  M.name = "custom";
  if (j.contains("name")) {
    if (!j["name"].is_string()) throw SchemaError("/name", "expected a string");
    M.name = j["name"].get<std::string>();
  }

  M.coords = string_array(require(j, "coords"), "/coords");
  if (static_cast<int>(M.coords.size()) != M.dim())
    throw SchemaError("/coords", "expected " + std::to_string(M.dim()) + " identifiers");
  const json& theta = require(j, "theta");
  const json& box = require(j, "chart_box");
  const json& emb = require(j, "embedding");
  const json& K = require(j, "ambient_J");
  const json& ext = require(j, "reeb_extension");

  M.theta = expr_array(theta, "/theta", M.coords);
  if (static_cast<int>(M.theta.size()) != M.dim())
    throw SchemaError("/theta", "expected one component per coordinate");

  if (!box.is_array() || static_cast<int>(box.size()) != M.dim())
    throw SchemaError("/chart_box", "expected one [lo, hi] pair per coordinate");
  for (std::size_t i = 0; i < box.size(); ++i) {
    const std::string ptr = "/chart_box/" + std::to_string(i);
    if (!box[i].is_array() || box[i].size() != 2) throw SchemaError(ptr, "expected [lo, hi]");
    Interval iv{number(box[i][0], ptr + "/0"), number(box[i][1], ptr + "/1")};
    if (!(iv.lo < iv.hi)) throw SchemaError(ptr, "lo must be < hi");
    M.chart_box.push_back(iv);
  }

  M.embedding = expr_array(emb, "/embedding", M.coords);
  const int N2 = static_cast<int>(M.embedding.size());
  if (N2 != M.dim() + 1) throw SchemaError("/embedding", "expected " + std::to_string(M.dim() + 1) + " components");

  if (K.is_string()) {
    if (K.get<std::string>() != "standard") throw SchemaError("/ambient_J", "expected \"standard\" or a matrix");
    M.ambient_J = standard_complex_structure(N2);
    M.standard_J = true;
  } else {
    if (!K.is_array() || static_cast<int>(K.size()) != N2)
      throw SchemaError("/ambient_J", "expected a " + std::to_string(N2) + "x" + std::to_string(N2) + " matrix");
    M.ambient_J.resize(N2, N2);
    for (int r = 0; r < N2; ++r) {
      const std::string ptr = "/ambient_J/" + std::to_string(r);
      if (!K[r].is_array() || static_cast<int>(K[r].size()) != N2) throw SchemaError(ptr, "row has wrong length");
      for (int c = 0; c < N2; ++c) M.ambient_J(r, c) = number(K[r][c], ptr + "/" + std::to_string(c));
    }
    M.standard_J = M.ambient_J == standard_complex_structure(N2);
  }

  M.reeb_extension = expr_array(ext, "/reeb_extension", ambient_coordinate_names(N2));
  if (static_cast<int>(M.reeb_extension.size()) != N2)
    throw SchemaError("/reeb_extension", "expected one component per ambient coordinate");

  if (j.contains("reeb")) {
    M.reeb = expr_array(j["reeb"], "/reeb", M.coords);
    if (static_cast<int>(M.reeb->size()) != M.dim()) throw SchemaError("/reeb", "expected one component per coordinate");
  }
  if (j.contains("closed_form_tube")) {
    M.closed_form_tube = expr_array(j["closed_form_tube"], "/closed_form_tube", M.tube_coords());
    if (static_cast<int>(M.closed_form_tube->size()) != N2)
      throw SchemaError("/closed_form_tube", "expected one component per ambient coordinate");
  }
  if (j.contains("sigma_max")) {
    M.default_sigma_max = number(j["sigma_max"], "/sigma_max");
    if (!(M.default_sigma_max > 0.0)) throw SchemaError("/sigma_max", "must be positive");
  }
  M.finalize();
  return M;
}

ManifoldSpec load_manifold_spec(const std::string& path, int validate_samples, std::uint64_t seed) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot read spec file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  ManifoldSpec M = spec_from_json(ss.str());
  if (validate_samples > 0) {
    ValidationReport r = validate_spec(M, validate_samples, seed);
    if (!r.pass()) throw SpecValidationError(std::move(r));
  }
  return M;
}

std::string export_spec(const ManifoldSpec& M) {
  json j;
  j["name"] = M.name;
  j["dim_n"] = M.n;
  j["coords"] = M.coords;
  j["theta"] = sources(M.theta);
  json box = json::array();
  for (const auto& iv : M.chart_box) box.push_back({iv.lo, iv.hi});
  j["chart_box"] = box;
  j["embedding"] = sources(M.embedding);
  if (M.standard_J) {
    j["ambient_J"] = "standard";
  } else {
    json K = json::array();
    for (Eigen::Index r = 0; r < M.ambient_J.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < M.ambient_J.cols(); ++c) row.push_back(M.ambient_J(r, c));
      K.push_back(row);
    }
    j["ambient_J"] = K;
  }
  j["reeb_extension"] = sources(M.reeb_extension);
  if (M.reeb) j["reeb"] = sources(*M.reeb);
  if (M.closed_form_tube) j["closed_form_tube"] = sources(*M.closed_form_tube);
  j["sigma_max"] = M.default_sigma_max;
  return j.dump(2) + "\n";
}

void save_manifold_spec(const ManifoldSpec& M, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw SpecError("cannot write spec file '" + path + "'");
  out << export_spec(M);
}

}  // namespace adaptube
