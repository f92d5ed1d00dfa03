#pragma once

// Pseudo-Hermitian manifold descriptions, the builtin examples, the Reeb
// field solver and contact/CR validity checks.

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "adaptube/exterior.hpp"
#include "adaptube/expr.hpp"
#include "adaptube/sampling.hpp"
#include "adaptube/smooth_map.hpp"

namespace adaptube {

class SingularContact : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateContact : public std::runtime_error {
 public:
  DegenerateContact(const std::string& what, double value)
      : std::runtime_error(what), value_(value) {}
  double value() const { return value_; }

 private:
  double value_;
};

class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Embedded chart of a pseudo-Hermitian manifold of dimension 2n+1 with
/// everything needed to build and verify tubes over it.
struct ManifoldSpec {
  std::string name;
  int n = 1;
  std::vector<std::string> coords;
  std::vector<ScalarExpr> theta;               // components per coordinate
  Box chart_box;
  std::vector<ScalarExpr> embedding;           // 2N components over coords
  Eigen::MatrixXd ambient_J;                   // constant, J^2 = -I
  bool standard_J = true;
  std::vector<ScalarExpr> reeb_extension;      // over ambient_coords()
  std::optional<std::vector<ScalarExpr>> reeb; // optional closed form
  /// Optional closed-form tube map over coords + "sigma".
  std::optional<std::vector<ScalarExpr>> closed_form_tube;
  double default_sigma_max = 0.3;

  // Compiled from the expressions by finalize().
  SmoothMap theta_map;
  SmoothMap embedding_map;
  SmoothMap extension_map;
  std::optional<SmoothMap> reeb_map;
  std::optional<SmoothMap> tube_map;

  int dim() const { return 2 * n + 1; }
  int ambient_dim() const { return static_cast<int>(embedding.size()); }
  std::vector<std::string> ambient_coords() const;
  std::vector<std::string> tube_coords() const;

  /// Checks shapes and compiles the maps. Throws SpecError.
  void finalize();
};

/// Multiplication by i on C^N with real coordinates (x1, y1, ..., xN, yN).
Eigen::MatrixXd standard_complex_structure(int ambient_dim);

/// Ambient coordinate names u1..u{2N}.
std::vector<std::string> ambient_coordinate_names(int ambient_dim);

// ---- registry --------------------------------------------------------------

struct ExampleInfo {
  std::string name;
  int n;
  int dim;
};

/// Heisenberg group in coordinates (x_1..x_n, y_1..y_n, t) with
/// theta = dt + sum(x_j dy_j - y_j dx_j) on the quadric Im w = |z|^2.
ManifoldSpec heisenberg(int n);

/// Unit sphere S^{2n+1} in C^{n+1}, stereographic chart centred at
/// (1, 0, ..., 0), theta the restriction of sum(x_j dy_j - y_j dx_j).
ManifoldSpec sphere(int n);

/// Stable listing of every builtin example.
std::vector<ExampleInfo> list_examples();

/// Builds a registry entry and checks it; throws SpecError for unknown
/// names or entries failing validation.
ManifoldSpec make_example(const std::string& name, int n);

// ---- contact geometry ------------------------------------------------------

FormField theta_form(const ManifoldSpec& M);

/// Unique xi with theta(xi) = 1 and d theta(xi, .) = 0. Rows of d theta used
/// in the square solve are chosen by pivoted QR unless given explicitly.
Eigen::VectorXd reeb_field(const ManifoldSpec& M, const Eigen::VectorXd& p);
Eigen::VectorXd reeb_field(const ManifoldSpec& M, const Eigen::VectorXd& p,
                           std::span<const int> dtheta_rows);

/// The Reeb field as a differentiable vector field (up to second order).
VectorField reeb_vector_field(const ManifoldSpec& M);

/// Top coefficient of theta ^ (d theta)^n in chart coordinate order.
double contact_volume(const ManifoldSpec& M, const Eigen::VectorXd& p);

/// Orthonormal basis of ker theta_p.
std::vector<Eigen::VectorXd> levi_distribution(const ManifoldSpec& M, const Eigen::VectorXd& p);

/// Max distance of J_amb Dj(v) from Dj(H_p) over the Levi basis v.
double levi_closure_residual(const ManifoldSpec& M, const Eigen::VectorXd& p);

/// Max |Dj(xi_0) - xi_ext(j(p))|.
double reeb_extension_residual(const ManifoldSpec& M, const Eigen::VectorXd& p);

struct ValidationItem {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationItem> items;
  bool pass() const;
  const ValidationItem* find(const std::string& name) const;
  std::string summary() const;
};

ValidationReport validate_spec(const ManifoldSpec& M, int samples, std::uint64_t seed = 0);

}  // namespace adaptube
