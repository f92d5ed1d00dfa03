#pragma once

// Pointwise exterior algebra over R^m (m <= 8) and the field operators d and
// the Lie bracket.
//
// Conventions:
//  * A k-form is stored by its coefficients on the increasing multi-indices
//    i_1 < ... < i_k, in lexicographic order.
//  * (dx_{i_1} ^ ... ^ dx_{i_k})(v_1, ..., v_k) = det[v_j(i_l)], so
//    (dx ^ dy)(e_1, e_2) = 1.
//  * Interior products contract the first argument slot.

#include <Eigen/Dense>

#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "adaptube/smooth_map.hpp"

namespace adaptube {

inline constexpr int kMaxFormDim = 8;

/// Increasing multi-indices of a given (dim, degree), each encoded as a
/// bitmask, with the inverse lookup table.
class IndexTable {
 public:
  static const IndexTable& get(int dim, int degree);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  int size() const { return static_cast<int>(masks_.size()); }
  std::uint32_t mask(int position) const { return masks_[position]; }
  int position(std::uint32_t mask) const { return lookup_[mask]; }
  std::vector<int> indices(int position) const;

 private:
  IndexTable(int dim, int degree);
  int dim_;
  int degree_;
  std::vector<std::uint32_t> masks_;
  std::vector<int> lookup_;
};

class AltForm {
 public:
  AltForm(int dim, int degree);
  AltForm(int dim, int degree, std::vector<double> coefficients);

  /// dx_{i_1} ^ ... ^ dx_{i_k}; indices need not be sorted (sign applied).
  static AltForm basis(int dim, std::initializer_list<int> indices);
  static AltForm scalar(int dim, double value);
  static AltForm one_form(std::span<const double> components);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  int size() const { return static_cast<int>(coeffs_.size()); }
  const std::vector<double>& coefficients() const { return coeffs_; }
  double operator[](int position) const { return coeffs_[position]; }
  double& operator[](int position) { return coeffs_[position]; }

  /// Coefficient on sorted indices.
  double coefficient(std::span<const int> sorted_indices) const;

  /// Coefficient of dx_1 ^ ... ^ dx_m (degree must equal dim).
  double top() const;

  double norm() const;
  double max_abs() const;

  AltForm operator+(const AltForm& other) const;
  AltForm operator-(const AltForm& other) const;
  AltForm operator*(double s) const;

  /// Antisymmetric matrix B(i,j) = a(e_i, e_j) of a 2-form.
  Eigen::MatrixXd as_matrix() const;
  static AltForm from_matrix(const Eigen::MatrixXd& antisymmetric);

 private:
  int dim_;
  int degree_;
  std::vector<double> coeffs_;
};

AltForm wedge(const AltForm& a, const AltForm& b);
AltForm wedge_power(const AltForm& a, int k);
double eval_form(const AltForm& a, std::span<const Eigen::VectorXd> vectors);
AltForm interior_product(const Eigen::VectorXd& v, const AltForm& a);
/// L maps the source space into R^{a.dim()}; result lives on the source.
AltForm pullback(const AltForm& a, const Eigen::MatrixXd& L);

/// Smooth k-form field: one component per increasing multi-index, packed
/// into a single vector-valued map.
struct FormField {
  int dim = 0;
  int degree = 0;
  SmoothMap components;

  AltForm at(const Eigen::VectorXd& x) const;
};

FormField make_form_field(int dim, int degree, SmoothMap components);

/// (dw)_x, using first partials of the components.
AltForm exterior_derivative(const FormField& w, const Eigen::VectorXd& x);
/// dw as a field, itself differentiable one level less deep than w.
FormField exterior_derivative_field(const FormField& w);

/// A vector field is a map R^m -> R^m.
using VectorField = SmoothMap;

/// [X,Y]^k = sum_j X^j d_j Y^k - Y^j d_j X^k.
Eigen::VectorXd lie_bracket(const VectorField& X, const VectorField& Y,
                            const Eigen::VectorXd& x);

/// Bracket from pointwise jets: values and Jacobians (row = component).
Eigen::VectorXd lie_bracket(const Eigen::VectorXd& X, const Eigen::MatrixXd& DX,
                            const Eigen::VectorXd& Y, const Eigen::MatrixXd& DY);

}  // namespace adaptube
