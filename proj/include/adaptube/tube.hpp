#pragma once

// Adapted complex tubes over a ManifoldSpec: the map gamma from tube
// coordinates (p, sigma) into the ambient space, the pulled-back complex
// structure J = Dgamma^-1 J_amb Dgamma, the d^c operator built on it, and
// the residual checks of the Monge-Ampere system.
//
// d^c f (v) = -df(J v).

#include <Eigen/Dense>

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "adaptube/contact.hpp"
#include "adaptube/exterior.hpp"
#include "adaptube/flows.hpp"
#include "adaptube/sampling.hpp"

namespace adaptube {

class HolomorphyFailure : public std::runtime_error {
 public:
  HolomorphyFailure(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

enum class TubeKind { ClosedForm, Flow, Control };

struct TubeModel {
  std::shared_ptr<const ManifoldSpec> base;
  TubeKind kind = TubeKind::ClosedForm;
  double sigma_max = 0.3;
  Box domain;  // chart_box x [-sigma_max, sigma_max]

  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gamma;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> dgamma;
  /// Row-major entries of J over tube coordinates. Closed-form tubes support
  /// the tower up to D2 (two derivatives of J); flow tubes are first order.
  SmoothMap J_map;

  double holomorphy_residual = 0.0;  // flow tubes: grid maximum

  int dim() const { return base->dim() + 1; }
  Eigen::MatrixXd J(const Eigen::VectorXd& x) const;
};

/// gamma from the spec's closed_form_tube expressions.
TubeModel build_tube_closed_form(const ManifoldSpec& M, double sigma_max);
/// Registry shortcut.
TubeModel build_tube_closed_form(const std::string& name, int n, double sigma_max);

struct FlowTubeOptions {
  IntegratorConfig cfg;
  HolomorphyGrid grid;
  double holomorphy_tol = 1e-5;
  // Dgamma by finite differences. order 2 is the plain central difference
  // (pair it with fd_step 1e-5); the five-point default keeps roundoff out
  // of the J derivatives built on top of it.
  double fd_step = 1e-3;
  int fd_order = 4;
  double jet_step = 1e-3;  // derivatives of J, five-point stencil
};

/// gamma(p, sigma) = sigma_flow(j(p), sigma). Throws HolomorphyFailure when
/// the holomorphy scan exceeds holomorphy_tol.
TubeModel build_tube_by_flow(const ManifoldSpec& M, double sigma_max,
                             const FlowTubeOptions& opts = {});

/// J conjugated by a rotation of the (i, j) coordinate plane through angle
/// rate * sigma. Still squares to -I but is no longer integrable.
TubeModel make_non_integrable_control(const TubeModel& T, int i, int j, double rate = 1.0);

/// E = sigma as a map on tube coordinates.
SmoothMap energy_map(const TubeModel& T);

FormField dc_field(const SmoothMap& f, const TubeModel& T);
AltForm dc(const SmoothMap& f, const TubeModel& T, const Eigen::VectorXd& x);
FormField ddc_field(const SmoothMap& f, const TubeModel& T);
AltForm ddc(const SmoothMap& f, const TubeModel& T, const Eigen::VectorXd& x);

double j_squared_residual(const TubeModel& T, const Eigen::VectorXd& x);

struct MaResult {
  double residual = 0.0;
  bool degenerate = false;
  double ddc_norm = 0.0;
};

/// |top (dd^c f)^{n+1}| / (|dd^c f|^{n+1} + 1e-30); 0 with the degenerate
/// flag when |dd^c f| < 1e-12.
MaResult ma_residual(const TubeModel& T, const Eigen::VectorXd& x);
MaResult ma_residual(const SmoothMap& f, const TubeModel& T, const Eigen::VectorXd& x);

/// Top coefficient of dE ^ d^cE ^ (dd^cE)^n.
double nondegeneracy_value(const TubeModel& T, const Eigen::VectorXd& x);

/// max over a Levi basis and xi_0 of |d^cE(v) + theta(v)| at (p, 0).
double boundary_trace_residual(const TubeModel& T, const Eigen::VectorXd& p);

/// |J xi^theta - X^theta|.
double lemma21_residual(const TubeModel& T, const Eigen::VectorXd& x);

/// |xi^theta _| dd^cE|.
double lie_derivative_residual(const TubeModel& T, const Eigen::VectorXd& x);

/// max over coordinate pairs of |N(e_i, e_j)|.
double nijenhuis_residual(const TubeModel& T, const Eigen::VectorXd& x);

struct CrResult {
  double structure = 0.0;  // |J(v,0) - (J_H v, 0)| over the Levi basis
  double theta = 0.0;      // |theta(J v)| over the Levi basis
};

/// J_H is the CR structure induced by the embedding: Dj(J_H v) = J_amb Dj(v).
CrResult check_cr_restriction(const TubeModel& T, const Eigen::VectorXd& p);

struct TubeComparison {
  double gamma = 0.0;
  double J = 0.0;
  Eigen::VectorXd worst_gamma;
  Eigen::VectorXd worst_J;
};

TubeComparison compare_tubes(const TubeModel& a, const TubeModel& b,
                             const std::vector<Eigen::VectorXd>& points);

/// Intersection of the two domains; throws std::invalid_argument when empty.
Box common_domain(const TubeModel& a, const TubeModel& b);

}  // namespace adaptube
