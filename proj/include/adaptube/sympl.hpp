#pragma once

// The symplectization M^theta in the trivialization (p, sigma) -> sigma*theta_p.
// Tube coordinates are the chart coordinates followed by sigma.

#include <Eigen/Dense>

#include "adaptube/contact.hpp"
#include "adaptube/exterior.hpp"
#include "adaptube/flows.hpp"

namespace adaptube {

struct SympPoint {
  Eigen::VectorXd p;
  double sigma = 0.0;

  Eigen::VectorXd tube_coords() const;
  static SympPoint from_tube(const Eigen::VectorXd& x);
};

/// Point of T*M as (base x, fiber p).
struct CotangentCoords {
  Eigen::VectorXd x;
  Eigen::VectorXd pvec;
};

CotangentCoords to_cotangent(const ManifoldSpec& M, const SympPoint& a);

/// E(alpha) in the trivialization.
double energy(const SympPoint& a);

/// E recovered from cotangent coordinates as pvec.v / theta(v); v must not
/// lie in ker theta.
double energy_from_cotangent(const ManifoldSpec& M, const CotangentCoords& c,
                             const Eigen::VectorXd& v);

/// X^theta = d/dsigma, length m+1.
Eigen::VectorXd x_theta(const ManifoldSpec& M, const SympPoint& a);
/// X^theta pushed to (x; p) coordinates: (0; theta(x)), length 2m.
Eigen::VectorXd x_theta_cotangent(const ManifoldSpec& M, const SympPoint& a);

/// xi^theta = (xi_0(p), 0).
Eigen::VectorXd xi_theta(const ManifoldSpec& M, const SympPoint& a);

/// Fields on tube coordinates.
VectorField x_theta_field(const ManifoldSpec& M);
VectorField xi_theta_field(const ManifoldSpec& M);

/// h_t(alpha) = alpha + t theta.
SympPoint h_flow(const SympPoint& a, double t);
/// g_t(alpha) = E(alpha) theta_{g_t(p)}.
SympPoint g_flow(const ManifoldSpec& M, const SympPoint& a, double t,
                 const IntegratorConfig& cfg = {});

struct StructureResiduals {
  double xi_energy = 0.0;  // |xi(E)|
  double x_energy = 0.0;   // |X(E) - 1|
  double bracket = 0.0;    // |[xi, X]|
};

StructureResiduals check_structure_identities(const ManifoldSpec& M, const SympPoint& a);

/// (g_t(p), sigma).
SympPoint foliation_point(const ManifoldSpec& M, const Eigen::VectorXd& p, double t, double sigma,
                          const IntegratorConfig& cfg = {});

struct FoliationChart {
  const ManifoldSpec* M = nullptr;
  Eigen::VectorXd p;
  IntegratorConfig cfg;

  SympPoint operator()(double t, double sigma) const;
};

/// The one-form sigma * pi^* theta on tube coordinates.
FormField tautological_form(const ManifoldSpec& M);

/// d(sigma pi^* theta) = d sigma ^ theta + sigma d theta at alpha.
AltForm canonical_two_form(const ManifoldSpec& M, const SympPoint& a);
FormField canonical_two_form_field(const ManifoldSpec& M);

/// Numerical rank of the two-form (singular values relative to the largest).
int canonical_two_form_rank(const ManifoldSpec& M, const SympPoint& a, double rel_tol = 1e-9);

}  // namespace adaptube
