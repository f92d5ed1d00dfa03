#include "adaptube/sympl.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace adaptube {

Eigen::VectorXd SympPoint::tube_coords() const {
  Eigen::VectorXd x(p.size() + 1);
  x << p, sigma;
  return x;
}

SympPoint SympPoint::from_tube(const Eigen::VectorXd& x) {
  return {x.head(x.size() - 1), x(x.size() - 1)};
}

CotangentCoords to_cotangent(const ManifoldSpec& M, const SympPoint& a) {
  return {a.p, a.sigma * M.theta_map(a.p)};
}

double energy(const SympPoint& a) { return a.sigma; }

double energy_from_cotangent(const ManifoldSpec& M, const CotangentCoords& c,
                             const Eigen::VectorXd& v) {
  const double th = M.theta_map(c.x).dot(v);
  if (std::abs(th) < 1e-14) throw std::invalid_argument("energy_from_cotangent: v in ker theta");
  return c.pvec.dot(v) / th;
}

Eigen::VectorXd x_theta(const ManifoldSpec& M, const SympPoint&) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(M.dim() + 1);
  v(M.dim()) = 1.0;
  return v;
}

Eigen::VectorXd x_theta_cotangent(const ManifoldSpec& M, const SympPoint& a) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(2 * M.dim());
  v.tail(M.dim()) = M.theta_map(a.p);
  return v;
}

Eigen::VectorXd xi_theta(const ManifoldSpec& M, const SympPoint& a) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(M.dim() + 1);
  v.head(M.dim()) = reeb_field(M, a.p);
  return v;
}

VectorField x_theta_field(const ManifoldSpec& M) {
  std::vector<double> c(M.dim() + 1, 0.0);
  c.back() = 1.0;
  return make_constant_map(M.dim() + 1, c);
}

VectorField xi_theta_field(const ManifoldSpec& M) {
  const int m = M.dim();
  VectorField reeb = reeb_vector_field(M);
  return make_map(m + 1, m + 1, [reeb, m](auto in, auto out) {
    using T = typename decltype(out)::value_type;
    reeb.eval<T>(in.first(m), out.first(m));
    out[m] = T(0.0);
  });
}

SympPoint h_flow(const SympPoint& a, double t) { return {a.p, a.sigma + t}; }

SympPoint g_flow(const ManifoldSpec& M, const SympPoint& a, double t, const IntegratorConfig& cfg) {
  return {reeb_flow(M, a.p, t, cfg), a.sigma};
}

StructureResiduals check_structure_identities(const ManifoldSpec& M, const SympPoint& a) {
  const Eigen::VectorXd x = a.tube_coords();
  const VectorField xi = xi_theta_field(M);
  const VectorField X = x_theta_field(M);
  // dE is the last coordinate covector, computed through the AD engine.
  const Eigen::MatrixXd dE = make_coordinate_map(M.dim() + 1, M.dim()).jacobian(x);
  StructureResiduals r;
  r.xi_energy = std::abs((dE * xi(x))(0));
  r.x_energy = std::abs((dE * X(x))(0) - 1.0);
  r.bracket = lie_bracket(xi, X, x).norm();
  return r;
}

SympPoint foliation_point(const ManifoldSpec& M, const Eigen::VectorXd& p, double t, double sigma,
                          const IntegratorConfig& cfg) {
  return {reeb_flow(M, p, t, cfg), sigma};
}

SympPoint FoliationChart::operator()(double t, double sigma) const {
  return foliation_point(*M, p, t, sigma, cfg);
}

FormField tautological_form(const ManifoldSpec& M) {
  const int m = M.dim();
  SmoothMap theta = M.theta_map;
  return make_form_field(m + 1, 1, make_map(m + 1, m + 1, [theta, m](auto in, auto out) {
    using T = typename decltype(out)::value_type;
    theta.eval<T>(in.first(m), out.first(m));
    for (int i = 0; i < m; ++i) out[i] = in[m] * out[i];
    out[m] = T(0.0);
  }));
}

FormField canonical_two_form_field(const ManifoldSpec& M) {
  return exterior_derivative_field(tautological_form(M));
}

AltForm canonical_two_form(const ManifoldSpec& M, const SympPoint& a) {
  return exterior_derivative(tautological_form(M), a.tube_coords());
}

int canonical_two_form_rank(const ManifoldSpec& M, const SympPoint& a, double rel_tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(canonical_two_form(M, a).as_matrix());
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  return static_cast<int>((s.array() > rel_tol * s(0)).count());
}

}  // namespace adaptube
