#pragma once

// ODE integration of the Reeb flow on the chart and of the ambient flow
// along J_amb * xi_ext that pushes the embedded manifold off itself, plus
// the Cauchy-Riemann residual of the resulting two-parameter map.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "adaptube/contact.hpp"
#include "adaptube/sampling.hpp"

namespace adaptube {

enum class IntegratorMethod { Rk4Fixed, Rkf45Adaptive };

struct IntegratorConfig {
  IntegratorMethod method = IntegratorMethod::Rkf45Adaptive;
  double step = 1e-2;  // rk4-fixed step; initial step bound for rkf45
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  int max_steps = 100000;

  void validate() const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> points;
  std::vector<double> steps;  // accepted step sizes, signed
  int rejected_steps = 0;

  const Eigen::VectorXd& end() const { return points.back(); }
};

class LeftChartBox : public std::runtime_error {
 public:
  explicit LeftChartBox(double exit_time);
  double exit_time() const { return exit_time_; }

 private:
  double exit_time_;
};

class MaxStepsExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Rhs = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Integrates dx/dt = f(x) from p0 over [0, T] (T may be negative). With a
/// box, leaving it aborts with the estimated exit time.
Trajectory integrate(const Rhs& f, const Eigen::VectorXd& p0, double T,
                     const IntegratorConfig& cfg, const Box* box = nullptr);
Trajectory integrate(const VectorField& X, const Eigen::VectorXd& p0, double T,
                     const IntegratorConfig& cfg, const Box* box = nullptr);

/// Re-runs a recorded step sequence from a new initial point. With the
/// steps frozen, the numerical flow map is a smooth function of p0, which
/// keeps finite differences through it clean.
Eigen::VectorXd replay(const Rhs& f, const Eigen::VectorXd& p0, std::span<const double> steps,
                       IntegratorMethod method);

/// Reeb flow g_t(p) on the chart; must stay inside chart_box.
Eigen::VectorXd reeb_flow(const ManifoldSpec& M, const Eigen::VectorXd& p, double t,
                          const IntegratorConfig& cfg = {});

/// Right-hand side q -> J_amb * xi_ext(q) of the ambient sigma-flow.
Rhs sigma_rhs(const ManifoldSpec& M);

Eigen::VectorXd sigma_flow(const ManifoldSpec& M, const Eigen::VectorXd& q0, double sigma,
                           const IntegratorConfig& cfg = {});

/// |dG/dsigma - J_amb dG/dt| at (t, sigma) for G(t, sigma) =
/// sigma_flow(j(g_t(p)), sigma), by central differences of step fd_step.
double holomorphy_residual(const ManifoldSpec& M, const Eigen::VectorXd& p, double t,
                           double sigma, const IntegratorConfig& cfg = {},
                           double fd_step = 1e-5);

/// Base points are Halton samples of the chart box shrunk by base_shrink,
/// so short Reeb flows stay inside the chart.
struct HolomorphyGrid {
  int base_points = 4;
  double base_shrink = 0.5;
  double t_max = 0.5;
  int nt = 11;
  double sigma_max = 0.3;
  int nsigma = 7;
  std::uint64_t seed = 0;
};

struct HolomorphyScan {
  double max_residual = 0.0;
  Eigen::VectorXd worst;  // (p, t, sigma)
  int evaluations = 0;
};

HolomorphyScan holomorphy_scan(const ManifoldSpec& M, const HolomorphyGrid& grid,
                               const IntegratorConfig& cfg = {});

}  // namespace adaptube
