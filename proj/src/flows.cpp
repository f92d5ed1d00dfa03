#include "adaptube/flows.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace adaptube {

void IntegratorConfig::validate() const {
  if (!(step > 0.0))
    throw std::invalid_argument("integrator step must be positive");
  if (method == IntegratorMethod::Rkf45Adaptive && (!(rel_tol > 0.0) || !(abs_tol > 0.0)))
    throw std::invalid_argument("integrator tolerances must be positive");
  if (max_steps < 1) throw std::invalid_argument("max_steps must be >= 1");
}

LeftChartBox::LeftChartBox(double exit_time)
    : std::runtime_error("trajectory left the chart box at t = " + std::to_string(exit_time)),
      exit_time_(exit_time) {}

namespace {

Eigen::VectorXd rk4_step(const Rhs& f, const Eigen::VectorXd& y, double h) {
  Eigen::VectorXd k1 = f(y);
  Eigen::VectorXd k2 = f(y + 0.5 * h * k1);
  Eigen::VectorXd k3 = f(y + 0.5 * h * k2);
  Eigen::VectorXd k4 = f(y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Fehlberg 4(5); the step advances with the fifth-order solution.
struct FehlbergResult {
  Eigen::VectorXd y5;
  Eigen::VectorXd error;
};

FehlbergResult rkf45_step(const Rhs& f, const Eigen::VectorXd& y, double h) {
  Eigen::VectorXd k1 = f(y);
  Eigen::VectorXd k2 = f(y + h * (1.0 / 4.0) * k1);
  Eigen::VectorXd k3 = f(y + h * ((3.0 / 32.0) * k1 + (9.0 / 32.0) * k2));
  Eigen::VectorXd k4 =
      f(y + h * ((1932.0 / 2197.0) * k1 - (7200.0 / 2197.0) * k2 + (7296.0 / 2197.0) * k3));
  Eigen::VectorXd k5 = f(y + h * ((439.0 / 216.0) * k1 - 8.0 * k2 + (3680.0 / 513.0) * k3 -
                                  (845.0 / 4104.0) * k4));
  Eigen::VectorXd k6 = f(y + h * (-(8.0 / 27.0) * k1 + 2.0 * k2 - (3544.0 / 2565.0) * k3 +
                                  (1859.0 / 4104.0) * k4 - (11.0 / 40.0) * k5));
  Eigen::VectorXd y5 = y + h * ((16.0 / 135.0) * k1 + (6656.0 / 12825.0) * k3 +
                                (28561.0 / 56430.0) * k4 - (9.0 / 50.0) * k5 + (2.0 / 55.0) * k6);
  Eigen::VectorXd y4 = y + h * ((25.0 / 216.0) * k1 + (1408.0 / 2565.0) * k3 +
                                (2197.0 / 4104.0) * k4 - (1.0 / 5.0) * k5);
  return {y5, y5 - y4};
}

// Fraction of the segment a -> b at which it first leaves the box.
double exit_fraction(const Box& box, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double frac = 1.0;
  for (std::size_t i = 0; i < box.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    const double d = b(k) - a(k);
    if (b(k) > box[i].hi && d != 0.0) frac = std::min(frac, (box[i].hi - a(k)) / d);
    if (b(k) < box[i].lo && d != 0.0) frac = std::min(frac, (box[i].lo - a(k)) / d);
  }
  return std::clamp(frac, 0.0, 1.0);
}

void record(Trajectory& tr, double t, const Eigen::VectorXd& y, double h, const Box* box) {
  if (box && !box_contains(*box, y)) {
    const double t_prev = tr.times.back();
    throw LeftChartBox(t_prev + exit_fraction(*box, tr.points.back(), y) * h);
  }
  tr.times.push_back(t);
  tr.points.push_back(y);
  tr.steps.push_back(h);
}

}  // namespace

Trajectory integrate(const Rhs& f, const Eigen::VectorXd& p0, double T,
                     const IntegratorConfig& cfg, const Box* box) {
  cfg.validate();
  Trajectory tr;
  tr.times.push_back(0.0);
  tr.points.push_back(p0);
  if (T == 0.0) return tr;
  const double dir = T > 0.0 ? 1.0 : -1.0;

  if (cfg.method == IntegratorMethod::Rk4Fixed) {
    const long nsteps = std::max(1L, static_cast<long>(std::ceil(std::abs(T) / cfg.step - 1e-12)));
    if (nsteps > cfg.max_steps) throw MaxStepsExceeded("rk4: step count exceeds max_steps");
    const double h = T / static_cast<double>(nsteps);
    Eigen::VectorXd y = p0;
    for (long i = 1; i <= nsteps; ++i) {
      y = rk4_step(f, y, h);
      record(tr, i == nsteps ? T : h * static_cast<double>(i), y, h, box);
    }
    return tr;
  }

  double t = 0.0;
  double h = dir * std::min(std::abs(T), cfg.step);
  Eigen::VectorXd y = p0;
  int attempts = 0;
  while (t != T) {
    if (++attempts > cfg.max_steps) throw MaxStepsExceeded("rkf45: exceeded max_steps");
    bool last = false;
    if (std::abs(h) >= std::abs(T - t)) {
      h = T - t;
      last = true;
    }
    FehlbergResult r = rkf45_step(f, y, h);
    double err = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double scale = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y(i)), std::abs(r.y5(i)));
      err = std::max(err, std::abs(r.error(i)) / scale);
    }
    if (!std::isfinite(err)) throw MaxStepsExceeded("rkf45: non-finite error estimate");
    if (err <= 1.0) {
      t = last ? T : t + h;
      y = r.y5;
      record(tr, t, y, h, box);
      const double grow = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      h *= grow;
    } else {
      ++tr.rejected_steps;
      h *= std::max(0.9 * std::pow(err, -0.25), 0.1);
    }
  }
  return tr;
}

Trajectory integrate(const VectorField& X, const Eigen::VectorXd& p0, double T,
                     const IntegratorConfig& cfg, const Box* box) {
  return integrate(Rhs([&X](const Eigen::VectorXd& x) { return X(x); }), p0, T, cfg, box);
}

Eigen::VectorXd replay(const Rhs& f, const Eigen::VectorXd& p0, std::span<const double> steps,
                       IntegratorMethod method) {
  Eigen::VectorXd y = p0;
  for (double h : steps) y = method == IntegratorMethod::Rk4Fixed ? rk4_step(f, y, h) : rkf45_step(f, y, h).y5;
  return y;
}

Eigen::VectorXd reeb_flow(const ManifoldSpec& M, const Eigen::VectorXd& p, double t,
                          const IntegratorConfig& cfg) {
  Rhs f = [&M](const Eigen::VectorXd& x) { return reeb_field(M, x); };
  return integrate(f, p, t, cfg, &M.chart_box).end();
}

Rhs sigma_rhs(const ManifoldSpec& M) {
  const Eigen::MatrixXd K = M.ambient_J;
  const SmoothMap ext = M.extension_map;
  return [K, ext](const Eigen::VectorXd& q) -> Eigen::VectorXd { return K * ext(q); };
}

Eigen::VectorXd sigma_flow(const ManifoldSpec& M, const Eigen::VectorXd& q0, double sigma,
                           const IntegratorConfig& cfg) {
  return integrate(sigma_rhs(M), q0, sigma, cfg).end();
}

double holomorphy_residual(const ManifoldSpec& M, const Eigen::VectorXd& p, double t,
                           double sigma, const IntegratorConfig& cfg, double fd_step) {
  const Rhs f = sigma_rhs(M);
  const double h = fd_step;
  const Eigen::VectorXd q = reeb_flow(M, p, t, cfg);
  const Trajectory base = integrate(f, M.embedding_map(q), sigma, cfg);
  const Eigen::VectorXd& gamma0 = base.end();

  // t-direction: shift along the Reeb orbit, then replay the sigma-flow
  // with the base step sequence.
  const Eigen::VectorXd q_plus = reeb_flow(M, q, h, cfg);
  const Eigen::VectorXd q_minus = reeb_flow(M, q, -h, cfg);
  const Eigen::VectorXd d_t = (replay(f, M.embedding_map(q_plus), base.steps, cfg.method) -
                               replay(f, M.embedding_map(q_minus), base.steps, cfg.method)) /
                              (2.0 * h);

  const Eigen::VectorXd d_sigma =
      (integrate(f, gamma0, h, cfg).end() - integrate(f, gamma0, -h, cfg).end()) / (2.0 * h);
  return (d_sigma - M.ambient_J * d_t).norm();
}

HolomorphyScan holomorphy_scan(const ManifoldSpec& M, const HolomorphyGrid& grid,
                               const IntegratorConfig& cfg) {
  HolomorphyScan scan;
  const auto bases = halton_points(shrink(M.chart_box, grid.base_shrink), grid.base_points, grid.seed);
  const auto ts = linspace(-grid.t_max, grid.t_max, grid.nt);
  const auto ss = linspace(-grid.sigma_max, grid.sigma_max, grid.nsigma);
  scan.worst = Eigen::VectorXd::Zero(M.dim() + 2);
  for (const auto& p : bases)
    for (double t : ts)
      for (double s : ss) {
        const double r = holomorphy_residual(M, p, t, s, cfg);
        ++scan.evaluations;
        if (r > scan.max_residual || !std::isfinite(r)) {
          scan.max_residual = r;
          scan.worst << p, t, s;
        }
      }
  return scan;
}

}  // namespace adaptube
