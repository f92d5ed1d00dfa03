#include "adaptube/tube.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "adaptube/linalg.hpp"
#include "adaptube/sympl.hpp"

namespace adaptube {

Eigen::MatrixXd TubeModel::J(const Eigen::VectorXd& x) const {
  const int d = dim();
  Eigen::VectorXd flat = J_map(x);
  Eigen::MatrixXd out(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) out(r, c) = flat(r * d + c);
  return out;
}

namespace {

Box tube_domain(const ManifoldSpec& M, double sigma_max) {
  Box box = M.chart_box;
  box.push_back({-sigma_max, sigma_max});
  return box;
}

void require_square(const ManifoldSpec& M) {
  if (M.ambient_dim() != M.dim() + 1)
    throw SpecError("tube construction needs ambient dimension 2n+2, got " +
                    std::to_string(M.ambient_dim()));
}

// J = Dg^-1 K Dg with Dg taken by lifting the inputs one tower level, so J
// is as differentiable as g allows (two levels short of the tower top).
SmoothMap closed_form_J(SmoothMap g, Eigen::MatrixXd K) {
  const int d = g.in_dim();
  return make_map(d, d * d, [g, K, d](auto in, auto out) {
    using T = typename decltype(out)::value_type;
    if constexpr (!can_lift_v<T>) {
      throw UnsupportedOrder("closed-form tube J: derivative order too high");
    } else {
      std::vector<Dual<T>> xs = lift<T>(in);
      std::vector<Dual<T>> ys(d);
      g.eval<Dual<T>>(std::span<const Dual<T>>(xs), std::span<Dual<T>>(ys));
      std::vector<T> A(static_cast<std::size_t>(d) * d);
      std::vector<T> B(static_cast<std::size_t>(d) * d, T(0.0));
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) A[r * d + c] = ys[r].d[c];
      for (int r = 0; r < d; ++r)
        for (int k = 0; k < d; ++k) {
          if (K(r, k) == 0.0) continue;
          for (int c = 0; c < d; ++c) B[r * d + c] = B[r * d + c] + K(r, k) * A[k * d + c];
        }
      std::vector<T> X = solve_dense<T>(std::move(A), std::move(B), d, d);
      std::copy(X.begin(), X.end(), out.begin());
    }
  });
}

Eigen::VectorXd flatten(const Eigen::MatrixXd& A) {
  Eigen::VectorXd v(A.size());
  for (Eigen::Index r = 0; r < A.rows(); ++r)
    for (Eigen::Index c = 0; c < A.cols(); ++c) v(r * A.cols() + c) = A(r, c);
  return v;
}

// Flow-built gamma with a frozen step pattern. The steps of the adaptive
// sigma-flow at a base point are stored relative to sigma and replayed,
// scaled, at every stencil point around it, so the stencil sees one smooth
// discrete map instead of step-selection jitter.
struct FlowTubeEngine {
  std::shared_ptr<const ManifoldSpec> M;
  Rhs f;
  Eigen::MatrixXd K;
  FlowTubeOptions opts;

  int m() const { return M->dim(); }

  std::vector<double> unit_steps(const Eigen::VectorXd& x) const {
    const double sigma = x(m());
    if (std::abs(sigma) < 1e-3) return {1.0};
    Trajectory tr = integrate(f, M->embedding_map(x.head(m())), sigma, opts.cfg);
    std::vector<double> unit = tr.steps;
    for (double& s : unit) s /= sigma;
    return unit;
  }

  Eigen::VectorXd gamma(const Eigen::VectorXd& x, const std::vector<double>& unit) const {
    const double sigma = x(m());
    std::vector<double> steps(unit);
    for (double& s : steps) s *= sigma;
    return replay(f, M->embedding_map(x.head(m())), steps, opts.cfg.method);
  }

  Eigen::MatrixXd dgamma(const Eigen::VectorXd& x, const std::vector<double>& unit) const {
    const int d = m() + 1;
    const double h = opts.fd_step;
    Eigen::MatrixXd D(d, d);
    for (int k = 0; k < d; ++k) {
      auto at = [&](double s) {
        Eigen::VectorXd y = x;
        y(k) += s * h;
        return gamma(y, unit);
      };
      if (opts.fd_order == 4)
        D.col(k) = (-at(2.0) + 8.0 * at(1.0) - 8.0 * at(-1.0) + at(-2.0)) / (12.0 * h);
      else
        D.col(k) = (at(1.0) - at(-1.0)) / (2.0 * h);
    }
    return D;
  }

  Eigen::MatrixXd J(const Eigen::VectorXd& x, const std::vector<double>& unit) const {
    const Eigen::MatrixXd D = dgamma(x, unit);
    return D.partialPivLu().solve(K * D);
  }

  Eigen::MatrixXd J_jacobian(const Eigen::VectorXd& x) const {
    const int d = m() + 1;
    const std::vector<double> unit = unit_steps(x);
    const double h = opts.jet_step;
    Eigen::MatrixXd out(d * d, d);
    for (int l = 0; l < d; ++l) {
      auto at = [&](double s) {
        Eigen::VectorXd y = x;
        y(l) += s * h;
        return flatten(J(y, unit));
      };
      out.col(l) = (-at(2.0) + 8.0 * at(1.0) - 8.0 * at(-1.0) + at(-2.0)) / (12.0 * h);
    }
    return out;
  }
};

// Rotation of the (i, j) plane by angle a, as a d x d matrix over T.
template <typename T>
std::vector<T> plane_rotation(int d, int i, int j, const T& a) {
  std::vector<T> P(static_cast<std::size_t>(d) * d, T(0.0));
  for (int k = 0; k < d; ++k) P[k * d + k] = T(1.0);
  const T c = cos(a), s = sin(a);
  P[i * d + i] = c;
  P[j * d + j] = c;
  P[i * d + j] = -s;
  P[j * d + i] = s;
  return P;
}

template <typename T>
std::vector<T> matmul(const std::vector<T>& A, const std::vector<T>& B, int d) {
  std::vector<T> C(static_cast<std::size_t>(d) * d, T(0.0));
  for (int r = 0; r < d; ++r)
    for (int k = 0; k < d; ++k)
      for (int c = 0; c < d; ++c) C[r * d + c] = C[r * d + c] + A[r * d + k] * B[k * d + c];
  return C;
}

Eigen::VectorXd zero_section(const Eigen::VectorXd& p) {
  Eigen::VectorXd x(p.size() + 1);
  x << p, 0.0;
  return x;
}

}  // namespace

TubeModel build_tube_closed_form(const ManifoldSpec& M, double sigma_max) {
  if (!M.tube_map) throw SpecError("spec '" + M.name + "' has no closed-form tube");
  require_square(M);
  if (!(sigma_max > 0.0)) throw std::invalid_argument("sigma_max must be positive");
  TubeModel T;
  T.base = std::make_shared<const ManifoldSpec>(M);
  T.kind = TubeKind::ClosedForm;
  T.sigma_max = sigma_max;
  T.domain = tube_domain(M, sigma_max);
  const SmoothMap g = *M.tube_map;
  T.gamma = [g](const Eigen::VectorXd& x) { return g(x); };
  T.dgamma = [g](const Eigen::VectorXd& x) { return g.jacobian(x); };
  T.J_map = closed_form_J(g, M.ambient_J);
  return T;
}

TubeModel build_tube_closed_form(const std::string& name, int n, double sigma_max) {
  return build_tube_closed_form(make_example(name, n), sigma_max);
}

TubeModel build_tube_by_flow(const ManifoldSpec& M, double sigma_max, const FlowTubeOptions& opts) {
  require_square(M);
  if (!(sigma_max > 0.0)) throw std::invalid_argument("sigma_max must be positive");
  opts.cfg.validate();
  TubeModel T;
  T.base = std::make_shared<const ManifoldSpec>(M);
  T.kind = TubeKind::Flow;
  T.sigma_max = sigma_max;
  T.domain = tube_domain(M, sigma_max);

  const HolomorphyScan scan = holomorphy_scan(*T.base, opts.grid, opts.cfg);
  T.holomorphy_residual = scan.max_residual;
  if (!(scan.max_residual <= opts.holomorphy_tol))
    throw HolomorphyFailure("holomorphy residual " + std::to_string(scan.max_residual) +
                                " exceeds " + std::to_string(opts.holomorphy_tol) +
                                "; reeb_extension is not a holomorphic extension",
                            scan.max_residual);

  auto engine = std::make_shared<const FlowTubeEngine>(
      FlowTubeEngine{T.base, sigma_rhs(*T.base), T.base->ambient_J, opts});
  T.gamma = [engine](const Eigen::VectorXd& x) { return engine->gamma(x, engine->unit_steps(x)); };
  T.dgamma = [engine](const Eigen::VectorXd& x) {
    return engine->dgamma(x, engine->unit_steps(x));
  };
  const int d = T.dim();
  T.J_map = make_numeric_map(
      d, d * d,
      [engine](const Eigen::VectorXd& x) { return flatten(engine->J(x, engine->unit_steps(x))); },
      [engine](const Eigen::VectorXd& x) { return engine->J_jacobian(x); });
  return T;
}

TubeModel make_non_integrable_control(const TubeModel& T, int i, int j, double rate) {
  const int d = T.dim();
  if (i < 0 || j < 0 || i >= d || j >= d || i == j)
    throw std::invalid_argument("make_non_integrable_control: bad coordinate plane");
  TubeModel C = T;
  C.kind = TubeKind::Control;
  const SmoothMap base_J = T.J_map;
  C.J_map = make_map(d, d * d, [base_J, d, i, j, rate](auto in, auto out) {
    using T_ = typename decltype(out)::value_type;
    std::vector<T_> J(static_cast<std::size_t>(d) * d);
    base_J.eval<T_>(in, std::span<T_>(J));
    const T_ a = rate * in[d - 1];
    std::vector<T_> P = plane_rotation<T_>(d, i, j, a);
    std::vector<T_> Pt = plane_rotation<T_>(d, i, j, -a);
    std::vector<T_> R = matmul(matmul(P, J, d), Pt, d);
    std::copy(R.begin(), R.end(), out.begin());
  });
  return C;
}

SmoothMap energy_map(const TubeModel& T) { return make_coordinate_map(T.dim(), T.dim() - 1); }

FormField dc_field(const SmoothMap& f, const TubeModel& T) {
  const int d = T.dim();
  if (f.in_dim() != d || f.out_dim() != 1)
    throw std::invalid_argument("dc: f must be a scalar field on tube coordinates");
  const SmoothMap J = T.J_map;
  return make_form_field(d, 1, make_map(d, d, [f, J, d](auto in, auto out) {
    using T_ = typename decltype(out)::value_type;
    if constexpr (!can_lift_v<T_>) {
      throw UnsupportedOrder("dc: derivative order too high");
    } else {
      std::vector<Dual<T_>> xs = lift<T_>(in);
      Dual<T_> fx;
      f.eval<Dual<T_>>(std::span<const Dual<T_>>(xs), std::span<Dual<T_>>(&fx, 1));
      std::vector<T_> Jv(static_cast<std::size_t>(d) * d);
      J.eval<T_>(in, std::span<T_>(Jv));
      for (int i = 0; i < d; ++i) {
        T_ acc(0.0);
        for (int k = 0; k < d; ++k) acc = acc + fx.d[k] * Jv[k * d + i];
        out[i] = -acc;
      }
    }
  }));
}

AltForm dc(const SmoothMap& f, const TubeModel& T, const Eigen::VectorXd& x) {
  return dc_field(f, T).at(x);
}

FormField ddc_field(const SmoothMap& f, const TubeModel& T) {
  return exterior_derivative_field(dc_field(f, T));
}

AltForm ddc(const SmoothMap& f, const TubeModel& T, const Eigen::VectorXd& x) {
  return exterior_derivative(dc_field(f, T), x);
}

double j_squared_residual(const TubeModel& T, const Eigen::VectorXd& x) {
  const Eigen::MatrixXd J = T.J(x);
  return (J * J + Eigen::MatrixXd::Identity(J.rows(), J.cols())).cwiseAbs().maxCoeff();
}

MaResult ma_residual(const SmoothMap& f, const TubeModel& T, const Eigen::VectorXd& x) {
  const AltForm w = ddc(f, T, x);
  MaResult r;
  r.ddc_norm = w.norm();
  if (r.ddc_norm < 1e-12) {
    r.degenerate = true;
    return r;
  }
  const int k = T.base->n + 1;
  r.residual = std::abs(wedge_power(w, k).top()) / (std::pow(r.ddc_norm, k) + 1e-30);
  return r;
}

MaResult ma_residual(const TubeModel& T, const Eigen::VectorXd& x) {
  return ma_residual(energy_map(T), T, x);
}

double nondegeneracy_value(const TubeModel& T, const Eigen::VectorXd& x) {
  const SmoothMap E = energy_map(T);
  const Eigen::MatrixXd g = E.jacobian(x);
  const AltForm dE = AltForm::one_form(std::span<const double>(g.data(), g.size()));
  const AltForm dcE = dc(E, T, x);
  const AltForm w = ddc(E, T, x);
  return wedge(dE, wedge(dcE, wedge_power(w, T.base->n))).top();
}

double boundary_trace_residual(const TubeModel& T, const Eigen::VectorXd& p) {
  const ManifoldSpec& M = *T.base;
  const AltForm beta = dc(energy_map(T), T, zero_section(p));
  const Eigen::VectorXd theta = M.theta_map(p);
  std::vector<Eigen::VectorXd> vs = levi_distribution(M, p);
  vs.push_back(reeb_field(M, p));
  double worst = 0.0;
  for (const auto& v : vs) {
    const Eigen::VectorXd vt = zero_section(v);
    const double dcv = interior_product(vt, beta)[0];
    worst = std::max(worst, std::abs(dcv + theta.dot(v)));
  }
  return worst;
}

double lemma21_residual(const TubeModel& T, const Eigen::VectorXd& x) {
  const SympPoint a = SympPoint::from_tube(x);
  return (T.J(x) * xi_theta(*T.base, a) - x_theta(*T.base, a)).norm();
}

double lie_derivative_residual(const TubeModel& T, const Eigen::VectorXd& x) {
  const Eigen::VectorXd xi = xi_theta(*T.base, SympPoint::from_tube(x));
  return interior_product(xi, ddc(energy_map(T), T, x)).norm();
}

double nijenhuis_residual(const TubeModel& T, const Eigen::VectorXd& x) {
  const int d = T.dim();
  const Eigen::MatrixXd J = T.J(x);
  const Eigen::MatrixXd jac = T.J_map.jacobian(x);
  // D(J e_i)(k, l) = d_l J(k, i)
  std::vector<Eigen::MatrixXd> DJcol(d, Eigen::MatrixXd(d, d));
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k)
      for (int l = 0; l < d; ++l) DJcol[i](k, l) = jac(k * d + i, l);
  const Eigen::MatrixXd Zero = Eigen::MatrixXd::Zero(d, d);
  double worst = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      const Eigen::VectorXd ei = Eigen::VectorXd::Unit(d, i);
      const Eigen::VectorXd ej = Eigen::VectorXd::Unit(d, j);
      const Eigen::VectorXd Jei = J.col(i), Jej = J.col(j);
      const Eigen::VectorXd N = lie_bracket(Jei, DJcol[i], Jej, DJcol[j]) -
                                J * lie_bracket(Jei, DJcol[i], ej, Zero) -
                                J * lie_bracket(ei, Zero, Jej, DJcol[j]) -
                                lie_bracket(ei, Zero, ej, Zero);
      worst = std::max(worst, N.norm());
    }
  return worst;
}

CrResult check_cr_restriction(const TubeModel& T, const Eigen::VectorXd& p) {
  const ManifoldSpec& M = *T.base;
  const int m = M.dim();
  const Eigen::MatrixXd Dj = M.embedding_map.jacobian(p);
  const auto qr = Dj.colPivHouseholderQr();
  const Eigen::MatrixXd J = T.J(zero_section(p));
  const Eigen::VectorXd theta = M.theta_map(p);
  CrResult r;
  for (const auto& v : levi_distribution(M, p)) {
    const Eigen::VectorXd w = qr.solve(M.ambient_J * (Dj * v));
    const Eigen::VectorXd Jv = J * zero_section(v);
    r.structure = std::max(r.structure, (Jv - zero_section(w)).norm());
    r.theta = std::max(r.theta, std::abs(theta.dot(Jv.head(m))));
  }
  return r;
}

Box common_domain(const TubeModel& a, const TubeModel& b) {
  if (a.domain.size() != b.domain.size())
    throw std::invalid_argument("compare_tubes: tube dimensions differ");
  Box box(a.domain.size());
  for (std::size_t i = 0; i < box.size(); ++i) {
    box[i] = {std::max(a.domain[i].lo, b.domain[i].lo), std::min(a.domain[i].hi, b.domain[i].hi)};
    if (box[i].lo > box[i].hi) throw std::invalid_argument("compare_tubes: disjoint domains");
  }
  return box;
}

TubeComparison compare_tubes(const TubeModel& a, const TubeModel& b,
                             const std::vector<Eigen::VectorXd>& points) {
  const Box box = common_domain(a, b);
  TubeComparison c;
  c.worst_gamma = c.worst_J = Eigen::VectorXd::Zero(a.dim());
  for (const auto& x : points) {
    if (!box_contains(box, x)) throw std::invalid_argument("compare_tubes: point outside common domain");
    const double dg = (a.gamma(x) - b.gamma(x)).norm();
    const double dJ = (a.J(x) - b.J(x)).norm();
    if (dg > c.gamma) {
      c.gamma = dg;
      c.worst_gamma = x;
    }
    if (dJ > c.J) {
      c.J = dJ;
      c.worst_J = x;
    }
  }
  return c;
}

}  // namespace adaptube
