#include "adaptube/contact.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "adaptube/linalg.hpp"

namespace adaptube {

// ---- ManifoldSpec ----------------------------------------------------------

std::vector<std::string> ambient_coordinate_names(int ambient_dim) {
  std::vector<std::string> out;
  for (int k = 1; k <= ambient_dim; ++k) out.push_back("u" + std::to_string(k));
  return out;
}

std::vector<std::string> ManifoldSpec::ambient_coords() const {
  return ambient_coordinate_names(ambient_dim());
}

std::vector<std::string> ManifoldSpec::tube_coords() const {
  std::vector<std::string> out = coords;
  out.push_back("sigma");
  return out;
}

Eigen::MatrixXd standard_complex_structure(int ambient_dim) {
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(ambient_dim, ambient_dim);
  for (int k = 0; k + 1 < ambient_dim; k += 2) {
    K(k + 1, k) = 1.0;
    K(k, k + 1) = -1.0;
  }
  return K;
}

void ManifoldSpec::finalize() {
  const int m = dim();
  if (n < 1) throw SpecError("dim_n must be >= 1");
  if (static_cast<int>(coords.size()) != m)
    throw SpecError("expected " + std::to_string(m) + " coordinates");
  if (static_cast<int>(theta.size()) != m) throw SpecError("theta needs one component per coordinate");
  if (static_cast<int>(chart_box.size()) != m) throw SpecError("chart_box needs one interval per coordinate");
  for (const auto& iv : chart_box)
    if (!(iv.lo < iv.hi)) throw SpecError("chart_box interval must satisfy lo < hi");
  const int N2 = ambient_dim();
  if (N2 < 2 || N2 % 2 != 0) throw SpecError("embedding must have an even number of components");
  if (N2 != m + 1) throw SpecError("embedding must map into R^{2n+2}");
  if (m + 1 > kMaxDirections) throw SpecError("dimension too large (tube dimension must be <= 8)");
  if (ambient_J.rows() != N2 || ambient_J.cols() != N2)
    throw SpecError("ambient_J must be " + std::to_string(N2) + "x" + std::to_string(N2));
  if (static_cast<int>(reeb_extension.size()) != N2)
    throw SpecError("reeb_extension needs one component per ambient coordinate");
  if (reeb && static_cast<int>(reeb->size()) != m) throw SpecError("reeb needs one component per coordinate");
  if (closed_form_tube && static_cast<int>(closed_form_tube->size()) != N2)
    throw SpecError("closed_form_tube needs one component per ambient coordinate");

  theta_map = make_expr_map(theta);
  embedding_map = make_expr_map(embedding);
  extension_map = make_expr_map(reeb_extension);
  reeb_map.reset();
  tube_map.reset();
  if (reeb) reeb_map = make_expr_map(*reeb);
  if (closed_form_tube) tube_map = make_expr_map(*closed_form_tube);
}

// ---- registry --------------------------------------------------------------

namespace {

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

ManifoldSpec heisenberg(int n) {
  if (n < 1 || 2 * n + 2 > kMaxDirections) throw SpecError("heisenberg: n must be in [1, 3]");
  ManifoldSpec M;
  M.name = "heisenberg";
  M.n = n;
  for (int j = 1; j <= n; ++j) M.coords.push_back("x" + std::to_string(j));
  for (int j = 1; j <= n; ++j) M.coords.push_back("y" + std::to_string(j));
  M.coords.push_back("t");
  const int m = M.dim();

  std::vector<std::string> theta(m), reeb(m, "0");
  std::vector<std::string> squares;
  for (int j = 1; j <= n; ++j) {
    const std::string x = "x" + std::to_string(j), y = "y" + std::to_string(j);
    theta[j - 1] = "-" + y;
    theta[n + j - 1] = x;
    squares.push_back(x + "^2 + " + y + "^2");
  }
  theta[m - 1] = "1";
  reeb[m - 1] = "1";

  // z_j = (x_j + i y_j)/sqrt(2), w = t + i|z|^2: with this scaling the CR
  // structure of the quadric is annihilated by theta.
  std::vector<std::string> emb, ext(2 * n + 2, "0"), tube;
  for (int j = 1; j <= n; ++j) {
    emb.push_back("x" + std::to_string(j) + "/sqrt(2)");
    emb.push_back("y" + std::to_string(j) + "/sqrt(2)");
  }
  const std::string im_w = "(" + join(squares, " + ") + ")/2";
  emb.push_back("t");
  emb.push_back(im_w);
  ext[2 * n] = "1";
  tube = emb;
  tube.back() = im_w + " + sigma";

  M.theta = parse_all(theta, M.coords);
  M.chart_box.assign(m, Interval{-1.0, 1.0});
  M.embedding = parse_all(emb, M.coords);
  M.ambient_J = standard_complex_structure(2 * n + 2);
  M.reeb_extension = parse_all(ext, ambient_coordinate_names(2 * n + 2));
  M.reeb = parse_all(reeb, M.coords);
  M.closed_form_tube = parse_all(tube, M.tube_coords());
  M.default_sigma_max = 0.5;
  M.finalize();
  return M;
}

ManifoldSpec sphere(int n) {
  if (n < 1 || 2 * n + 2 > kMaxDirections) throw SpecError("sphere: n must be in [1, 3]");
  ManifoldSpec M;
  M.name = "sphere";
  M.n = n;
  const int m = 2 * n + 1;
  for (int k = 1; k <= m; ++k) M.coords.push_back("v" + std::to_string(k));
  auto v = [](int k) { return "v" + std::to_string(k); };

  std::vector<std::string> sq;
  for (int k = 1; k <= m; ++k) sq.push_back(v(k) + "^2");
  const std::string S = "(" + join(sq, " + ") + ")";
  const std::string den = "(1 + " + S + ")";

  // Pullback of sum(x dy - y dx) through the inverse stereographic map
  // X_0 = (1 - S)/(1 + S), X_k = 2 v_k/(1 + S).
  std::vector<std::string> theta(m);
  theta[0] = "2*(1 - " + S + " + 2*v1^2)/" + den + "^2";
  for (int i = 2; i <= m; ++i) {
    const std::string partner = (i % 2 == 0) ? " - " + v(i + 1) : " + " + v(i - 1);
    theta[i - 1] = "4*(v1*" + v(i) + partner + ")/" + den + "^2";
  }

  std::vector<std::string> emb;
  emb.push_back("(1 - " + S + ")/" + den);
  for (int k = 1; k <= m; ++k) emb.push_back("2*" + v(k) + "/" + den);

  // xi_ext(z) = i z.
  const int N2 = 2 * n + 2;
  std::vector<std::string> ext(N2);
  for (int j = 1; j <= n + 1; ++j) {
    ext[2 * j - 2] = "-u" + std::to_string(2 * j);
    ext[2 * j - 1] = "u" + std::to_string(2 * j - 1);
  }

  std::vector<std::string> tube;
  for (const auto& e : emb) tube.push_back("exp(-sigma)*(" + e + ")");

  M.theta = parse_all(theta, M.coords);
  M.chart_box.assign(m, Interval{-1.2, 1.2});
  M.embedding = parse_all(emb, M.coords);
  M.ambient_J = standard_complex_structure(N2);
  M.reeb_extension = parse_all(ext, ambient_coordinate_names(N2));
  M.closed_form_tube = parse_all(tube, M.tube_coords());
  M.default_sigma_max = 0.3;
  M.finalize();
  return M;
}

std::vector<ExampleInfo> list_examples() {
  std::vector<ExampleInfo> out;
  for (const char* name : {"heisenberg", "sphere"})
    for (int n = 1; n <= 3; ++n) out.push_back({name, n, 2 * n + 1});
  return out;
}

ManifoldSpec make_example(const std::string& name, int n) {
  ManifoldSpec M;
  if (name == "heisenberg")
    M = heisenberg(n);
  else if (name == "sphere")
    M = sphere(n);
  else
    throw SpecError("unknown example '" + name + "'");
  ValidationReport report = validate_spec(M, 16);
  if (!report.pass()) throw SpecError("builtin example failed validation: " + report.summary());
  return M;
}

// ---- contact geometry ------------------------------------------------------

FormField theta_form(const ManifoldSpec& M) { return make_form_field(M.dim(), 1, M.theta_map); }

namespace {

struct ThetaJet {
  Eigen::VectorXd theta;  // primal
  Eigen::MatrixXd omega;  // primal d theta, omega(i,j) = d theta(e_i, e_j)
};

std::vector<int> select_rows(const Eigen::MatrixXd& omega) {
  const int m = static_cast<int>(omega.rows());
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(omega.transpose());
  std::vector<int> rows;
  for (int k = 0; k < m - 1; ++k) rows.push_back(qr.colsPermutation().indices()(k));
  return rows;
}

void check_rank(const ThetaJet& jet) {
  const int m = static_cast<int>(jet.theta.size());
  Eigen::MatrixXd A(m + 1, m);
  A.row(0) = jet.theta.transpose();
  A.bottomRows(m) = jet.omega;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const auto& s = svd.singularValues();
  if (s(0) == 0.0 || s(m - 1) / s(0) < 1e-10) {
    std::ostringstream os;
    os << "theta is not contact here: singular value ratio " << (s(0) == 0.0 ? 0.0 : s(m - 1) / s(0));
    throw SingularContact(os.str());
  }
}

// Solves [theta; omega_rows] xi = e_0 over the tower scalar T.
template <typename T>
std::vector<T> reeb_solve(const ManifoldSpec& M, std::span<const T> p,
                          const std::vector<int>* explicit_rows) {
  if constexpr (!can_lift_v<T>) {
    throw UnsupportedOrder("reeb field: derivative order too high");
  } else {
    const int m = M.dim();
    std::vector<Dual<T>> xs = lift<T>(p);
    std::vector<Dual<T>> th = M.theta_map(std::span<const Dual<T>>(xs));
    std::vector<T> omega(m * m);
    ThetaJet jet{Eigen::VectorXd(m), Eigen::MatrixXd(m, m)};
    for (int i = 0; i < m; ++i) {
      jet.theta(i) = primal(th[i].v);
      for (int j = 0; j < m; ++j) {
        omega[i * m + j] = th[j].d[i] - th[i].d[j];
        jet.omega(i, j) = primal(omega[i * m + j]);
      }
    }
    check_rank(jet);
    std::vector<int> rows = explicit_rows ? *explicit_rows : select_rows(jet.omega);
    if (static_cast<int>(rows.size()) != m - 1)
      throw std::invalid_argument("reeb_field: need exactly m-1 rows of d theta");

    std::vector<T> A(m * m), b(m, T(0.0));
    for (int j = 0; j < m; ++j) A[j] = th[j].v;
    b[0] = T(1.0);
    for (int r = 0; r < m - 1; ++r)
      for (int j = 0; j < m; ++j) A[(r + 1) * m + j] = omega[rows[r] * m + j];
    std::vector<T> xi;
    try {
      xi = solve_dense<T>(std::move(A), std::move(b), m, 1);
    } catch (const SingularMatrix&) {
      throw SingularContact("reeb_field: selected rows are dependent");
    }

    // Rows left out of the square system must hold as well.
    Eigen::VectorXd xi0(m);
    for (int j = 0; j < m; ++j) xi0(j) = primal(xi[j]);
    const double scale = 1.0 + jet.omega.cwiseAbs().maxCoeff();
    const double worst = (jet.omega * xi0).cwiseAbs().maxCoeff();
    if (worst > 1e-8 * scale * (1.0 + xi0.norm()))
      throw SingularContact("reeb_field: d theta rows are inconsistent");
    return xi;
  }
}

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

Eigen::VectorXd reeb_field(const ManifoldSpec& M, const Eigen::VectorXd& p) {
  return to_eigen(reeb_solve<double>(M, std::span<const double>(p.data(), p.size()), nullptr));
}

Eigen::VectorXd reeb_field(const ManifoldSpec& M, const Eigen::VectorXd& p,
                           std::span<const int> dtheta_rows) {
  std::vector<int> rows(dtheta_rows.begin(), dtheta_rows.end());
  return to_eigen(reeb_solve<double>(M, std::span<const double>(p.data(), p.size()), &rows));
}

VectorField reeb_vector_field(const ManifoldSpec& M) {
  // The spec is captured by value so the field outlives the caller's copy.
  auto spec = std::make_shared<const ManifoldSpec>(M);
  return make_map(M.dim(), M.dim(), [spec](auto in, auto out) {
    using T = typename decltype(out)::value_type;
    std::vector<T> xi = reeb_solve<T>(*spec, in, nullptr);
    std::copy(xi.begin(), xi.end(), out.begin());
  });
}

double contact_volume(const ManifoldSpec& M, const Eigen::VectorXd& p) {
  FormField th = theta_form(M);
  AltForm theta = th.at(p);
  AltForm dtheta = exterior_derivative(th, p);
  const double v = wedge(theta, wedge_power(dtheta, M.n)).top();
  if (std::abs(v) < 1e-10)
    throw DegenerateContact("theta ^ (d theta)^n vanishes: value " + std::to_string(v), v);
  return v;
}

std::vector<Eigen::VectorXd> levi_distribution(const ManifoldSpec& M, const Eigen::VectorXd& p) {
  const int m = M.dim();
  Eigen::VectorXd theta = M.theta_map(p);
  if (theta.norm() < 1e-14) throw SingularContact("levi_distribution: theta vanishes");
  Eigen::MatrixXd column = theta;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(column);
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(m, m);
  std::vector<Eigen::VectorXd> out;
  for (int k = 1; k < m; ++k) out.push_back(Q.col(k));
  return out;
}

double levi_closure_residual(const ManifoldSpec& M, const Eigen::VectorXd& p) {
  auto H = levi_distribution(M, p);
  Eigen::MatrixXd Dj = M.embedding_map.jacobian(p);
  Eigen::MatrixXd DjH(Dj.rows(), static_cast<Eigen::Index>(H.size()));
  for (std::size_t k = 0; k < H.size(); ++k) DjH.col(static_cast<Eigen::Index>(k)) = Dj * H[k];
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(DjH);
  double worst = 0.0;
  for (std::size_t k = 0; k < H.size(); ++k) {
    Eigen::VectorXd w = M.ambient_J * DjH.col(static_cast<Eigen::Index>(k));
    Eigen::VectorXd coeffs = qr.solve(w);
    worst = std::max(worst, (DjH * coeffs - w).norm());
  }
  return worst;
}

double reeb_extension_residual(const ManifoldSpec& M, const Eigen::VectorXd& p) {
  Eigen::VectorXd xi = reeb_field(M, p);
  Eigen::VectorXd lhs = M.embedding_map.jacobian(p) * xi;
  Eigen::VectorXd rhs = M.extension_map(M.embedding_map(p));
  return (lhs - rhs).cwiseAbs().maxCoeff();
}

// ---- validation ------------------------------------------------------------

bool ValidationReport::pass() const {
  return std::all_of(items.begin(), items.end(), [](const auto& i) { return i.pass; });
}

const ValidationItem* ValidationReport::find(const std::string& name) const {
  for (const auto& i : items)
    if (i.name == name) return &i;
  return nullptr;
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& i : items) {
    if (i.pass) continue;
    if (!first) os << "; ";
    first = false;
    os << i.name << " failed (value " << i.value << ", threshold " << i.threshold << ")";
    if (!i.detail.empty()) os << ": " << i.detail;
  }
  return first ? "all checks passed" : os.str();
}

namespace {

// Runs fn over the samples, keeping the max residual; the first exception
// marks the item failed and records its message.
template <typename Fn>
ValidationItem max_residual_item(const std::string& name, double threshold,
                                 const std::vector<Eigen::VectorXd>& pts, Fn fn) {
  ValidationItem item{name, 0.0, threshold, false, ""};
  try {
    for (const auto& p : pts) item.value = std::max(item.value, fn(p));
    item.pass = item.value < threshold;
  } catch (const std::exception& e) {
    item.value = INFINITY;
    item.detail = e.what();
  }
  return item;
}

}  // namespace

ValidationReport validate_spec(const ManifoldSpec& M, int samples, std::uint64_t seed) {
  ValidationReport report;
  const auto pts = halton_points(M.chart_box, std::max(samples, 1), seed);

  {
    ValidationItem item{"contact_volume", INFINITY, 1e-10, false, ""};
    try {
      for (const auto& p : pts) {
        FormField th = theta_form(M);
        const double v = wedge(th.at(p), wedge_power(exterior_derivative(th, p), M.n)).top();
        item.value = std::min(item.value, std::abs(v));
      }
      item.pass = item.value >= item.threshold;
      if (!item.pass) item.detail = "theta ^ (d theta)^n vanishes at a sample";
    } catch (const std::exception& e) {
      item.value = 0.0;
      item.detail = e.what();
    }
    report.items.push_back(item);
  }

  {
    const Eigen::MatrixXd& J = M.ambient_J;
    ValidationItem item{"ambient_J_squared", 0.0, 1e-12, false, ""};
    item.value = (J * J + Eigen::MatrixXd::Identity(J.rows(), J.cols())).cwiseAbs().maxCoeff();
    item.pass = item.value < item.threshold;
    if (!item.pass) item.detail = "ambient_J^2 != -I";
    report.items.push_back(item);
  }

  report.items.push_back(max_residual_item("reeb_conditions", 1e-10, pts, [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd xi = reeb_field(M, p);
    const double a = std::abs(M.theta_map(p).dot(xi) - 1.0);
    const double b = interior_product(xi, exterior_derivative(theta_form(M), p)).max_abs();
    return std::max(a, b);
  }));

  report.items.push_back(max_residual_item("reeb_extension", 1e-9, pts, [&](const Eigen::VectorXd& p) {
    return reeb_extension_residual(M, p);
  }));

  if (M.reeb_map) {
    report.items.push_back(max_residual_item("reeb_formula", 1e-9, pts, [&](const Eigen::VectorXd& p) {
      return ((*M.reeb_map)(p) - reeb_field(M, p)).cwiseAbs().maxCoeff();
    }));
  }

  if (M.tube_map) {
    report.items.push_back(max_residual_item("tube_zero_slice", 1e-10, pts, [&](const Eigen::VectorXd& p) {
      Eigen::VectorXd xs(p.size() + 1);
      xs << p, 0.0;
      return ((*M.tube_map)(xs) - M.embedding_map(p)).cwiseAbs().maxCoeff();
    }));
  }
  return report;
}

}  // namespace adaptube
