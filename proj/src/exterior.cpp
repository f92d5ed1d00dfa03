#include "adaptube/exterior.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace adaptube {

namespace {

int popcount(std::uint32_t m) { return std::popcount(m); }

// Sign of sorting the concatenation I,J of two disjoint increasing index
// lists: (-1)^{#(i in I, j in J) with i > j}.
int merge_sign(std::uint32_t a, std::uint32_t b) {
  int inversions = 0;
  for (std::uint32_t rest = b; rest != 0; rest &= rest - 1) {
    const int j = std::countr_zero(rest);
    inversions += popcount(a >> (j + 1));
  }
  return (inversions & 1) ? -1 : 1;
}

void check_dim(int dim) {
  if (dim < 0 || dim > kMaxFormDim)
    throw std::invalid_argument("form dimension out of range");
}

}  // namespace

// ---- IndexTable ------------------------------------------------------------

IndexTable::IndexTable(int dim, int degree)
    : dim_(dim), degree_(degree), lookup_(std::size_t{1} << dim, -1) {
  // Lexicographic order on sorted index lists.
  std::vector<int> idx(degree);
  auto emit = [&](auto&& self, int slot, int start) -> void {
    if (slot == degree) {
      std::uint32_t m = 0;
      for (int i : idx) m |= 1u << i;
      lookup_[m] = static_cast<int>(masks_.size());
      masks_.push_back(m);
      return;
    }
    for (int i = start; i < dim; ++i) {
      idx[slot] = i;
      self(self, slot + 1, i + 1);
    }
  };
  emit(emit, 0, 0);
}

const IndexTable& IndexTable::get(int dim, int degree) {
  check_dim(dim);
  if (degree < 0 || degree > dim) throw std::invalid_argument("form degree out of range");
  static std::array<std::array<std::unique_ptr<IndexTable>, kMaxFormDim + 1>, kMaxFormDim + 1>
      tables;
  static std::once_flag once;
  std::call_once(once, [] {
    for (int m = 0; m <= kMaxFormDim; ++m)
      for (int k = 0; k <= m; ++k) tables[m][k].reset(new IndexTable(m, k));
  });
  return *tables[dim][degree];
}

std::vector<int> IndexTable::indices(int position) const {
  std::vector<int> out;
  for (std::uint32_t rest = masks_[position]; rest != 0; rest &= rest - 1)
    out.push_back(std::countr_zero(rest));
  return out;
}

// ---- AltForm ---------------------------------------------------------------

AltForm::AltForm(int dim, int degree)
    : dim_(dim), degree_(degree), coeffs_(IndexTable::get(dim, degree).size(), 0.0) {}

AltForm::AltForm(int dim, int degree, std::vector<double> coefficients)
    : dim_(dim), degree_(degree), coeffs_(std::move(coefficients)) {
  if (static_cast<int>(coeffs_.size()) != IndexTable::get(dim, degree).size())
    throw std::invalid_argument("AltForm: wrong number of coefficients");
}

AltForm AltForm::basis(int dim, std::initializer_list<int> indices) {
  AltForm out(dim, static_cast<int>(indices.size()));
  std::uint32_t mask = 0;
  int sign = 1;
  for (int i : indices) {
    if (i < 0 || i >= dim) throw std::invalid_argument("basis index out of range");
    const std::uint32_t bit = 1u << i;
    if (mask & bit) return out;  // repeated index: zero form
    sign *= merge_sign(mask, bit);
    mask |= bit;
  }
  out.coeffs_[IndexTable::get(dim, out.degree_).position(mask)] = sign;
  return out;
}

AltForm AltForm::scalar(int dim, double value) { return AltForm(dim, 0, {value}); }

AltForm AltForm::one_form(std::span<const double> components) {
  return AltForm(static_cast<int>(components.size()), 1,
                 std::vector<double>(components.begin(), components.end()));
}

double AltForm::coefficient(std::span<const int> sorted_indices) const {
  std::uint32_t mask = 0;
  for (int i : sorted_indices) mask |= 1u << i;
  if (popcount(mask) != degree_) throw std::invalid_argument("coefficient: bad multi-index");
  return coeffs_[IndexTable::get(dim_, degree_).position(mask)];
}

double AltForm::top() const {
  if (degree_ != dim_) throw std::invalid_argument("top(): form is not of top degree");
  return coeffs_.front();
}

double AltForm::norm() const {
  double s = 0.0;
  for (double c : coeffs_) s += c * c;
  return std::sqrt(s);
}

double AltForm::max_abs() const {
  double s = 0.0;
  for (double c : coeffs_) s = std::max(s, std::abs(c));
  return s;
}

AltForm AltForm::operator+(const AltForm& other) const {
  if (dim_ != other.dim_ || degree_ != other.degree_)
    throw std::invalid_argument("AltForm +: shape mismatch");
  AltForm r = *this;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) r.coeffs_[i] += other.coeffs_[i];
  return r;
}

AltForm AltForm::operator-(const AltForm& other) const { return *this + other * -1.0; }

AltForm AltForm::operator*(double s) const {
  AltForm r = *this;
  for (double& c : r.coeffs_) c *= s;
  return r;
}

Eigen::MatrixXd AltForm::as_matrix() const {
  if (degree_ != 2) throw std::invalid_argument("as_matrix: not a 2-form");
  const auto& table = IndexTable::get(dim_, 2);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(dim_, dim_);
  for (int p = 0; p < table.size(); ++p) {
    auto ij = table.indices(p);
    B(ij[0], ij[1]) = coeffs_[p];
    B(ij[1], ij[0]) = -coeffs_[p];
  }
  return B;
}

AltForm AltForm::from_matrix(const Eigen::MatrixXd& antisymmetric) {
  const int m = static_cast<int>(antisymmetric.rows());
  AltForm out(m, 2);
  const auto& table = IndexTable::get(m, 2);
  for (int p = 0; p < table.size(); ++p) {
    auto ij = table.indices(p);
    out.coeffs_[p] = antisymmetric(ij[0], ij[1]);
  }
  return out;
}

// ---- pointwise operations --------------------------------------------------

AltForm wedge(const AltForm& a, const AltForm& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("wedge: dimension mismatch");
  const int m = a.dim();
  if (a.degree() + b.degree() > m) throw std::invalid_argument("wedge: degree exceeds dimension");
  const auto& ta = IndexTable::get(m, a.degree());
  const auto& tb = IndexTable::get(m, b.degree());
  const auto& tr = IndexTable::get(m, a.degree() + b.degree());
  AltForm r(m, a.degree() + b.degree());
  for (int i = 0; i < ta.size(); ++i) {
    if (a[i] == 0.0) continue;
    const std::uint32_t ma = ta.mask(i);
    for (int j = 0; j < tb.size(); ++j) {
      const std::uint32_t mb = tb.mask(j);
      if (ma & mb) continue;
      r[tr.position(ma | mb)] += merge_sign(ma, mb) * a[i] * b[j];
    }
  }
  return r;
}

AltForm wedge_power(const AltForm& a, int k) {
  AltForm r = AltForm::scalar(a.dim(), 1.0);
  for (int i = 0; i < k; ++i) r = wedge(r, a);
  return r;
}

double eval_form(const AltForm& a, std::span<const Eigen::VectorXd> vectors) {
  const int k = a.degree();
  if (static_cast<int>(vectors.size()) != k) throw std::invalid_argument("eval_form: arity mismatch");
  for (const auto& v : vectors)
    if (v.size() != a.dim()) throw std::invalid_argument("eval_form: vector length mismatch");
  if (k == 0) return a[0];
  const auto& table = IndexTable::get(a.dim(), k);
  Eigen::MatrixXd sub(k, k);
  double total = 0.0;
  for (int p = 0; p < table.size(); ++p) {
    if (a[p] == 0.0) continue;
    auto idx = table.indices(p);
    for (int r = 0; r < k; ++r)
      for (int c = 0; c < k; ++c) sub(r, c) = vectors[c](idx[r]);
    total += a[p] * sub.determinant();
  }
  return total;
}

AltForm interior_product(const Eigen::VectorXd& v, const AltForm& a) {
  if (a.degree() < 1) throw std::invalid_argument("interior_product: degree-0 form");
  if (v.size() != a.dim()) throw std::invalid_argument("interior_product: dimension mismatch");
  const int m = a.dim();
  const auto& ta = IndexTable::get(m, a.degree());
  const auto& tr = IndexTable::get(m, a.degree() - 1);
  AltForm r(m, a.degree() - 1);
  for (int p = 0; p < ta.size(); ++p) {
    const std::uint32_t mask = ta.mask(p);
    for (std::uint32_t rest = mask; rest != 0; rest &= rest - 1) {
      const int i = std::countr_zero(rest);
      const int slot = popcount(mask & ((1u << i) - 1));
      const double sign = (slot & 1) ? -1.0 : 1.0;
      r[tr.position(mask & ~(1u << i))] += sign * v(i) * a[p];
    }
  }
  return r;
}

AltForm pullback(const AltForm& a, const Eigen::MatrixXd& L) {
  if (L.rows() != a.dim()) throw std::invalid_argument("pullback: dimension mismatch");
  const int src = static_cast<int>(L.cols());
  const int k = a.degree();
  if (k > src) throw std::invalid_argument("pullback: degree exceeds source dimension");
  AltForm r(src, k);
  if (k == 0) {
    r[0] = a[0];
    return r;
  }
  const auto& ta = IndexTable::get(a.dim(), k);
  const auto& tr = IndexTable::get(src, k);
  Eigen::MatrixXd sub(k, k);
  for (int q = 0; q < tr.size(); ++q) {
    auto cols = tr.indices(q);
    double total = 0.0;
    for (int p = 0; p < ta.size(); ++p) {
      if (a[p] == 0.0) continue;
      auto rows = ta.indices(p);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) sub(i, j) = L(rows[i], cols[j]);
      total += a[p] * sub.determinant();
    }
    r[q] = total;
  }
  return r;
}

// ---- fields ----------------------------------------------------------------

AltForm FormField::at(const Eigen::VectorXd& x) const {
  Eigen::VectorXd c = components(x);
  return AltForm(dim, degree, std::vector<double>(c.data(), c.data() + c.size()));
}

FormField make_form_field(int dim, int degree, SmoothMap components) {
  if (components.in_dim() != dim ||
      components.out_dim() != IndexTable::get(dim, degree).size())
    throw std::invalid_argument("make_form_field: component map has the wrong shape");
  return FormField{dim, degree, std::move(components)};
}

namespace {

// (dw)_J = sum over positions p of J, j = J[p], of (-1)^p d_j w_{J \ j}.
template <typename T>
void assemble_derivative(int dim, int degree, std::span<const Dual<T>> comps,
                         std::span<T> out) {
  const auto& tw = IndexTable::get(dim, degree);
  const auto& td = IndexTable::get(dim, degree + 1);
  for (int q = 0; q < td.size(); ++q) {
    const std::uint32_t mask = td.mask(q);
    T acc(0.0);
    int slot = 0;
    for (std::uint32_t rest = mask; rest != 0; rest &= rest - 1, ++slot) {
      const int j = std::countr_zero(rest);
      const T& partial = comps[tw.position(mask & ~(1u << j))].d[j];
      if (slot & 1)
        acc = acc - partial;
      else
        acc = acc + partial;
    }
    out[q] = acc;
  }
}

}  // namespace

AltForm exterior_derivative(const FormField& w, const Eigen::VectorXd& x) {
  if (x.size() != w.dim) throw std::invalid_argument("exterior_derivative: point dimension");
  if (w.degree + 1 > w.dim) throw std::invalid_argument("exterior_derivative: degree too high");
  std::vector<D1> xs = seed<D1>(std::span<const double>(x.data(), x.size()));
  std::vector<D1> comps = w.components(std::span<const D1>(xs));
  AltForm r(w.dim, w.degree + 1);
  std::vector<double> out(r.size());
  assemble_derivative<double>(w.dim, w.degree, std::span<const D1>(comps), std::span<double>(out));
  return AltForm(w.dim, w.degree + 1, std::move(out));
}

FormField exterior_derivative_field(const FormField& w) {
  if (w.degree + 1 > w.dim) throw std::invalid_argument("exterior_derivative: degree too high");
  const int dim = w.dim;
  const int degree = w.degree;
  SmoothMap inner = w.components;
  SmoothMap comps = make_map(dim, IndexTable::get(dim, degree + 1).size(),
                             [=](auto in, auto out) {
                               using T = typename decltype(out)::value_type;
                               if constexpr (!can_lift_v<T>) {
                                 throw UnsupportedOrder("exterior derivative needs one more derivative level");
                               } else {
                                 std::vector<Dual<T>> xs = lift<T>(in);
                                 std::vector<Dual<T>> c = inner(std::span<const Dual<T>>(xs));
                                 assemble_derivative<T>(dim, degree, std::span<const Dual<T>>(c), out);
                               }
                             });
  return FormField{dim, degree + 1, comps};
}

Eigen::VectorXd lie_bracket(const Eigen::VectorXd& X, const Eigen::MatrixXd& DX,
                            const Eigen::VectorXd& Y, const Eigen::MatrixXd& DY) {
  return DY * X - DX * Y;
}

Eigen::VectorXd lie_bracket(const VectorField& X, const VectorField& Y, const Eigen::VectorXd& x) {
  if (X.in_dim() != Y.in_dim() || X.out_dim() != X.in_dim() || Y.out_dim() != Y.in_dim())
    throw std::invalid_argument("lie_bracket: fields must be R^m -> R^m");
  return lie_bracket(X(x), X.jacobian(x), Y(x), Y.jacobian(x));
}

}  // namespace adaptube
