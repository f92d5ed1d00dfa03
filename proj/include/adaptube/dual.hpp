#pragma once

// Nested forward-mode dual numbers.
//
// Dual<double> carries a value and its first partials in up to
// kMaxDirections seeded directions. Nesting (Dual<Dual<double>>) yields
// exact second partials, and one more level gives third partials, which
// is as deep as anything in this library needs.

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace adaptube {

class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// log of a non-positive argument, sqrt of a negative one.
class DomainError : public EvaluationError {
 public:
  using EvaluationError::EvaluationError;
};

/// Overflow, 0/0 and friends. Raised instead of letting NaN propagate.
class NonFiniteError : public EvaluationError {
 public:
  using EvaluationError::EvaluationError;
};

/// Requested derivative order exceeds what a function can provide.
class UnsupportedOrder : public EvaluationError {
 public:
  using EvaluationError::EvaluationError;
};

inline constexpr int kMaxDirections = 8;

template <typename T>
struct Dual {
  T v{};
  std::array<T, kMaxDirections> d{};
  int n = 0;

  Dual() = default;
  Dual(double c) : v(c) {}  // NOLINT(google-explicit-constructor)
};

using D1 = Dual<double>;
using D2 = Dual<D1>;
using D3 = Dual<D2>;
using Dual2 = D2;

template <typename T>
struct is_dual : std::false_type {};
template <typename T>
struct is_dual<Dual<T>> : std::true_type {};

/// True when Dual<T> is still a supported tower level.
template <typename T>
inline constexpr bool can_lift_v = !std::is_same_v<T, D3>;

inline double primal(double x) { return x; }
template <typename T>
double primal(const Dual<T>& x) {
  return primal(x.v);
}

inline bool all_finite(double x) { return std::isfinite(x); }
template <typename T>
bool all_finite(const Dual<T>& x) {
  if (!all_finite(x.v)) return false;
  for (int i = 0; i < x.n; ++i)
    if (!all_finite(x.d[i])) return false;
  return true;
}

// ---- arithmetic ----------------------------------------------------------

template <typename T>
Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) {
  Dual<T> r;
  r.v = a.v + b.v;
  r.n = std::max(a.n, b.n);
  for (int i = 0; i < r.n; ++i) r.d[i] = a.d[i] + b.d[i];
  return r;
}

template <typename T>
Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) {
  Dual<T> r;
  r.v = a.v - b.v;
  r.n = std::max(a.n, b.n);
  for (int i = 0; i < r.n; ++i) r.d[i] = a.d[i] - b.d[i];
  return r;
}

template <typename T>
Dual<T> operator-(const Dual<T>& a) {
  Dual<T> r;
  r.v = -a.v;
  r.n = a.n;
  for (int i = 0; i < r.n; ++i) r.d[i] = -a.d[i];
  return r;
}

template <typename T>
Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) {
  Dual<T> r;
  r.v = a.v * b.v;
  r.n = std::max(a.n, b.n);
  for (int i = 0; i < r.n; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
  return r;
}

template <typename T>
Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
  Dual<T> r;
  r.v = a.v / b.v;
  r.n = std::max(a.n, b.n);
  for (int i = 0; i < r.n; ++i) r.d[i] = (a.d[i] - r.v * b.d[i]) / b.v;
  return r;
}

template <typename T>
Dual<T> operator+(const Dual<T>& a, double c) {
  Dual<T> r = a;
  r.v = r.v + c;
  return r;
}
template <typename T>
Dual<T> operator+(double c, const Dual<T>& a) {
  return a + c;
}
template <typename T>
Dual<T> operator-(const Dual<T>& a, double c) {
  Dual<T> r = a;
  r.v = r.v - c;
  return r;
}
template <typename T>
Dual<T> operator-(double c, const Dual<T>& a) {
  return -a + c;
}
template <typename T>
Dual<T> operator*(const Dual<T>& a, double c) {
  Dual<T> r;
  r.v = a.v * c;
  r.n = a.n;
  for (int i = 0; i < r.n; ++i) r.d[i] = a.d[i] * c;
  return r;
}
template <typename T>
Dual<T> operator*(double c, const Dual<T>& a) {
  return a * c;
}
template <typename T>
Dual<T> operator/(const Dual<T>& a, double c) {
  return a * (1.0 / c);
}
template <typename T>
Dual<T> operator/(double c, const Dual<T>& a) {
  return Dual<T>(c) / a;
}

template <typename T>
Dual<T>& operator+=(Dual<T>& a, const Dual<T>& b) {
  return a = a + b;
}
template <typename T>
Dual<T>& operator-=(Dual<T>& a, const Dual<T>& b) {
  return a = a - b;
}
template <typename T>
Dual<T>& operator*=(Dual<T>& a, const Dual<T>& b) {
  return a = a * b;
}

// ---- elementary functions ------------------------------------------------
//
// Unqualified calls inside namespace adaptube resolve to these for both
// double and Dual arguments.

inline double sin(double x) { return std::sin(x); }
inline double cos(double x) { return std::cos(x); }
inline double exp(double x) { return std::exp(x); }
inline double tanh(double x) { return std::tanh(x); }
inline double log(double x) {
  if (!(x > 0.0))
    throw DomainError("log of non-positive argument " + std::to_string(x));
  return std::log(x);
}
inline double sqrt(double x) {
  if (x < 0.0)
    throw DomainError("sqrt of negative argument " + std::to_string(x));
  return std::sqrt(x);
}

namespace detail {
// f(a) given f(a.v) and f'(a.v).
template <typename T>
Dual<T> chain(const Dual<T>& a, const T& f, const T& df) {
  Dual<T> r;
  r.v = f;
  r.n = a.n;
  for (int i = 0; i < r.n; ++i) r.d[i] = df * a.d[i];
  return r;
}
}  // namespace detail

template <typename T>
Dual<T> sin(const Dual<T>& a) {
  return detail::chain(a, T(sin(a.v)), T(cos(a.v)));
}
template <typename T>
Dual<T> cos(const Dual<T>& a) {
  return detail::chain(a, T(cos(a.v)), T(-sin(a.v)));
}
template <typename T>
Dual<T> exp(const Dual<T>& a) {
  T e = exp(a.v);
  return detail::chain(a, e, e);
}
template <typename T>
Dual<T> log(const Dual<T>& a) {
  T l = log(a.v);
  return detail::chain(a, l, T(1.0 / a.v));
}
template <typename T>
Dual<T> sqrt(const Dual<T>& a) {
  T s = sqrt(a.v);
  if (primal(s) == 0.0 && a.n > 0)
    throw NonFiniteError("sqrt is not differentiable at 0");
  return detail::chain(a, s, T(0.5 / s));
}
template <typename T>
Dual<T> tanh(const Dual<T>& a) {
  T t = tanh(a.v);
  return detail::chain(a, t, T(1.0 - t * t));
}

/// Integer power by repeated multiplication; negative exponents divide.
template <typename T>
T pow_int(const T& base, int k) {
  T r(1.0);
  int m = k < 0 ? -k : k;
  for (int i = 0; i < m; ++i) r = r * base;
  if (k < 0) r = T(1.0) / r;
  return r;
}

// ---- seeding -------------------------------------------------------------

/// Variable x_index of an n-variable problem, seeded densely at every
/// nesting level.
template <typename T>
T make_variable(double x, int index, int n) {
  if constexpr (std::is_same_v<T, double>) {
    (void)index;
    (void)n;
    return x;
  } else {
    using Inner = decltype(T{}.v);
    T r;
    r.v = make_variable<Inner>(x, index, n);
    r.n = n;
    r.d[index] = Inner(1.0);
    return r;
  }
}

template <typename T>
std::vector<T> seed(std::span<const double> x) {
  if (static_cast<int>(x.size()) > kMaxDirections)
    throw std::invalid_argument("too many seeded directions");
  std::vector<T> out;
  out.reserve(x.size());
  const int n = static_cast<int>(x.size());
  for (int i = 0; i < n; ++i) out.push_back(make_variable<T>(x[i], i, n));
  return out;
}

/// Wrap T-valued inputs as Dual<T> with one fresh direction per input.
/// The partials of a function of the result, read from .d[k], are T-valued
/// and carry whatever outer derivatives the inputs already had.
template <typename T>
std::vector<Dual<T>> lift(std::span<const T> x) {
  if (static_cast<int>(x.size()) > kMaxDirections)
    throw std::invalid_argument("too many seeded directions");
  std::vector<Dual<T>> out(x.size());
  const int n = static_cast<int>(x.size());
  for (int i = 0; i < n; ++i) {
    out[i].v = x[i];
    out[i].n = n;
    out[i].d[i] = T(1.0);
  }
  return out;
}

/// Value, gradient and (optionally) Hessian of a scalar function.
struct Jet2 {
  double value = 0.0;
  std::vector<double> gradient;
  std::vector<std::vector<double>> hessian;
};

inline void require_finite(double x, const char* what) {
  if (!std::isfinite(x))
    throw NonFiniteError(std::string("non-finite value in ") + what);
}

/// Evaluates f at x with exact derivatives up to `order` (0, 1 or 2).
/// f must be callable as f(std::span<const T>) -> T for double, D1 and D2.
template <typename F>
Jet2 evaluate_with_derivatives(const F& f, std::span<const double> x,
                               int order) {
  const int m = static_cast<int>(x.size());
  Jet2 out;
  if (order < 0 || order > 2)
    throw std::invalid_argument("derivative order must be 0, 1 or 2");
  if (order == 0) {
    out.value = f(x);
    require_finite(out.value, "function value");
    return out;
  }
  if (order == 1) {
    std::vector<D1> xs = seed<D1>(x);
    D1 r = f(std::span<const D1>(xs));
    out.value = r.v;
    out.gradient.assign(m, 0.0);
    for (int i = 0; i < m; ++i) out.gradient[i] = r.d[i];
  } else {
    std::vector<D2> xs = seed<D2>(x);
    D2 r = f(std::span<const D2>(xs));
    out.value = r.v.v;
    out.gradient.assign(m, 0.0);
    out.hessian.assign(m, std::vector<double>(m, 0.0));
    for (int i = 0; i < m; ++i) out.gradient[i] = r.v.d[i];
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) out.hessian[i][j] = r.d[i].d[j];
    // Nested seeding computes H_ij and H_ji along different paths.
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) {
        double s = 0.5 * (out.hessian[i][j] + out.hessian[j][i]);
        out.hessian[i][j] = out.hessian[j][i] = s;
      }
  }
  require_finite(out.value, "function value");
  for (double g : out.gradient) require_finite(g, "gradient");
  for (const auto& row : out.hessian)
    for (double h : row) require_finite(h, "hessian");
  return out;
}

}  // namespace adaptube
