#pragma once

// Type-erased smooth maps R^in -> R^out, evaluable over every level of the
// dual-number tower. Parsed expressions, generic lambdas and numerically
// differentiated flow maps all hide behind this one interface, so forms
// built from them can be differentiated by the same machinery.

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "adaptube/dual.hpp"

namespace adaptube {

class SmoothMap {
 public:
  struct Concept {
    virtual ~Concept() = default;
    virtual void eval(std::span<const double> in, std::span<double> out) const = 0;
    virtual void eval(std::span<const D1> in, std::span<D1> out) const = 0;
    virtual void eval(std::span<const D2> in, std::span<D2> out) const = 0;
    virtual void eval(std::span<const D3> in, std::span<D3> out) const = 0;
  };

  SmoothMap() = default;
  SmoothMap(int in_dim, int out_dim, std::shared_ptr<const Concept> impl)
      : in_dim_(in_dim), out_dim_(out_dim), impl_(std::move(impl)) {}

  int in_dim() const { return in_dim_; }
  int out_dim() const { return out_dim_; }
  bool valid() const { return impl_ != nullptr; }

  template <typename T>
  void eval(std::span<const T> in, std::span<T> out) const {
    if (static_cast<int>(in.size()) != in_dim_ ||
        static_cast<int>(out.size()) != out_dim_)
      throw std::invalid_argument("SmoothMap: dimension mismatch");
    impl_->eval(in, out);
  }

  template <typename T>
  std::vector<T> operator()(std::span<const T> in) const {
    std::vector<T> out(out_dim_);
    eval<T>(in, std::span<T>(out));
    return out;
  }

  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const {
    Eigen::VectorXd out(out_dim_);
    eval<double>(std::span<const double>(x.data(), x.size()),
                 std::span<double>(out.data(), out.size()));
    return out;
  }

  /// Jacobian (out x in) at x, exact via one dual pass.
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const {
    std::vector<D1> xs = seed<D1>(std::span<const double>(x.data(), x.size()));
    std::vector<D1> ys = (*this)(std::span<const D1>(xs));
    Eigen::MatrixXd J(out_dim_, in_dim_);
    for (int r = 0; r < out_dim_; ++r)
      for (int c = 0; c < in_dim_; ++c) J(r, c) = ys[r].d[c];
    return J;
  }

 private:
  int in_dim_ = 0;
  int out_dim_ = 0;
  std::shared_ptr<const Concept> impl_;
};

namespace detail {
template <typename F>
class LambdaModel final : public SmoothMap::Concept {
 public:
  explicit LambdaModel(F f) : f_(std::move(f)) {}
  void eval(std::span<const double> in, std::span<double> out) const override { f_(in, out); }
  void eval(std::span<const D1> in, std::span<D1> out) const override { f_(in, out); }
  void eval(std::span<const D2> in, std::span<D2> out) const override { f_(in, out); }
  void eval(std::span<const D3> in, std::span<D3> out) const override { f_(in, out); }

 private:
  F f_;
};
}  // namespace detail

/// Wraps a generic callable `f(std::span<const T> in, std::span<T> out)`.
template <typename F>
SmoothMap make_map(int in_dim, int out_dim, F f) {
  return SmoothMap(in_dim, out_dim,
                   std::make_shared<detail::LambdaModel<F>>(std::move(f)));
}

/// First-order map backed by plain double callbacks for the value and the
/// Jacobian (typically finite differences). Higher tower levels throw.
SmoothMap make_numeric_map(
    int in_dim, int out_dim,
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> value,
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian);

/// Constant map.
SmoothMap make_constant_map(int in_dim, std::vector<double> values);

/// Coordinate projection x -> x[index].
SmoothMap make_coordinate_map(int in_dim, int index);

}  // namespace adaptube
