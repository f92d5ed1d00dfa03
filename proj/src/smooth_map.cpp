#include "adaptube/smooth_map.hpp"

#include <functional>

namespace adaptube {

namespace {

class NumericModel final : public SmoothMap::Concept {
 public:
  NumericModel(int in_dim, int out_dim,
               std::function<Eigen::VectorXd(const Eigen::VectorXd&)> value,
               std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian)
      : in_dim_(in_dim),
        out_dim_(out_dim),
        value_(std::move(value)),
        jacobian_(std::move(jacobian)) {}

  void eval(std::span<const double> in, std::span<double> out) const override {
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(in.data(), in_dim_);
    Eigen::VectorXd y = value_(x);
    for (int k = 0; k < out_dim_; ++k) out[k] = y(k);
  }

  void eval(std::span<const D1> in, std::span<D1> out) const override {
    Eigen::VectorXd x(in_dim_);
    int dirs = 0;
    for (int i = 0; i < in_dim_; ++i) {
      x(i) = in[i].v;
      dirs = std::max(dirs, in[i].n);
    }
    Eigen::VectorXd y = value_(x);
    Eigen::MatrixXd J = jacobian_(x);
    for (int k = 0; k < out_dim_; ++k) {
      D1 r;
      r.v = y(k);
      r.n = dirs;
      for (int s = 0; s < dirs; ++s) {
        double acc = 0.0;
        for (int i = 0; i < in_dim_; ++i) acc += J(k, i) * in[i].d[s];
        r.d[s] = acc;
      }
      out[k] = r;
    }
  }

  void eval(std::span<const D2>, std::span<D2>) const override {
    throw UnsupportedOrder("numerically differentiated map supports first order only");
  }
  void eval(std::span<const D3>, std::span<D3>) const override {
    throw UnsupportedOrder("numerically differentiated map supports first order only");
  }

 private:
  int in_dim_;
  int out_dim_;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> value_;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian_;
};

}  // namespace

SmoothMap make_numeric_map(
    int in_dim, int out_dim,
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> value,
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian) {
  return SmoothMap(in_dim, out_dim,
                   std::make_shared<NumericModel>(in_dim, out_dim, std::move(value),
                                                  std::move(jacobian)));
}

SmoothMap make_constant_map(int in_dim, std::vector<double> values) {
  const int out_dim = static_cast<int>(values.size());
  return make_map(in_dim, out_dim, [values = std::move(values)](auto, auto out) {
    using T = typename decltype(out)::value_type;
    for (std::size_t k = 0; k < values.size(); ++k) out[k] = T(values[k]);
  });
}

SmoothMap make_coordinate_map(int in_dim, int index) {
  return make_map(in_dim, 1, [index](auto in, auto out) { out[0] = in[index]; });
}

}  // namespace adaptube
