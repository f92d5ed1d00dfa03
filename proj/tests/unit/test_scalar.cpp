#include <doctest.h>

#include <cmath>
#include <limits>

#include "adaptube/dual.hpp"
#include "oracles.hpp"
#include "registry_exprs.hpp"

using namespace adaptube;

TEST_SUITE("scalar") {

TEST_CASE("square at 3") {
  auto f = [](auto x) { return x[0] * x[0]; };
  const double x[] = {3.0};
  Jet2 j = evaluate_with_derivatives(f, x, 2);
  CHECK(j.value == 9.0);
  CHECK(j.gradient[0] == 6.0);
  CHECK(j.hessian[0][0] == 2.0);
}

TEST_CASE("identity") {
  auto f = [](auto x) { return x[0]; };
  for (double v : {-2.5, 0.0, 7.25}) {
    const double x[] = {v};
    Jet2 j = evaluate_with_derivatives(f, x, 2);
    CHECK(j.value == v);
    CHECK(j.gradient[0] == 1.0);
    CHECK(j.hessian[0][0] == 0.0);
  }
}

TEST_CASE("sin(x)*y at (0,2) against finite differences") {
  auto f = [](auto x) { return adaptube::sin(x[0]) * x[1]; };
  const double x[] = {0.0, 2.0};
  Jet2 j = evaluate_with_derivatives(f, x, 1);
  CHECK(j.value == 0.0);
  CHECK(j.gradient[0] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(j.gradient[1] == 0.0);
  Eigen::Vector2d p(0.0, 2.0);
  Eigen::VectorXd fd = oracle::fd_gradient([](const Eigen::VectorXd& v) { return std::sin(v(0)) * v(1); }, p);
  for (int i = 0; i < 2; ++i) CHECK(std::abs(j.gradient[i] - fd(i)) / (1 + std::abs(j.gradient[i])) < 1e-6);
}

TEST_CASE("order 0 and bad order") {
  auto f = [](auto x) { return adaptube::exp(x[0]); };
  const double x[] = {1.0};
  CHECK(evaluate_with_derivatives(f, x, 0).gradient.empty());
  CHECK_THROWS_AS(evaluate_with_derivatives(f, x, 3), std::invalid_argument);
}

TEST_CASE("domain errors") {
  const double neg[] = {-1.0};
  const double zero[] = {0.0};
  CHECK_THROWS_AS(evaluate_with_derivatives([](auto x) { return adaptube::log(x[0]); }, neg, 1), DomainError);
  CHECK_THROWS_AS(evaluate_with_derivatives([](auto x) { return adaptube::log(x[0]); }, zero, 2), DomainError);
  CHECK_THROWS_AS(evaluate_with_derivatives([](auto x) { return adaptube::sqrt(x[0]); }, neg, 0), DomainError);
}

TEST_CASE("non-finite values raise instead of propagating") {
  const double zero[] = {0.0};
  CHECK_THROWS_AS(evaluate_with_derivatives([](auto x) { return 1.0 / x[0]; }, zero, 1), NonFiniteError);
  const double big[] = {1000.0};
  CHECK_THROWS_AS(evaluate_with_derivatives([](auto x) { return adaptube::exp(x[0]); }, big, 0), NonFiniteError);
}

TEST_CASE("third level of the tower") {
  std::vector<D3> x = seed<D3>(std::vector<double>{1.5});
  D3 y = x[0] * x[0] * x[0];
  CHECK(y.v.v.v == doctest::Approx(3.375));
  CHECK(y.d[0].d[0].d[0] == doctest::Approx(6.0));
  CHECK(y.d[0].d[0].v == doctest::Approx(9.0));
}

TEST_CASE("lift adds a fresh derivative level") {
  std::vector<D1> x = seed<D1>(std::vector<double>{0.7, -0.2});
  std::vector<D2> z = lift<D1>(x);
  D2 f = z[0] * z[1];
  // d/dz0 of z0*z1 is z1, itself carrying outer derivatives (0, 1).
  CHECK(f.d[0].v == doctest::Approx(-0.2));
  CHECK(f.d[0].d[1] == doctest::Approx(1.0));
  CHECK(f.d[0].d[0] == doctest::Approx(0.0));
}

TEST_CASE("Leibniz rule holds to a few ulps") {
  auto f = [](auto x) { return adaptube::sin(x[0]) * adaptube::exp(x[1]) + x[0] * x[1]; };
  auto g = [](auto x) { return adaptube::tanh(x[0] - x[1]) + adaptube::sqrt(x[0] * x[0] + 1.0); };
  auto fg = [&](auto x) { return f(x) * g(x); };
  const auto pts = halton_points({{-1, 1}, {-1, 1}}, 50);
  for (const auto& p : pts) {
    const double x[] = {p(0), p(1)};
    Jet2 a = evaluate_with_derivatives(f, x, 1), b = evaluate_with_derivatives(g, x, 1),
         ab = evaluate_with_derivatives(fg, x, 1);
    CHECK(ab.value == a.value * b.value);
    for (int i = 0; i < 2; ++i) {
      const double expect = a.gradient[i] * b.value + a.value * b.gradient[i];
      const double scale = std::abs(a.gradient[i] * b.value) + std::abs(a.value * b.gradient[i]);
      CHECK(std::abs(ab.gradient[i] - expect) <= 4 * std::numeric_limits<double>::epsilon() * scale);
    }
  }
}

TEST_CASE("registry expressions: AD against finite differences") {
  int checked = 0;
  for (const auto& re : registry_expressions()) {
    const auto& e = re.expr;
    auto fn = [&](auto x) { return e.eval(x); };
    oracle::ScalarFn plain = [&](const Eigen::VectorXd& v) {
      return e.eval(std::span<const double>(v.data(), v.size()));
    };
    for (const auto& p : halton_points(re.box, 100)) {
      Jet2 j = evaluate_with_derivatives(fn, std::span<const double>(p.data(), p.size()), 2);
      const Eigen::VectorXd g = oracle::fd_gradient(plain, p, 1e-5);
      const Eigen::MatrixXd H = oracle::fd_hessian(plain, p, 1e-4);
      for (Eigen::Index i = 0; i < p.size(); ++i) {
        INFO(re.label);
        CHECK(std::abs(j.gradient[i] - g(i)) / (1 + std::abs(j.gradient[i])) < 1e-6);
        for (Eigen::Index k = 0; k < p.size(); ++k) {
          CHECK(std::abs(j.hessian[i][k] - H(i, k)) / (1 + std::abs(j.hessian[i][k])) < 1e-6);
          CHECK(j.hessian[i][k] == j.hessian[k][i]);
        }
      }
      ++checked;
    }
  }
  CHECK(checked > 1000);
}

}
