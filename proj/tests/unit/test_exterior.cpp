#include <doctest.h>

#include <cmath>
#include <random>

#include "adaptube/contact.hpp"
#include "adaptube/exterior.hpp"
#include "oracles.hpp"

using namespace adaptube;

namespace {

oracle::DenseForm dense(const AltForm& a) {
  oracle::DenseForm f{a.dim(), a.degree(), {}, {}};
  const IndexTable& t = IndexTable::get(a.dim(), a.degree());
  for (int p = 0; p < t.size(); ++p) {
    f.indices.push_back(t.indices(p));
    f.coeffs.push_back(a[p]);
  }
  return f;
}

AltForm random_form(std::mt19937_64& rng, int dim, int degree) {
  std::uniform_real_distribution<double> u(-1, 1);
  AltForm a(dim, degree);
  for (int p = 0; p < a.size(); ++p) a[p] = u(rng);
  return a;
}

std::vector<Eigen::VectorXd> random_vectors(std::mt19937_64& rng, int dim, int count) {
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Eigen::VectorXd> vs;
  for (int i = 0; i < count; ++i) {
    Eigen::VectorXd v(dim);
    for (int k = 0; k < dim; ++k) v(k) = u(rng);
    vs.push_back(v);
  }
  return vs;
}

Eigen::VectorXd e(int dim, int i) { return Eigen::VectorXd::Unit(dim, i); }

}  // namespace

TEST_SUITE("exterior") {

TEST_CASE("dx^dy on (e1, e2)") {
  AltForm w = AltForm::basis(2, {0, 1});
  std::vector<Eigen::VectorXd> vs = {e(2, 0), e(2, 1)};
  CHECK(eval_form(w, vs) == 1.0);
  std::swap(vs[0], vs[1]);
  CHECK(eval_form(w, vs) == -1.0);
  CHECK(AltForm::basis(2, {1, 0})[0] == -1.0);
}

TEST_CASE("a one-form wedged with itself vanishes") {
  std::mt19937_64 rng(1);
  for (int m = 2; m <= 8; ++m) {
    AltForm a = random_form(rng, m, 1);
    CHECK(wedge(a, a).max_abs() == 0.0);
  }
}

TEST_CASE("symplectic square in four dimensions") {
  AltForm w = AltForm::basis(4, {0, 1}) + AltForm::basis(4, {2, 3});
  CHECK(wedge(w, w).top() == 2.0);
  CHECK(wedge_power(w * 2.0, 2).top() == 8.0);
  AltForm four = AltForm::basis(4, {0, 1, 2, 3}) * 4.0;
  CHECK(wedge(w * 2.0, w).top() == four.top());
  CHECK_THROWS_AS(wedge_power(w, 3), std::invalid_argument);
}

TEST_CASE("graded anticommutativity") {
  std::mt19937_64 rng(2);
  for (int m = 2; m <= 7; ++m)
    for (int k = 0; k <= m; ++k)
      for (int l = 0; k + l <= m; ++l) {
        AltForm a = random_form(rng, m, k), b = random_form(rng, m, l);
        const double sign = (k * l) % 2 ? -1.0 : 1.0;
        CHECK((wedge(a, b) - wedge(b, a) * sign).max_abs() < 1e-13);
      }
}

TEST_CASE("wedge against the shuffle-sum oracle") {
  std::mt19937_64 rng(3);
  for (int m = 1; m <= 6; ++m)
    for (int k = 0; k <= m; ++k)
      for (int l = 0; k + l <= m; ++l) {
        AltForm a = random_form(rng, m, k), b = random_form(rng, m, l);
        auto vs = random_vectors(rng, m, k + l);
        const double lib = eval_form(wedge(a, b), vs);
        const double ref = oracle::shuffle_wedge(dense(a), dense(b), vs);
        CHECK(std::abs(lib - ref) < 1e-12 * (1 + std::abs(ref)));
      }
}

TEST_CASE("evaluation against the determinant oracle and alternation") {
  std::mt19937_64 rng(4);
  for (int m = 1; m <= 8; ++m)
    for (int k = 1; k <= m; ++k) {
      AltForm a = random_form(rng, m, k);
      auto vs = random_vectors(rng, m, k);
      const double v = eval_form(a, vs);
      CHECK(std::abs(v - dense(a)(vs)) < 1e-12);
      if (k >= 2) {
        std::swap(vs[0], vs[1]);
        CHECK(std::abs(eval_form(a, vs) + v) < 1e-12);
        vs[1] = vs[0];
        CHECK(std::abs(eval_form(a, vs)) < 1e-12);
      }
    }
}

TEST_CASE("wedge is associative") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    AltForm a = random_form(rng, 6, 1), b = random_form(rng, 6, 2), c = random_form(rng, 6, 2);
    CHECK((wedge(wedge(a, b), c) - wedge(a, wedge(b, c))).max_abs() < 1e-13);
  }
}

TEST_CASE("interior product contracts the first slot") {
  AltForm w = AltForm::basis(2, {0, 1});
  Eigen::Vector2d v(3.0, 5.0);
  AltForm iv = interior_product(v, w);
  CHECK(iv[0] == -5.0);
  CHECK(iv[1] == 3.0);

  std::mt19937_64 rng(6);
  for (int m = 2; m <= 6; ++m)
    for (int k = 1; k <= m; ++k) {
      AltForm a = random_form(rng, m, k);
      auto vs = random_vectors(rng, m, k);
      std::vector<Eigen::VectorXd> rest(vs.begin() + 1, vs.end());
      CHECK(std::abs(eval_form(interior_product(vs[0], a), rest) - eval_form(a, vs)) < 1e-12);
      if (k >= 2) CHECK(interior_product(vs[0], interior_product(vs[0], a)).max_abs() < 1e-13);
    }
}

TEST_CASE("pullback: swap, rotation, functoriality") {
  Eigen::Matrix2d swap;
  swap << 0, 1, 1, 0;
  CHECK(pullback(AltForm::basis(2, {0, 1}), swap)[0] == -1.0);

  const double t = 0.7;
  Eigen::Matrix2d rot;
  rot << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  CHECK(pullback(AltForm::basis(2, {0, 1}), rot)[0] == doctest::Approx(1.0).epsilon(1e-15));

  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (int k = 0; k <= 3; ++k) {
    AltForm a = random_form(rng, 4, k), b = random_form(rng, 4, 1);
    Eigen::MatrixXd L1(4, 5), L2(5, 3);
    for (int i = 0; i < L1.size(); ++i) L1.data()[i] = g(rng);
    for (int i = 0; i < L2.size(); ++i) L2.data()[i] = g(rng);
    CHECK((pullback(pullback(a, L1), L2) - pullback(a, L1 * L2)).max_abs() < 1e-12);
    if (k + 1 <= 5)
      CHECK((pullback(wedge(a, b), L1) - wedge(pullback(a, L1), pullback(b, L1))).max_abs() < 1e-12);
    auto vs = random_vectors(rng, 5, k);
    std::vector<Eigen::VectorXd> pushed;
    for (const auto& v : vs) pushed.push_back(L1 * v);
    CHECK(std::abs(eval_form(pullback(a, L1), vs) - eval_form(a, pushed)) < 1e-12);
  }
}

TEST_CASE("matrix form of a two-form") {
  std::mt19937_64 rng(8);
  AltForm a = random_form(rng, 5, 2);
  Eigen::MatrixXd B = a.as_matrix();
  CHECK((B + B.transpose()).norm() == 0.0);
  CHECK((AltForm::from_matrix(B) - a).max_abs() == 0.0);
  auto vs = random_vectors(rng, 5, 2);
  CHECK(std::abs(vs[0].dot(B * vs[1]) - eval_form(a, vs)) < 1e-13);
}

TEST_CASE("d of a Heisenberg contact form") {
  for (int n = 1; n <= 3; ++n) {
    ManifoldSpec M = heisenberg(n);
    FormField th = theta_form(M);
    Eigen::VectorXd p = Eigen::VectorXd::LinSpaced(M.dim(), -0.3, 0.4);
    AltForm dth = exterior_derivative(th, p);
    AltForm expect(M.dim(), 2);
    for (int j = 0; j < n; ++j) expect = expect + AltForm::basis(M.dim(), {j, n + j}) * 2.0;
    CHECK((dth - expect).max_abs() < 1e-14);
  }
}

TEST_CASE("d(d w) = 0") {
  // w = sin(x0 x1) dx2 + exp(x2) x3 dx0 + x0^2 x3 dx1 + cos(x1 + x3) dx3 on R^4
  auto comps = make_map(4, 4, [](auto x, auto out) {
    using adaptube::cos;
    using adaptube::exp;
    using adaptube::sin;
    out[0] = exp(x[2]) * x[3];
    out[1] = x[0] * x[0] * x[3];
    out[2] = sin(x[0] * x[1]);
    out[3] = cos(x[1] + x[3]);
  });
  FormField w = make_form_field(4, 1, comps);
  FormField dw = exterior_derivative_field(w);
  for (const auto& p : halton_points(Box(4, Interval{-1, 1}), 30)) {
    CHECK(exterior_derivative(dw, p).max_abs() < 1e-10);
    AltForm a = exterior_derivative(w, p);
    // (dw)(e0, e2) = d0 w2 - d2 w0
    CHECK(a.coefficient(std::vector<int>{0, 2}) ==
          doctest::Approx(p(1) * std::cos(p(0) * p(1)) - std::exp(p(2)) * p(3)));
  }
  // Theta fields of the examples, one degree up.
  for (const auto& info : list_examples()) {
    ManifoldSpec M = make_example(info.name, info.n);
    FormField dth = exterior_derivative_field(theta_form(M));
    for (const auto& p : halton_points(M.chart_box, 10)) CHECK(exterior_derivative(dth, p).max_abs() < 1e-10);
  }
}

TEST_CASE("Lie bracket") {
  VectorField X = make_constant_map(2, {1.0, 0.0});
  VectorField Y = make_map(2, 2, [](auto x, auto out) {
    out[0] = x[0] * 0.0;
    out[1] = x[0];
  });
  Eigen::Vector2d p(0.3, -1.2);
  Eigen::VectorXd b = lie_bracket(X, Y, p);
  CHECK(b(0) == 0.0);
  CHECK(b(1) == 1.0);
  CHECK((lie_bracket(Y, X, p) + b).norm() == 0.0);

  // rotation and dilation commute
  VectorField R = make_map(2, 2, [](auto x, auto out) {
    out[0] = -x[1];
    out[1] = x[0];
  });
  VectorField D = make_map(2, 2, [](auto x, auto out) {
    out[0] = x[0];
    out[1] = x[1];
  });
  CHECK(lie_bracket(R, D, p).norm() < 1e-15);

  // jets version agrees
  Eigen::VectorXd q = p;
  CHECK((lie_bracket(X(q), X.jacobian(q), Y(q), Y.jacobian(q)) - b).norm() == 0.0);
}

TEST_CASE("Jacobi identity for polynomial fields") {
  auto A = make_map(3, 3, [](auto x, auto out) {
    out[0] = x[1] * x[2];
    out[1] = x[0] * x[0];
    out[2] = x[0] + x[1];
  });
  auto B = make_map(3, 3, [](auto x, auto out) {
    out[0] = x[2] * x[2];
    out[1] = x[0] * x[1];
    out[2] = x[1];
  });
  auto C = make_map(3, 3, [](auto x, auto out) {
    out[0] = x[1];
    out[1] = x[2] * x[0];
    out[2] = x[0] * x[1] * x[2];
  });
  // [A,[B,C]] needs the bracket as a field: build it from jets.
  auto bracket_field = [](SmoothMap P, SmoothMap Q) {
    return make_numeric_map(3, 3,
        [P, Q](const Eigen::VectorXd& x) { return lie_bracket(P, Q, x); },
        [P, Q](const Eigen::VectorXd& x) {
          Eigen::MatrixXd J(3, 3);
          const double h = 1e-5;
          for (int k = 0; k < 3; ++k) {
            Eigen::VectorXd a = x, b = x;
            a(k) += h;
            b(k) -= h;
            J.col(k) = (lie_bracket(P, Q, a) - lie_bracket(P, Q, b)) / (2 * h);
          }
          return J;
        });
  };
  auto BC = bracket_field(B, C), CA = bracket_field(C, A), AB = bracket_field(A, B);
  for (const auto& p : halton_points(Box(3, Interval{-1, 1}), 20)) {
    Eigen::VectorXd s = lie_bracket(A(p), A.jacobian(p), BC(p), BC.jacobian(p)) +
                        lie_bracket(B(p), B.jacobian(p), CA(p), CA.jacobian(p)) +
                        lie_bracket(C(p), C.jacobian(p), AB(p), AB.jacobian(p));
    CHECK(s.norm() < 1e-8);
  }
}

}
