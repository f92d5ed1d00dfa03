#include <doctest.h>

#include <cmath>

#include "adaptube/flows.hpp"
#include "adaptube/spec_io.hpp"
#include "test_data.hpp"

using namespace adaptube;

namespace {

IntegratorConfig rk4(double step) {
  IntegratorConfig c;
  c.method = IntegratorMethod::Rk4Fixed;
  c.step = step;
  return c;
}

// Sphere(1) Reeb orbit through the chart origin: v(t) = (tan(t/2), 0, 0).
Eigen::Vector3d sphere_orbit(double t) { return {std::tan(t / 2), 0.0, 0.0}; }

}  // namespace

TEST_SUITE("flows") {

TEST_CASE("Heisenberg Reeb flow translates t") {
  ManifoldSpec M = heisenberg(1);
  Eigen::Vector3d p(0.2, -0.3, 0.1);
  for (IntegratorConfig cfg : {rk4(1e-2), IntegratorConfig{}}) {
    Eigen::VectorXd q = reeb_flow(M, p, 0.37, cfg);
    CHECK((q - Eigen::Vector3d(0.2, -0.3, 0.47)).norm() < 1e-14);
  }
}

TEST_CASE("sphere Reeb flow reaches iz at t = pi/2") {
  ManifoldSpec M = sphere(1);
  Eigen::VectorXd v = reeb_flow(M, Eigen::VectorXd::Zero(3), M_PI / 2);
  CHECK((v - Eigen::Vector3d(1, 0, 0)).norm() < 1e-9);
  Eigen::VectorXd z = M.embedding_map(v);
  Eigen::Vector4d iz(0, 1, 0, 0);
  CHECK((z - iz).norm() < 1e-9);
}

TEST_CASE("zero time returns the start point exactly") {
  ManifoldSpec M = sphere(1);
  Eigen::Vector3d p(0.1, 0.2, -0.3);
  for (IntegratorConfig cfg : {rk4(1e-2), IntegratorConfig{}}) {
    Trajectory tr = integrate(reeb_vector_field(M), p, 0.0, cfg);
    CHECK(tr.end() == Eigen::VectorXd(p));
    CHECK(reeb_flow(M, p, 0.0, cfg) == Eigen::VectorXd(p));
    CHECK(sigma_flow(M, M.embedding_map(p), 0.0, cfg) == M.embedding_map(p));
  }
}

TEST_CASE("semigroup and inverse laws") {
  ManifoldSpec M = sphere(1);
  for (const auto& p : halton_points(shrink(M.chart_box, 0.3), 10)) {
    Eigen::VectorXd a = reeb_flow(M, reeb_flow(M, p, 0.2), 0.15);
    Eigen::VectorXd b = reeb_flow(M, p, 0.35);
    CHECK((a - b).norm() < 1e-9);
    CHECK((reeb_flow(M, reeb_flow(M, p, 0.3), -0.3) - p).norm() < 1e-9);
  }
}

TEST_CASE("sigma flow closed forms") {
  {
    ManifoldSpec M = heisenberg(1);
    for (const auto& p : halton_points(M.chart_box, 10)) {
      Eigen::VectorXd q = M.embedding_map(p);
      Eigen::VectorXd expect = q;
      expect(3) += 0.3;
      CHECK((sigma_flow(M, q, 0.3) - expect).norm() < 1e-13);
    }
  }
  {
    ManifoldSpec M = sphere(1);
    for (const auto& p : halton_points(M.chart_box, 10)) {
      Eigen::VectorXd q = M.embedding_map(p);
      CHECK((sigma_flow(M, q, 0.3) - std::exp(-0.3) * q).norm() < 1e-10);
      CHECK((sigma_flow(M, q, -0.3) - std::exp(0.3) * q).norm() < 1e-10);
    }
  }
}

TEST_CASE("rk4 converges at fourth order") {
  ManifoldSpec M = sphere(1);
  const double T = 1.0;
  const double e1 = (reeb_flow(M, Eigen::VectorXd::Zero(3), T, rk4(0.1)) - sphere_orbit(T)).norm();
  const double e2 = (reeb_flow(M, Eigen::VectorXd::Zero(3), T, rk4(0.05)) - sphere_orbit(T)).norm();
  INFO("errors " << e1 << " " << e2);
  CHECK(e1 / e2 >= 14.0);
  const double order = std::log2(e1 / e2);
  CHECK(order > 3.7);
  CHECK(order < 4.5);
}

TEST_CASE("Reeb and sigma flows commute in the ambient space") {
  ManifoldSpec M = sphere(1);
  IntegratorConfig cfg;
  for (const auto& p : halton_points(M.chart_box, 5)) {
    Eigen::VectorXd q = M.embedding_map(p);
    Eigen::VectorXd a = integrate(M.extension_map, sigma_flow(M, q, 0.2, cfg), 0.4, cfg).end();
    Eigen::VectorXd b = sigma_flow(M, integrate(M.extension_map, q, 0.4, cfg).end(), 0.2, cfg);
    CHECK((a - b).norm() < 1e-9);
  }
}

TEST_CASE("result does not depend on tolerance beyond its accuracy") {
  ManifoldSpec M = sphere(1);
  IntegratorConfig loose, tight;
  loose.rel_tol = 1e-8;
  loose.abs_tol = 1e-10;
  tight.rel_tol = 1e-12;
  tight.abs_tol = 1e-14;
  Eigen::VectorXd a = reeb_flow(M, Eigen::VectorXd::Zero(3), 1.0, loose);
  Eigen::VectorXd b = reeb_flow(M, Eigen::VectorXd::Zero(3), 1.0, tight);
  CHECK((a - b).norm() < 1e-6);
  CHECK((b - sphere_orbit(1.0)).norm() < 1e-11);
  Trajectory ta = integrate(reeb_vector_field(M), Eigen::VectorXd::Zero(3), 1.0, loose);
  Trajectory tb = integrate(reeb_vector_field(M), Eigen::VectorXd::Zero(3), 1.0, tight);
  CHECK(ta.steps.size() < tb.steps.size());
}

TEST_CASE("leaving the chart box") {
  ManifoldSpec M = heisenberg(1);
  Eigen::Vector3d p(0.0, 0.0, 0.5);
  try {
    reeb_flow(M, p, 1.0, rk4(1e-2));
    FAIL("expected LeftChartBox");
  } catch (const LeftChartBox& e) {
    CHECK(e.exit_time() == doctest::Approx(0.5).epsilon(1e-9));
  }
  CHECK_THROWS_AS(reeb_flow(M, p, -2.0), LeftChartBox);
}

TEST_CASE("step budget") {
  ManifoldSpec M = sphere(1);
  IntegratorConfig c = rk4(1e-2);
  c.max_steps = 3;
  CHECK_THROWS_AS(reeb_flow(M, Eigen::VectorXd::Zero(3), 1.0, c), MaxStepsExceeded);
  IntegratorConfig a;
  a.max_steps = 2;
  CHECK_THROWS_AS(reeb_flow(M, Eigen::VectorXd::Zero(3), 1.0, a), MaxStepsExceeded);
}

TEST_CASE("integrator config validation") {
  IntegratorConfig c;
  c.step = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.rel_tol = -1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.max_steps = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  CHECK_NOTHROW(IntegratorConfig{}.validate());
}

TEST_CASE("replay with frozen steps matches the trajectory") {
  ManifoldSpec M = sphere(1);
  Rhs f = sigma_rhs(M);
  Eigen::VectorXd q = M.embedding_map(Eigen::Vector3d(0.2, 0.1, -0.4));
  Trajectory tr = integrate(f, q, 0.25, IntegratorConfig{});
  CHECK((replay(f, q, tr.steps, IntegratorMethod::Rkf45Adaptive) - tr.end()).norm() < 1e-15);
}

TEST_CASE("holomorphy residual of the examples and of a corrupted extension") {
  CHECK(holomorphy_residual(heisenberg(1), Eigen::Vector3d(0.1, 0.2, 0.0), 0.3, 0.2) < 1e-8);
  CHECK(holomorphy_residual(sphere(1), Eigen::Vector3d(0.1, 0.2, 0.0), 0.3, 0.2) < 1e-8);
  ManifoldSpec bad = spec_from_json(read_data("negative_control_heisenberg.json"));
  CHECK(holomorphy_residual(bad, Eigen::Vector3d(0.1, 0.2, 0.0), 0.3, 0.2) > 1e-3);
  HolomorphyScan s = holomorphy_scan(bad, HolomorphyGrid{});
  CHECK(s.max_residual > 1e-3);
  CHECK(s.evaluations == 4 * 11 * 7);
  CHECK(s.worst.size() == 5);
}

}
