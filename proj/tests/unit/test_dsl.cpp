#include <doctest.h>

#include <map>

#include "adaptube/expr.hpp"
#include "adaptube/sampling.hpp"
#include "registry_exprs.hpp"

using namespace adaptube;

TEST_SUITE("dsl") {

TEST_CASE("cancellation leaves t") {
  ScalarExpr e = ScalarExpr::parse("t + x*y - y*x", {"x", "y", "t"});
  for (const auto& p : halton_points({{-3, 3}, {-3, 3}, {-3, 3}}, 50))
    CHECK(e.eval(std::span<const double>(p.data(), 3)) == doctest::Approx(p(2)).epsilon(1e-15));
}

TEST_CASE("constant power") {
  ScalarExpr e = ScalarExpr::parse("2^3", {});
  CHECK(e.eval(std::span<const double>()) == 8.0);
  CHECK(ScalarExpr::parse("2^-2", {}).eval(std::span<const double>()) == 0.25);
}

TEST_CASE("unbalanced parenthesis reports offset 6") {
  try {
    ScalarExpr::parse("x + (y", {"x", "y"});
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 6);
  }
}

TEST_CASE("unbound identifier is named") {
  try {
    ScalarExpr::parse("x + z", {"x", "y"});
    FAIL("expected UnboundIdentifier");
  } catch (const UnboundIdentifier& e) {
    CHECK(e.name() == "z");
  }
}

TEST_CASE("syntax errors") {
  const std::vector<std::string> xs = {"x"};
  CHECK_THROWS_AS(ScalarExpr::parse("", xs), ParseError);
  CHECK_THROWS_AS(ScalarExpr::parse("x +", xs), ParseError);
  CHECK_THROWS_AS(ScalarExpr::parse("2 x", xs), ParseError);  // no implicit multiplication
  CHECK_THROWS_AS(ScalarExpr::parse("x^x", xs), ParseError);
  CHECK_THROWS_AS(ScalarExpr::parse("x^7", xs), ParseError);
  CHECK_THROWS_AS(ScalarExpr::parse("x^1.5", xs), ParseError);
  CHECK_THROWS_AS(ScalarExpr::parse("foo(x)", xs), ParseError);
}

TEST_CASE("precedence and associativity") {
  const std::vector<std::string> none;
  auto v = [&](const char* s) { return ScalarExpr::parse(s, none).eval(std::span<const double>()); };
  CHECK(v("2+3*4") == 14.0);
  CHECK(v("-2^2") == -4.0);  // ^ binds tighter than unary minus
  CHECK(v("(2^3)^2") == 64.0);
  CHECK(v("8/4/2") == 1.0);    // left associative
  CHECK(v("10-4-3") == 3.0);
  CHECK(v("  1 +\t2 ") == 3.0);
}

TEST_CASE("evaluation by name") {
  ScalarExpr e = ScalarExpr::parse("x*x+y*y", {"x", "y"});
  CHECK(e.eval(std::map<std::string, double>{{"x", 3}, {"y", 4}}) == 25.0);
  ScalarExpr l = ScalarExpr::parse("log(exp(t))", {"t"});
  CHECK(std::abs(l.eval(std::map<std::string, double>{{"t", 1.25}}) - 1.25) < 1e-15);
}

TEST_CASE("dual evaluation gives finite-difference gradient") {
  ScalarExpr e = ScalarExpr::parse("sin(x)*y", {"x", "y"});
  std::vector<D2> xs = seed<D2>(std::vector<double>{0.0, 2.0});
  D2 r = e.eval(std::span<const D2>(xs));
  CHECK(r.v.d[0] == doctest::Approx(2.0));
  CHECK(r.v.d[1] == doctest::Approx(0.0));
}

TEST_CASE("real and dual evaluations agree bit for bit") {
  for (const auto& re : registry_expressions())
    for (const auto& p : halton_points(re.box, 10)) {
      const double plain = re.expr.eval(std::span<const double>(p.data(), p.size()));
      std::vector<D2> xs = seed<D2>(std::span<const double>(p.data(), p.size()));
      INFO(re.label);
      CHECK(re.expr.eval(std::span<const D2>(xs)).v.v == plain);
    }
}

TEST_CASE("pretty-print round trip on registry expressions") {
  for (const auto& re : registry_expressions()) {
    ScalarExpr again = ScalarExpr::parse(re.expr.to_string(), re.expr.coords());
    INFO(re.label << " -> " << re.expr.to_string());
    CHECK(again.structurally_equal(re.expr));
  }
}

TEST_CASE("domain errors propagate") {
  ScalarExpr e = ScalarExpr::parse("log(x)", {"x"});
  const double x[] = {-1.0};
  CHECK_THROWS_AS(e.eval(std::span<const double>(x)), DomainError);
}

}
