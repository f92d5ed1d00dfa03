#include <doctest.h>

#include <json.hpp>

#include "adaptube/verify.hpp"
#include "test_data.hpp"

using namespace adaptube;

TEST_SUITE("verify") {

TEST_CASE("heisenberg run passes every check") {
  RunConfig c;
  c.example = "heisenberg";
  c.samples = 100;
  Report r = run_verify(c);
  CHECK(r.overall_pass);
  CHECK(r.tube == "closed-form");
  REQUIRE(r.checks.size() == check_names().size());
  CHECK(check_names().size() == 13);
  for (std::size_t i = 0; i < r.checks.size(); ++i) {
    INFO(r.checks[i].name << " " << r.checks[i].max_residual << " " << r.checks[i].error);
    CHECK(r.checks[i].name == check_names()[i]);
    CHECK(r.checks[i].pass);
    CHECK(r.checks[i].error.empty());
  }
}

TEST_CASE("reports are deterministic without timing") {
  RunConfig c;
  c.example = "sphere";
  c.samples = 50;
  c.seed = 5;
  const std::string a = report_to_json(run_verify(c), false);
  const std::string b = report_to_json(run_verify(c), false);
  CHECK(a == b);
  auto j = nlohmann::json::parse(a);
  CHECK(j["overall_pass"] == true);
  CHECK(j["checks"].size() == 13);
  CHECK_FALSE(j["checks"][0].contains("timing_ms"));
  auto t = nlohmann::json::parse(report_to_json(run_verify(c), true));
  CHECK(t["checks"][0].contains("timing_ms"));
}

TEST_CASE("csv report has a header and one row per check") {
  RunConfig c;
  c.example = "heisenberg";
  c.samples = 20;
  const std::string csv = report_to_csv(run_verify(c), false);
  int lines = 0;
  for (char ch : csv) lines += ch == '\n';
  CHECK(lines == 14);
  CHECK(csv.rfind("name,samples,max_residual,tolerance,pass,worst_point,error\n", 0) == 0);
}

TEST_CASE("negative control fails on holomorphy") {
  RunConfig c;
  c.spec_path = data_path("negative_control_heisenberg.json");
  c.samples = 20;
  Report r = run_verify(c);
  CHECK_FALSE(r.overall_pass);
  bool saw = false;
  for (const auto& k : r.checks)
    if (k.name == "holomorphy") {
      saw = true;
      CHECK_FALSE(k.pass);
      CHECK(k.error.find("HolomorphyFailure") != std::string::npos);
    }
  CHECK(saw);
}

TEST_CASE("tolerance overrides are applied") {
  RunConfig c;
  c.example = "heisenberg";
  c.samples = 20;
  c.tolerances["j_squared"] = 1e-300;
  Report r = run_verify(c);
  for (const auto& k : r.checks)
    if (k.name == "j_squared") CHECK(k.tolerance == 1e-300);
}

TEST_CASE("config validation") {
  RunConfig c;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);  // neither example nor spec
  c.example = "heisenberg";
  CHECK_NOTHROW(c.validate());
  c.spec_path = "x.json";
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.spec_path.clear();
  c.samples = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.samples = 10;
  c.sigma_max = -1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.sigma_max.reset();
  c.tolerances["no_such_check"] = 1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.tolerances.clear();
  c.tolerances["nijenhuis"] = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  CHECK(parse_integrator("rk4-fixed") == IntegratorMethod::Rk4Fixed);
  CHECK(integrator_name(IntegratorMethod::Rkf45Adaptive) == "rkf45-adaptive");
  CHECK_THROWS_AS(parse_integrator("euler"), std::invalid_argument);
}

TEST_CASE("default tolerance profiles") {
  auto h = default_tolerances("heisenberg");
  auto s = default_tolerances("sphere");
  CHECK(h.size() == 13);
  CHECK(s.size() == 13);
  CHECK(h["monge_ampere"] <= s["monge_ampere"]);
  CHECK(h["lemma21"] == 1e-8);
}

}
