// adaptube: list-examples | verify | export-spec
// Exit status: 0 pass, 1 check failure, 2 config/spec error.

#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "adaptube/contact.hpp"
#include "adaptube/spec_io.hpp"
#include "adaptube/verify.hpp"

using namespace adaptube;

namespace {

int write_output(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return 0;
  }
  std::ofstream out(path);
  if (!out) {
    std::cerr << "error: cannot write '" << path << "'\n";
    return 2;
  }
  out << text;
  return 0;
}

std::string dashed(std::string s) {
  for (char& c : s)
    if (c == '_') c = '-';
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adapted complex tube verification toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ADAPTUBE_VERSION));

  auto* list = app.add_subcommand("list-examples", "List builtin example manifolds");
  std::string list_format = "text";
  list->add_option("--format", list_format, "text or json")->check(CLI::IsMember({"text", "json"}));

  auto* exp = app.add_subcommand("export-spec", "Write a builtin example as a JSON spec file");
  std::string exp_example;
  int exp_n = 1;
  std::string exp_out;
  exp->add_option("--example", exp_example, "Registry name")->required();
  exp->add_option("--n", exp_n, "CR dimension")->check(CLI::PositiveNumber);
  exp->add_option("--out", exp_out, "Output path (default stdout)");

  auto* ver = app.add_subcommand("verify", "Run the check suite");
  RunConfig cfg;
  double sigma_max = 0.0;
  std::string integrator = "rkf45-adaptive";
  std::string out_path;
  std::string format = "json";
  bool no_timing = false;
  auto* ex_opt = ver->add_option("--example", cfg.example, "Registry name");
  auto* spec_opt = ver->add_option("--spec", cfg.spec_path, "Manifold spec JSON file")->check(CLI::ExistingFile);
  ex_opt->excludes(spec_opt);
  ver->add_option("--n", cfg.n, "CR dimension of the example")->check(CLI::PositiveNumber);
  auto* sm_opt = ver->add_option("--sigma-max", sigma_max, "Fiber half-width of the tube domain")
                     ->check(CLI::PositiveNumber);
  ver->add_option("--samples", cfg.samples, "Halton samples per check")->check(CLI::PositiveNumber);
  ver->add_option("--seed", cfg.seed, "Halton index offset");
  ver->add_option("--integrator", integrator, "rk4-fixed or rkf45-adaptive")
      ->check(CLI::IsMember({"rk4-fixed", "rkf45-adaptive"}));
  ver->add_option("--rel-tol", cfg.integrator.rel_tol, "rkf45 relative tolerance")->check(CLI::PositiveNumber);
  ver->add_option("--abs-tol", cfg.integrator.abs_tol, "rkf45 absolute tolerance")->check(CLI::PositiveNumber);
  ver->add_option("--step", cfg.integrator.step, "rk4 step / rkf45 initial step")->check(CLI::PositiveNumber);
  ver->add_option("--out", out_path, "Report path (default stdout)");
  ver->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  ver->add_flag("--no-timing", no_timing, "Omit wall-clock fields from the report");
  std::map<std::string, double> tol_values;
  for (const auto& name : check_names())
    ver->add_option("--tol-" + dashed(name), tol_values[name], "Tolerance for " + name)
        ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (list->parsed()) {
      std::string text;
      if (list_format == "json") {
        text = "[";
        bool first = true;
        for (const auto& e : list_examples()) {
          text += std::string(first ? "" : ",") + "\n  {\"name\": \"" + e.name + "\", \"n\": " +
                  std::to_string(e.n) + ", \"dim\": " + std::to_string(e.dim) + "}";
          first = false;
        }
        text += "\n]\n";
      } else {
        for (const auto& e : list_examples())
          text += e.name + "  n=" + std::to_string(e.n) + "  dim=" + std::to_string(e.dim) + "\n";
      }
      return write_output(text, "");
    }

    if (exp->parsed()) return write_output(export_spec(make_example(exp_example, exp_n)), exp_out);

    if (cfg.example.empty() && cfg.spec_path.empty()) {
      std::cerr << "error: verify needs --example or --spec\n";
      return 2;
    }
    if (sm_opt->count() > 0) cfg.sigma_max = sigma_max;
    cfg.integrator.method = parse_integrator(integrator);
    for (const auto& name : check_names())
      if (ver->get_option("--tol-" + dashed(name))->count() > 0) cfg.tolerances[name] = tol_values[name];

    const Report rep = run_verify(cfg);
    const std::string text =
        format == "csv" ? report_to_csv(rep, !no_timing) : report_to_json(rep, !no_timing);
    if (const int rc = write_output(text, out_path); rc != 0) return rc;
    for (const auto& c : rep.checks)
      std::cerr << (c.pass ? "PASS " : "FAIL ") << c.name << "  max_residual=" << c.max_residual
                << "  tol=" << c.tolerance << (c.error.empty() ? "" : "  [" + c.error + "]") << "\n";
    return rep.overall_pass ? 0 : 1;
  } catch (const SpecError& e) {
    std::cerr << "spec error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
