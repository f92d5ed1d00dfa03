#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "adaptube/spec_io.hpp"
#include "adaptube/sympl.hpp"
#include "adaptube/tube.hpp"
#include "adaptube/verify.hpp"

namespace py = pybind11;
using namespace adaptube;

namespace {

IntegratorConfig integrator(const std::string& method, double rel_tol, double abs_tol, double step) {
  IntegratorConfig c;
  c.method = parse_integrator(method);
  c.rel_tol = rel_tol;
  c.abs_tol = abs_tol;
  c.step = step;
  c.validate();
  return c;
}

py::dict validation_dict(const ValidationReport& r) {
  py::dict items;
  for (const auto& it : r.items) {
    py::dict d;
    d["value"] = it.value;
    d["threshold"] = it.threshold;
    d["pass"] = it.pass;
    d["detail"] = it.detail;
    items[py::str(it.name)] = d;
  }
  return items;
}

}  // namespace

PYBIND11_MODULE(_adaptube, m) {
  m.doc() = "Verification toolkit for adapted complex tubes";
  m.attr("__version__") = ADAPTUBE_VERSION;

  auto spec_error = py::register_exception<SpecError>(m, "SpecError", PyExc_ValueError);
  py::register_exception<SchemaError>(m, "SchemaError", spec_error.ptr());
  py::register_exception<SpecValidationError>(m, "SpecValidationError", spec_error.ptr());
  py::register_exception<SingularContact>(m, "SingularContact", PyExc_ArithmeticError);
  py::register_exception<DegenerateContact>(m, "DegenerateContact", PyExc_ArithmeticError);
  py::register_exception<HolomorphyFailure>(m, "HolomorphyFailure", PyExc_RuntimeError);
  py::register_exception<LeftChartBox>(m, "LeftChartBox", PyExc_RuntimeError);
  py::register_exception<EvaluationError>(m, "EvaluationError", PyExc_ArithmeticError);

  m.def("list_examples", [] {
    py::list out;
    for (const auto& e : list_examples()) {
      py::dict d;
      d["name"] = e.name;
      d["n"] = e.n;
      d["dim"] = e.dim;
      out.append(d);
    }
    return out;
  });

  py::class_<ManifoldSpec>(m, "Manifold")
      .def_static("example", &make_example, py::arg("name"), py::arg("n") = 1)
      .def_static("from_json", &spec_from_json, py::arg("text"))
      .def_static("load", &load_manifold_spec, py::arg("path"), py::arg("validate_samples") = 100,
                  py::arg("seed") = 0)
      .def("to_json", &export_spec)
      .def_readonly("name", &ManifoldSpec::name)
      .def_readonly("n", &ManifoldSpec::n)
      .def_readonly("coords", &ManifoldSpec::coords)
      .def_readonly("sigma_max", &ManifoldSpec::default_sigma_max)
      .def_property_readonly("dim", &ManifoldSpec::dim)
      .def_property_readonly("chart_box",
                             [](const ManifoldSpec& M) {
                               std::vector<std::pair<double, double>> b;
                               for (const auto& iv : M.chart_box) b.emplace_back(iv.lo, iv.hi);
                               return b;
                             })
      .def("theta", [](const ManifoldSpec& M, const Eigen::VectorXd& p) { return Eigen::VectorXd(M.theta_map(p)); })
      .def("embed", [](const ManifoldSpec& M, const Eigen::VectorXd& p) { return Eigen::VectorXd(M.embedding_map(p)); })
      .def("reeb_field", [](const ManifoldSpec& M, const Eigen::VectorXd& p) { return reeb_field(M, p); })
      .def("contact_volume", &contact_volume)
      .def("levi_basis", &levi_distribution)
      .def("validate",
           [](const ManifoldSpec& M, int samples, std::uint64_t seed) { return validation_dict(validate_spec(M, samples, seed)); },
           py::arg("samples") = 100, py::arg("seed") = 0)
      .def("canonical_two_form_rank",
           [](const ManifoldSpec& M, const Eigen::VectorXd& p, double sigma) { return canonical_two_form_rank(M, {p, sigma}); })
      .def("__repr__", [](const ManifoldSpec& M) { return "<Manifold " + M.name + " n=" + std::to_string(M.n) + ">"; });

  m.def(
      "reeb_flow",
      [](const ManifoldSpec& M, const Eigen::VectorXd& p, double t, const std::string& method, double rel_tol,
         double abs_tol, double step) { return reeb_flow(M, p, t, integrator(method, rel_tol, abs_tol, step)); },
      py::arg("manifold"), py::arg("p"), py::arg("t"), py::arg("method") = "rkf45-adaptive",
      py::arg("rel_tol") = 1e-10, py::arg("abs_tol") = 1e-12, py::arg("step") = 1e-2);
  m.def(
      "sigma_flow",
      [](const ManifoldSpec& M, const Eigen::VectorXd& q, double sigma, const std::string& method, double rel_tol,
         double abs_tol, double step) { return sigma_flow(M, q, sigma, integrator(method, rel_tol, abs_tol, step)); },
      py::arg("manifold"), py::arg("q"), py::arg("sigma"), py::arg("method") = "rkf45-adaptive",
      py::arg("rel_tol") = 1e-10, py::arg("abs_tol") = 1e-12, py::arg("step") = 1e-2);
  m.def(
      "holomorphy_residual",
      [](const ManifoldSpec& M, const Eigen::VectorXd& p, double t, double sigma) {
        return holomorphy_residual(M, p, t, sigma);
      },
      py::arg("manifold"), py::arg("p"), py::arg("t"), py::arg("sigma"));

  py::class_<TubeModel>(m, "Tube")
      .def_static("closed_form", py::overload_cast<const ManifoldSpec&, double>(&build_tube_closed_form),
                  py::arg("manifold"), py::arg("sigma_max") = 0.3)
      .def_static(
          "by_flow",
          [](const ManifoldSpec& M, double sigma_max, double holomorphy_tol) {
            FlowTubeOptions o;
            o.holomorphy_tol = holomorphy_tol;
            return build_tube_by_flow(M, sigma_max, o);
          },
          py::arg("manifold"), py::arg("sigma_max") = 0.3, py::arg("holomorphy_tol") = 1e-5)
      .def("non_integrable_control", &make_non_integrable_control, py::arg("i") = 0, py::arg("j") = 2,
           py::arg("rate") = 1.0)
      .def_property_readonly("dim", &TubeModel::dim)
      .def_property_readonly("kind",
                             [](const TubeModel& T) {
                               switch (T.kind) {
                                 case TubeKind::ClosedForm: return "closed-form";
                                 case TubeKind::Flow: return "flow";
                                 default: return "control";
                               }
                             })
      .def_readonly("sigma_max", &TubeModel::sigma_max)
      .def_readonly("holomorphy_residual", &TubeModel::holomorphy_residual)
      .def("gamma", [](const TubeModel& T, const Eigen::VectorXd& x) { return T.gamma(x); })
      .def("dgamma", [](const TubeModel& T, const Eigen::VectorXd& x) { return T.dgamma(x); })
      .def("J", &TubeModel::J)
      .def("ma_residual", [](const TubeModel& T, const Eigen::VectorXd& x) { return ma_residual(T, x).residual; })
      .def("nondegeneracy", &nondegeneracy_value)
      .def("boundary_trace_residual", &boundary_trace_residual)
      .def("lemma21_residual", &lemma21_residual)
      .def("lie_derivative_residual", &lie_derivative_residual)
      .def("nijenhuis_residual", &nijenhuis_residual)
      .def("j_squared_residual", &j_squared_residual)
      .def("compare", [](const TubeModel& a, const TubeModel& b, const std::vector<Eigen::VectorXd>& pts) {
        TubeComparison c = compare_tubes(a, b, pts);
        return std::make_pair(c.gamma, c.J);
      });

  m.def(
      "verify_json",
      [](const std::string& example, const std::string& spec, int n, std::optional<double> sigma_max, int samples,
         std::uint64_t seed, const std::map<std::string, double>& tolerances, const std::string& method,
         bool include_timing) {
        RunConfig c;
        c.example = example;
        c.spec_path = spec;
        c.n = n;
        c.sigma_max = sigma_max;
        c.samples = samples;
        c.seed = seed;
        c.tolerances = tolerances;
        c.integrator.method = parse_integrator(method);
        Report r;
        {
          py::gil_scoped_release release;
          r = run_verify(c);
        }
        return report_to_json(r, include_timing);
      },
      py::arg("example") = "", py::arg("spec") = "", py::arg("n") = 1, py::arg("sigma_max") = py::none(),
      py::arg("samples") = 1000, py::arg("seed") = 0, py::arg("tolerances") = std::map<std::string, double>{},
      py::arg("integrator") = "rkf45-adaptive", py::arg("include_timing") = true);
  m.def("check_names", &check_names);
}
