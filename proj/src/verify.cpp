#include "adaptube/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <sstream>
#include <typeinfo>

#include <json.hpp>

#include "adaptube/spec_io.hpp"
#include "adaptube/sympl.hpp"
#include "adaptube/tube.hpp"

namespace adaptube {

using json = nlohmann::ordered_json;

namespace {

constexpr double kExact = std::numeric_limits<double>::denorm_min();

std::string error_name(const std::exception& e) {
  if (dynamic_cast<const HolomorphyFailure*>(&e)) return "HolomorphyFailure";
  if (dynamic_cast<const SingularContact*>(&e)) return "SingularContact";
  if (dynamic_cast<const DegenerateContact*>(&e)) return "DegenerateContact";
  if (dynamic_cast<const LeftChartBox*>(&e)) return "LeftChartBox";
  if (dynamic_cast<const MaxStepsExceeded*>(&e)) return "MaxStepsExceeded";
  if (dynamic_cast<const UnsupportedOrder*>(&e)) return "UnsupportedOrder";
  if (dynamic_cast<const DomainError*>(&e)) return "DomainError";
  if (dynamic_cast<const NonFiniteError*>(&e)) return "NonFiniteError";
  if (dynamic_cast<const SpecError*>(&e)) return "SpecError";
  return "Error";
}

std::vector<double> to_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void finish(CheckReport& c) {
  c.pass = c.error.empty() && std::isfinite(c.max_residual) && c.max_residual < c.tolerance;
}

// Max of fn over the points; the first exception ends the check.
template <typename Fn>
CheckReport sample_check(const std::string& name, double tol, const std::vector<Eigen::VectorXd>& pts,
                         Fn fn) {
  Timer timer;
  CheckReport c;
  c.name = name;
  c.tolerance = tol;
  try {
    for (const auto& x : pts) {
      const double r = fn(x);
      ++c.samples;
      if (!std::isfinite(r)) {
        c.max_residual = INFINITY;
        c.worst_point = to_vec(x);
        break;
      }
      if (c.worst_point.empty() || r > c.max_residual) {
        c.max_residual = r;
        c.worst_point = to_vec(x);
      }
    }
  } catch (const std::exception& e) {
    c.error = error_name(e) + ": " + e.what();
  }
  finish(c);
  c.timing_ms = timer.ms();
  return c;
}

CheckReport failed_check(const std::string& name, double tol, const std::string& error) {
  CheckReport c;
  c.name = name;
  c.tolerance = tol;
  c.max_residual = INFINITY;
  c.error = error;
  return c;
}

Eigen::VectorXd on_zero_section(const Eigen::VectorXd& p) {
  Eigen::VectorXd x(p.size() + 1);
  x << p, 0.0;
  return x;
}

}  // namespace

void RunConfig::validate() const {
  if (example.empty() == spec_path.empty())
    throw std::invalid_argument("exactly one of example and spec path must be given");
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  if (sigma_max && !(*sigma_max > 0.0)) throw std::invalid_argument("sigma_max must be positive");
  const auto& names = check_names();
  for (const auto& [k, v] : tolerances) {
    if (std::find(names.begin(), names.end(), k) == names.end())
      throw std::invalid_argument("unknown check '" + k + "'");
    if (!(v > 0.0)) throw std::invalid_argument("tolerance for '" + k + "' must be positive");
  }
  integrator.validate();
}

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names = {
      "spec_validation", "structure_identities", "j_squared",   "energy_zero_section",
      "boundary_trace",  "lemma21",              "lie_derivative", "monge_ampere",
      "nondegeneracy",   "cr_restriction",       "nijenhuis",   "holomorphy",
      "tube_agreement"};
  return names;
}

std::map<std::string, double> default_tolerances(const std::string& manifold) {
  const bool tight = manifold == "heisenberg";
  return {
      {"spec_validation", 1e-9},
      {"structure_identities", 1e-9},
      {"j_squared", 1e-9},
      {"energy_zero_section", kExact},
      {"boundary_trace", tight ? 1e-8 : 1e-7},
      {"lemma21", 1e-8},
      {"lie_derivative", tight ? 1e-8 : 1e-7},
      {"monge_ampere", tight ? 1e-8 : 1e-7},
      // residual is 1/|value|: passes while |value| > 1e-6
      {"nondegeneracy", 1e6},
      {"cr_restriction", tight ? 1e-9 : 1e-8},
      {"nijenhuis", tight ? 1e-8 : 1e-6},
      {"holomorphy", 1e-7},
      {"tube_agreement", tight ? 1e-8 : 1e-7},
  };
}

std::string integrator_name(IntegratorMethod m) {
  return m == IntegratorMethod::Rk4Fixed ? "rk4-fixed" : "rkf45-adaptive";
}

IntegratorMethod parse_integrator(const std::string& name) {
  if (name == "rk4-fixed") return IntegratorMethod::Rk4Fixed;
  if (name == "rkf45-adaptive") return IntegratorMethod::Rkf45Adaptive;
  throw std::invalid_argument("unknown integrator '" + name + "'");
}

Report run_verify(const RunConfig& cfg) {
  cfg.validate();
  Report rep;
  rep.version = ADAPTUBE_VERSION;
  rep.config = cfg;

  // Spec loading errors propagate: they are config errors, not check results.
  ManifoldSpec M = cfg.spec_path.empty() ? make_example(cfg.example, cfg.n)
                                         : load_manifold_spec(cfg.spec_path, 0, cfg.seed);
  rep.manifold = cfg.spec_path.empty() ? cfg.example + "(" + std::to_string(cfg.n) + ")" : M.name;
  const double sigma_max = cfg.sigma_max.value_or(M.default_sigma_max);
  rep.sigma_max = sigma_max;

  std::map<std::string, double> tol = default_tolerances(cfg.spec_path.empty() ? cfg.example : M.name);
  for (const auto& [k, v] : cfg.tolerances) tol[k] = v;
  rep.config.tolerances = tol;

  const int val_samples = std::min(cfg.samples, 100);
  {
    Timer timer;
    ValidationReport vr = validate_spec(M, val_samples, cfg.seed);
    const ValidationItem* vol = vr.find("contact_volume");
    if (vol && !vol->pass) throw SpecValidationError(vr);
    CheckReport c;
    c.name = "spec_validation";
    c.tolerance = tol["spec_validation"];
    c.samples = val_samples;
    for (const auto& item : vr.items) {
      if (item.name == "contact_volume") continue;
      c.max_residual = std::max(c.max_residual, item.value);
      if (!item.pass) c.error += (c.error.empty() ? "" : "; ") + item.name + " failed";
    }
    finish(c);
    c.timing_ms = timer.ms();
    rep.checks.push_back(c);
  }

  HolomorphyGrid grid;
  grid.sigma_max = std::min(0.3, sigma_max);
  grid.seed = cfg.seed;
  FlowTubeOptions flow_opts;
  flow_opts.cfg = cfg.integrator;
  flow_opts.grid = grid;

  std::unique_ptr<TubeModel> tube;
  std::string tube_error;
  try {
    if (M.tube_map) {
      tube = std::make_unique<TubeModel>(build_tube_closed_form(M, sigma_max));
      rep.tube = "closed-form";
    } else {
      rep.tube = "flow";
      tube = std::make_unique<TubeModel>(build_tube_by_flow(M, sigma_max, flow_opts));
    }
  } catch (const std::exception& e) {
    tube_error = error_name(e) + ": " + e.what();
  }

  Box domain = M.chart_box;
  domain.push_back({-sigma_max, sigma_max});
  const auto tube_pts = halton_points(domain, cfg.samples, cfg.seed);
  const auto base_pts = halton_points(M.chart_box, cfg.samples, cfg.seed);

  rep.checks.push_back(sample_check("structure_identities", tol["structure_identities"], tube_pts,
                                    [&](const Eigen::VectorXd& x) {
                                      StructureResiduals r = check_structure_identities(M, SympPoint::from_tube(x));
                                      return std::max({r.xi_energy, r.x_energy, r.bracket});
                                    }));

  auto tube_check = [&](const std::string& name, const std::vector<Eigen::VectorXd>& pts, auto fn) {
    if (!tube) return failed_check(name, tol[name], tube_error);
    return sample_check(name, tol[name], pts, fn);
  };

  rep.checks.push_back(tube_check("j_squared", tube_pts, [&](const Eigen::VectorXd& x) {
    return j_squared_residual(*tube, x);
  }));
  rep.checks.push_back(sample_check("energy_zero_section", tol["energy_zero_section"], base_pts,
                                    [&](const Eigen::VectorXd& p) {
                                      const Eigen::VectorXd x = on_zero_section(p);
                                      const double e_map = make_coordinate_map(M.dim() + 1, M.dim())(x)(0);
                                      return std::max(std::abs(energy(SympPoint{p, 0.0})), std::abs(e_map));
                                    }));
  rep.checks.push_back(tube_check("boundary_trace", base_pts, [&](const Eigen::VectorXd& p) {
    return boundary_trace_residual(*tube, p);
  }));
  rep.checks.push_back(tube_check("lemma21", tube_pts, [&](const Eigen::VectorXd& x) {
    return lemma21_residual(*tube, x);
  }));
  rep.checks.push_back(tube_check("lie_derivative", tube_pts, [&](const Eigen::VectorXd& x) {
    return lie_derivative_residual(*tube, x);
  }));
  rep.checks.push_back(tube_check("monge_ampere", tube_pts, [&](const Eigen::VectorXd& x) {
    return ma_residual(*tube, x).residual;
  }));
  rep.checks.push_back(tube_check("nondegeneracy", tube_pts, [&](const Eigen::VectorXd& x) {
    const double v = std::abs(nondegeneracy_value(*tube, x));
    return v > 0.0 ? 1.0 / v : INFINITY;
  }));
  rep.checks.push_back(tube_check("cr_restriction", base_pts, [&](const Eigen::VectorXd& p) {
    const CrResult r = check_cr_restriction(*tube, p);
    return std::max(r.structure, r.theta);
  }));
  rep.checks.push_back(tube_check("nijenhuis", tube_pts, [&](const Eigen::VectorXd& x) {
    return nijenhuis_residual(*tube, x);
  }));

  {
    Timer timer;
    CheckReport c;
    c.name = "holomorphy";
    c.tolerance = tol["holomorphy"];
    try {
      const HolomorphyScan scan = holomorphy_scan(M, grid, cfg.integrator);
      c.samples = scan.evaluations;
      c.max_residual = std::isfinite(scan.max_residual) ? scan.max_residual : INFINITY;
      c.worst_point = to_vec(scan.worst);
      if (scan.max_residual > flow_opts.holomorphy_tol)
        c.error = "HolomorphyFailure: residual " + std::to_string(scan.max_residual) +
                  " exceeds " + std::to_string(flow_opts.holomorphy_tol);
    } catch (const std::exception& e) {
      c.error = error_name(e) + ": " + e.what();
    }
    finish(c);
    c.timing_ms = timer.ms();
    rep.checks.push_back(c);
  }

  {
    // 400 base points x 10 sigma levels; the reference is the closed form
    // when there is one, otherwise a fixed-step rk4 flow tube.
    Timer timer;
    CheckReport c;
    c.name = "tube_agreement";
    c.tolerance = tol["tube_agreement"];
    try {
      std::unique_ptr<TubeModel> a, b;
      if (M.tube_map) {
        a = std::make_unique<TubeModel>(*tube);
        b = std::make_unique<TubeModel>(build_tube_by_flow(M, sigma_max, flow_opts));
      } else {
        if (!tube) throw std::runtime_error(tube_error);
        a = std::make_unique<TubeModel>(*tube);
        FlowTubeOptions rk4 = flow_opts;
        rk4.cfg.method = IntegratorMethod::Rk4Fixed;
        rk4.cfg.step = 1e-2;
        b = std::make_unique<TubeModel>(build_tube_by_flow(M, sigma_max, rk4));
      }
      std::vector<Eigen::VectorXd> pts;
      for (const auto& p : halton_points(M.chart_box, 400, cfg.seed))
        for (double s : linspace(-sigma_max, sigma_max, 10)) {
          Eigen::VectorXd x = on_zero_section(p);
          x(M.dim()) = s;
          pts.push_back(x);
        }
      const TubeComparison cmp = compare_tubes(*a, *b, pts);
      c.samples = static_cast<int>(pts.size());
      c.max_residual = std::max(cmp.gamma, cmp.J);
      c.worst_point = to_vec(cmp.gamma >= cmp.J ? cmp.worst_gamma : cmp.worst_J);
    } catch (const std::exception& e) {
      c.max_residual = INFINITY;
      c.error = tube ? error_name(e) + ": " + e.what() : tube_error;
    }
    finish(c);
    c.timing_ms = timer.ms();
    rep.checks.push_back(c);
  }

  rep.overall_pass = true;
  for (const auto& c : rep.checks) rep.overall_pass = rep.overall_pass && c.pass;
  return rep;
}

namespace {

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string report_to_json(const Report& r, bool include_timing) {
  json j;
  j["version"] = r.version;
  json cfg;
  if (r.config.spec_path.empty())
    cfg["example"] = r.config.example;
  else
    cfg["spec"] = r.config.spec_path;
  cfg["n"] = r.config.n;
  cfg["sigma_max"] = r.sigma_max;
  cfg["samples"] = r.config.samples;
  cfg["seed"] = r.config.seed;
  cfg["integrator"] = {{"method", integrator_name(r.config.integrator.method)},
                       {"rel_tol", r.config.integrator.rel_tol},
                       {"abs_tol", r.config.integrator.abs_tol},
                       {"step", r.config.integrator.step},
                       {"max_steps", r.config.integrator.max_steps}};
  json tols;
  for (const auto& name : check_names()) {
    auto it = r.config.tolerances.find(name);
    if (it != r.config.tolerances.end()) tols[name] = it->second;
  }
  cfg["tolerances"] = tols;
  j["config"] = cfg;
  j["manifold"] = r.manifold;
  j["tube"] = r.tube;
  json checks = json::array();
  for (const auto& c : r.checks) {
    json e;
    e["name"] = c.name;
    e["samples"] = c.samples;
    e["max_residual"] = number_or_null(c.max_residual);
    e["tolerance"] = c.tolerance;
    e["pass"] = c.pass;
    e["worst_point"] = c.worst_point;
    if (!c.error.empty()) e["error"] = c.error;
    if (include_timing) e["timing_ms"] = c.timing_ms;
    checks.push_back(e);
  }
  j["checks"] = checks;
  j["overall_pass"] = r.overall_pass;
  return j.dump(2) + "\n";
}

std::string report_to_csv(const Report& r, bool include_timing) {
  std::ostringstream os;
  os << "name,samples,max_residual,tolerance,pass,worst_point,error";
  if (include_timing) os << ",timing_ms";
  os << "\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (const auto& c : r.checks) {
    std::string wp;
    for (std::size_t i = 0; i < c.worst_point.size(); ++i) wp += (i ? ";" : "") + num(c.worst_point[i]);
    std::string err = c.error;
    for (char& ch : err)
      if (ch == '"') ch = '\'';
    os << c.name << "," << c.samples << "," << num(c.max_residual) << "," << num(c.tolerance) << ","
       << (c.pass ? "true" : "false") << "," << wp << ",\"" << err << "\"";
    if (include_timing) os << "," << num(c.timing_ms);
    os << "\n";
  }
  return os.str();
}

}  // namespace adaptube
