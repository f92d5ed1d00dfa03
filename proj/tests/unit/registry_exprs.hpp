#pragma once

// Every expression of every builtin example, with a box to sample it on.

#include <string>
#include <vector>

#include "adaptube/contact.hpp"
#include "adaptube/sampling.hpp"

struct RegistryExpr {
  std::string label;
  adaptube::ScalarExpr expr;
  adaptube::Box box;
};

inline std::vector<RegistryExpr> registry_expressions() {
  using namespace adaptube;
  std::vector<RegistryExpr> out;
  for (const auto& info : list_examples()) {
    const ManifoldSpec M = make_example(info.name, info.n);
    const std::string tag = info.name + "(" + std::to_string(info.n) + ")";
    Box tube_box = M.chart_box;
    tube_box.push_back({-M.default_sigma_max, M.default_sigma_max});
    const Box ambient_box(M.ambient_dim(), Interval{-1.5, 1.5});
    auto add = [&](const std::string& what, const std::vector<ScalarExpr>& es, const Box& box) {
      for (std::size_t i = 0; i < es.size(); ++i)
        out.push_back({tag + " " + what + "[" + std::to_string(i) + "]", es[i], box});
    };
    add("theta", M.theta, M.chart_box);
    add("embedding", M.embedding, M.chart_box);
    add("reeb_extension", M.reeb_extension, ambient_box);
    if (M.reeb) add("reeb", *M.reeb, M.chart_box);
    if (M.closed_form_tube) add("closed_form_tube", *M.closed_form_tube, tube_box);
  }
  return out;
}
