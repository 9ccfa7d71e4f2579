#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <sstream>

#include "mlpf/acceptance.hpp"
#include "mlpf/benchmarks.hpp"
#include "mlpf/config.hpp"
#include "mlpf/cost.hpp"
#include "mlpf/experiment.hpp"
#include "mlpf/trace_io.hpp"

namespace py = pybind11;
using namespace mlpf;

namespace {

py::dict config_dict(const RunConfig& c) {
  py::dict d;
  std::istringstream in(emit_config(c));
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (line.empty() || line[0] == '#' || eq == std::string::npos) continue;
    d[py::str(line.substr(0, eq))] = line.substr(eq + 3);
  }
  return d;
}

std::string config_text(const py::handle& v) {
  if (py::isinstance<py::bool_>(v)) return v.cast<bool>() ? "true" : "false";
  if (py::isinstance<py::float_>(v)) return format_double(v.cast<double>());
  if (py::isinstance<py::str>(v)) return v.cast<std::string>();
  if (py::isinstance<py::sequence>(v)) {
    std::string out;
    for (const auto& item : v.cast<py::sequence>()) {
      if (!out.empty()) out += ", ";
      out += format_double(item.cast<double>());
    }
    return out;
  }
  return py::str(v).cast<std::string>();
}

void apply_overrides(RunConfig& c, const py::dict& overrides) {
  for (const auto& [k, v] : overrides) set_config_value(c, k.cast<std::string>(), config_text(v));
  c.validate();
}

py::list rows_as_lists(const OptimizationTrace& t) {
  py::list rows;
  for (const auto& r : t.rows) {
    py::list row;
    row.append(r.iteration);
    for (double v : {r.rho_n, r.rho_cost, r.objective, r.target_norm, r.step_norm}) row.append(v);
    for (double v : r.targets) row.append(v);
    rows.append(row);
  }
  return rows;
}

}  // namespace

PYBIND11_MODULE(_mlpf, m) {
  m.doc() = "Layer-graph optimizer with functional-derivative updates";
  m.attr("__version__") = kCodeVersion;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<KdlDomainError>(m, "KdlDomainError", PyExc_ArithmeticError);

  py::class_<BenchmarkProblem>(m, "Problem")
      .def_readonly("name", &BenchmarkProblem::name)
      .def_readonly("target", &BenchmarkProblem::target)
      .def_readonly("global_minimum_value", &BenchmarkProblem::global_minimum_value)
      .def_readonly("global_minimum_location", &BenchmarkProblem::global_minimum_location)
      .def_readonly("domain_box", &BenchmarkProblem::domain_box)
      .def_property_readonly("dim", &BenchmarkProblem::dim)
      .def_property_readonly("layers", [](const BenchmarkProblem& p) { return p.graph.size(); })
      .def_property_readonly("initials",
                             [](const BenchmarkProblem& p) {
                               py::dict d;
                               for (const auto& n : p.canonical_initials) d[py::str(n.name)] = n.x;
                               return d;
                             })
      .def("__call__",
           [](const BenchmarkProblem& p, const std::vector<double>& x) { return p.graph.eval_forward(x); })
      .def("gradient",
           [](const BenchmarkProblem& p, const std::vector<double>& x) { return p.graph.gradient(x); })
      .def("in_domain", &BenchmarkProblem::in_domain)
      .def("__repr__", [](const BenchmarkProblem& p) {
        return "<Problem " + p.name + " dim=" + std::to_string(p.dim()) + ">";
      });

  m.def("problem", &problem_by_name, py::arg("name"), py::arg("lj_seed") = 0,
        "Build a benchmark problem by name");
  m.def("problem_names", &problem_names);

  py::class_<RunConfig>(m, "RunConfig")
      .def("to_dict", &config_dict)
      .def("emit", &emit_config)
      .def("set",
           [](RunConfig& c, const std::string& key, const py::handle& value) {
             set_config_value(c, key, config_text(value));
           })
      .def("validate", &RunConfig::validate)
      .def("__getitem__", [](const RunConfig& c, const std::string& key) {
        auto d = config_dict(c);
        if (!d.contains(key)) throw py::key_error(key);
        return d[py::str(key)];
      });

  m.def("config_keys", &config_keys);
  m.def("parse_config", &parse_config, py::arg("text"));
  m.def("load_config", &load_config, py::arg("path"));
  m.def(
      "make_config",
      [](const std::string& problem, const py::kwargs& overrides) {
        RunConfig c = defaults_for(problem);
        apply_overrides(c, overrides);
        return c;
      },
      py::arg("problem"), "Per-problem defaults with keyword overrides");

  py::class_<OptimizationTrace>(m, "Trace")
      .def_property_readonly("status", [](const OptimizationTrace& t) { return std::string(to_string(t.status)); })
      .def_readonly("message", &OptimizationTrace::message)
      .def_readonly("steps", &OptimizationTrace::steps)
      .def_readonly("final_targets", &OptimizationTrace::final_targets)
      .def_readonly("final_objective", &OptimizationTrace::final_objective)
      .def_readonly("final_cost", &OptimizationTrace::final_cost)
      .def_property_readonly("columns", &trace_columns)
      .def_property_readonly("rows", &rows_as_lists)
      .def("__len__", [](const OptimizationTrace& t) { return t.rows.size(); })
      .def("to_csv", &trace_to_csv, py::arg("config"))
      .def("to_json", &trace_to_json, py::arg("config"));

  m.def(
      "run",
      [](const RunConfig& config) {
        py::gil_scoped_release release;
        return run_experiment(config);
      },
      py::arg("config"), "Run one optimization; writes the trace when config['output'] is set");

  m.def(
      "read_trace",
      [](const std::string& path) {
        auto doc = read_trace(path);
        return py::make_tuple(std::move(doc.trace), std::move(doc.config), doc.code_version);
      },
      py::arg("path"), "Read a CSV or JSON trace; returns (trace, config, code_version)");

  m.def(
      "cost_update",
      [](double rho_n, double target, const std::string& kernel, bool use_kdl, double kdl_offset) {
        const CostConfig c{.kernel = {kernel_from_string(kernel)}, .use_kdl = use_kdl,
                           .kdl_offset = kdl_offset, .target = target};
        return cost_update(rho_n, c);
      },
      py::arg("rho_n"), py::arg("target") = 0.0, py::arg("kernel") = "square", py::arg("use_kdl") = false,
      py::arg("kdl_offset") = 1.0);

  m.def("frozen_eta", &frozen_eta, py::arg("problem"), py::arg("cell"));
  m.def("method_cells", [](const std::string& problem) {
    std::vector<std::string> names;
    for (const auto& c : standard_method_matrix(problem)) names.push_back(c.name);
    return names;
  });
  m.def("icosahedral_spread", &icosahedral_spread, py::arg("coords"));

  m.def(
      "check",
      [](const std::vector<std::string>& only) {
        py::list out;
        for (const auto& c : acceptance_criteria()) {
          if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
          CriterionResult r;
          {
            py::gil_scoped_release release;
            r = c.run();
          }
          py::dict d;
          d["id"] = r.id;
          d["passed"] = r.passed;
          d["detail"] = r.detail;
          d["seconds"] = r.seconds;
          out.append(d);
        }
        return out;
      },
      py::arg("only") = std::vector<std::string>{}, "Run acceptance criteria; returns one dict per criterion");
}
