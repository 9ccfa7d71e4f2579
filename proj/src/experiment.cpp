#include "mlpf/experiment.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "mlpf/trace_io.hpp"

namespace mlpf {

namespace {

std::string real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

}  // namespace

BenchmarkProblem build_problem(const RunConfig& config) {
  return problem_by_name(config.problem, config.lj_seed);
}

std::vector<double> resolve_initial(const BenchmarkProblem& problem, const RunConfig& config) {
  if (!config.x0.empty()) return config.x0;
  if (problem.canonical_initials.empty())
    throw std::invalid_argument("problem " + problem.name + " has no canonical initial");
  if (config.initial.empty()) return problem.canonical_initials.front().x;
  return problem.initial(config.initial).x;
}

std::size_t record_stride(const RunConfig& config) {
  if (config.full_resolution) return 1;
  // rows kept: iterations 0, k, 2k, ... below max_steps, plus the final row
  const std::size_t budget = config.max_rows - 1;
  return std::max<std::size_t>(1, (config.max_steps + budget - 1) / budget);
}

OptimizationTrace run_experiment(const RunConfig& config) {
  config.validate();
  return run_experiment(config, build_problem(config));
}

OptimizationTrace run_experiment(const RunConfig& config, const BenchmarkProblem& problem) {
  config.validate();
  const auto x0 = resolve_initial(problem, config);
  auto trace = run_optimization(problem, config.optimizer(), config.cost(problem.target), x0,
                                RunOptions{.record_every = record_stride(config)});
  if (!config.output.empty()) emit_trace(trace, config, config.output, config.format);
  return trace;
}

double frozen_eta(const std::string& problem, const std::string& cell) {
  static const std::map<std::pair<std::string, std::string>, double> table = {
      {{"ctl", "mlpf-square"}, 1e-3},
      {{"ctl", "mlpf-square+KDL"}, 1e-3},
      {{"ctl", "mlpf-sigmoid+KDL"}, 1e-3},
      {{"ctl", "mlpf-square-factorized+KDL"}, 1e-3},
      {{"ctl", "taylor"}, 1e-3},
      {{"dvg02", "mlpf-square"}, 1e-46},
      {{"dvg02", "mlpf-square+KDL"}, 1e-15},
      {{"dvg02", "mlpf-sigmoid+KDL"}, 1e-11},
      {{"dvg02", "mlpf-square-factorized+KDL"}, 1e-15},
      {{"dvg02", "taylor"}, 1e-24},
      {{"lj13", "mlpf-square"}, 1e-7},
      {{"lj13", "mlpf-square+KDL"}, 1e-4},
      {{"lj13", "mlpf-sigmoid+KDL"}, 1e-4},
      {{"lj13", "mlpf-square-factorized+KDL"}, 1e-6},
      {{"lj13", "taylor"}, 1e-4},
  };
  auto it = table.find({problem, cell});
  if (it == table.end()) throw std::invalid_argument("no frozen eta for " + problem + "/" + cell);
  return it->second;
}

std::vector<MethodCell> standard_method_matrix(const std::string& problem) {
  auto cell = [&](std::string name, Method m, KernelKind k, bool kdl, bool factorized) {
    const double eta = frozen_eta(problem, name);
    return MethodCell{name, [=](RunConfig& c) {
                        c.method = m;
                        c.kernel = k;
                        c.use_kdl = kdl;
                        c.factorized = factorized;
                        c.eta = eta;
                      }};
  };
  return {
      cell("mlpf-square", Method::mlpf, KernelKind::square, false, false),
      cell("mlpf-square+KDL", Method::mlpf, KernelKind::square, true, false),
      cell("mlpf-sigmoid+KDL", Method::mlpf, KernelKind::sigmoid_convex, true, false),
      cell("mlpf-square-factorized+KDL", Method::mlpf, KernelKind::square, true, true),
      cell("taylor", Method::taylor, KernelKind::square, false, false),
  };
}

std::vector<SummaryRow> compare_methods(const RunConfig& base,
                                        const std::vector<std::string>& initials,
                                        const std::vector<MethodCell>& cells,
                                        const std::string& out_dir, unsigned jobs) {
  std::vector<SummaryRow> rows(initials.size() * cells.size());
  if (rows.empty()) return rows;
  base.validate();
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
  const BenchmarkProblem problem = build_problem(base);
  const std::string ext = base.format == TraceFormat::csv ? ".csv" : ".json";

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      const std::string& init = initials[i / cells.size()];
      const MethodCell& cell = cells[i % cells.size()];
      SummaryRow& row = rows[i];
      row.problem = base.problem;
      row.cell = cell.name;
      row.initial = init;
      try {
        RunConfig c = base;
        c.initial = init;
        c.x0.clear();
        cell.apply(c);
        c.output.clear();
        if (!out_dir.empty())
          c.output = (std::filesystem::path(out_dir) / (base.problem + "_" + cell.name + "_" + init + ext))
                         .string();
        const auto trace = run_experiment(c, problem);
        row.status = to_string(trace.status);
        row.final_cost = trace.final_cost;
        row.final_objective = trace.final_objective;
        row.steps = trace.steps;
        row.trace_path = c.output;
        row.error = trace.message;
      } catch (const std::exception& e) {
        row.status = "error";
        row.final_cost = row.final_objective = std::nan("");
        row.error = e.what();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(rows.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rows;
}

std::string summary_to_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream o;
  o << "problem,cell,initial,status,final_cost,final_objective,steps,trace,message\n";
  for (const auto& r : rows)
    o << r.problem << ',' << csv_field(r.cell) << ',' << r.initial << ',' << r.status << ','
      << real(r.final_cost) << ',' << real(r.final_objective) << ',' << r.steps << ','
      << csv_field(r.trace_path) << ',' << csv_field(r.error) << '\n';
  return o.str();
}

}  // namespace mlpf
