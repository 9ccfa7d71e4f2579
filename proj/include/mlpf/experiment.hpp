#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mlpf/benchmarks.hpp"
#include "mlpf/config.hpp"
#include "mlpf/optimizer.hpp"

namespace mlpf {

/// Problem instance named by the config (lj13 uses `lj_seed`).
BenchmarkProblem build_problem(const RunConfig& config);

/// Explicit `x0`, else the named canonical initial, else the first one.
std::vector<double> resolve_initial(const BenchmarkProblem& problem, const RunConfig& config);

/// Row stride that keeps a persisted trace within `max_rows` rows.
std::size_t record_stride(const RunConfig& config);

/// Runs one optimization. When `config.output` is non-empty the trace is
/// written there in `config.format`.
OptimizationTrace run_experiment(const RunConfig& config);
OptimizationTrace run_experiment(const RunConfig& config, const BenchmarkProblem& problem);

/// One column of the method matrix: a named edit applied to the base config.
struct MethodCell {
  std::string name;
  std::function<void(RunConfig&)> apply;
};

/// mlpf-square, mlpf-square+KDL, mlpf-sigmoid+KDL,
/// mlpf-square-factorized+KDL, taylor; learning rates are the frozen
/// per-problem values.
std::vector<MethodCell> standard_method_matrix(const std::string& problem);

/// Frozen learning rate of a matrix cell for a problem.
double frozen_eta(const std::string& problem, const std::string& cell);

struct SummaryRow {
  std::string problem;
  std::string cell;
  std::string initial;
  std::string status;  // terminal status, or "error" when the cell failed to run
  double final_cost = 0.0;
  double final_objective = 0.0;
  std::size_t steps = 0;
  std::string trace_path;
  std::string error;
};

/// Runs every cell x initial combination, writing one trace per run into
/// `out_dir` (skipped when empty). Up to `jobs` cells run concurrently; a
/// failing cell is recorded and the rest still run. Rows come back in
/// initial-major, cell-minor order regardless of scheduling.
std::vector<SummaryRow> compare_methods(const RunConfig& base,
                                        const std::vector<std::string>& initials,
                                        const std::vector<MethodCell>& cells,
                                        const std::string& out_dir, unsigned jobs = 1);

std::string summary_to_csv(const std::vector<SummaryRow>& rows);

}  // namespace mlpf
