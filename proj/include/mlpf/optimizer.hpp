#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mlpf/benchmarks.hpp"
#include "mlpf/cost.hpp"
#include "mlpf/update.hpp"

namespace mlpf {

enum class RunStatus { converged, max_steps, diverged };

const char* to_string(RunStatus s) noexcept;
RunStatus status_from_string(const std::string& name);

/// State before the update of `iteration` (row 0 is the initial point).
struct TraceRow {
  std::size_t iteration = 0;
  double rho_n = 0.0;
  double rho_cost = 0.0;
  double objective = 0.0;
  double target_norm = 0.0;
  double step_norm = 0.0;         // norm of the update applied at this iteration
  std::vector<double> targets;    // only when the target vector is small
};

struct OptimizationTrace {
  std::vector<TraceRow> rows;
  RunStatus status = RunStatus::max_steps;
  std::string message;
  std::size_t steps = 0;  // updates applied
  std::vector<double> final_targets;
  double final_objective = 0.0;
  double final_cost = 0.0;
  /// Whether rows carry the full target vector.
  std::size_t logged_dims = 0;
};

/// Targets with more components than this are logged by norm only.
inline constexpr std::size_t kMaxLoggedDims = 5;

struct RunOptions {
  /// Keep every k-th row; the first and last rows are always kept.
  std::size_t record_every = 1;
};

/// Iterates the configured update from `initial` until |rho_cost| <
/// cost_tol, the step norm drops below step_tol, or max_steps updates
/// have been applied. Leaving 1e3 x the domain radius (or producing a
/// non-finite state) ends the run with status diverged.
OptimizationTrace run_optimization(const BenchmarkProblem& problem, const OptimizerConfig& config,
                                   const CostConfig& cost, const std::vector<double>& initial,
                                   const RunOptions& options = {});

}  // namespace mlpf
