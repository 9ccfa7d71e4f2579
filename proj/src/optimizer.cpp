#include "mlpf/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mlpf {

const char* to_string(RunStatus s) noexcept {
  switch (s) {
    case RunStatus::converged: return "converged";
    case RunStatus::max_steps: return "max_steps";
    case RunStatus::diverged: return "diverged";
  }
  return "?";
}

RunStatus status_from_string(const std::string& name) {
  if (name == "converged") return RunStatus::converged;
  if (name == "max_steps") return RunStatus::max_steps;
  if (name == "diverged") return RunStatus::diverged;
  throw std::invalid_argument("unknown status '" + name + "'");
}

namespace {

double l2(const std::vector<double>& v) {
  double s = 0.0;
  for (double d : v) s += d * d;
  return std::sqrt(s);
}

double linf(const std::vector<double>& v) {
  double m = 0.0;
  for (double d : v) m = std::max(m, std::fabs(d));
  return m;
}

}  // namespace

OptimizationTrace run_optimization(const BenchmarkProblem& problem, const OptimizerConfig& config,
                                   const CostConfig& cost, const std::vector<double>& initial,
                                   const RunOptions& options) {
  config.validate();
  if (options.record_every == 0) throw std::invalid_argument("record_every must be positive");
  const LayerGraph& graph = problem.graph;
  if (initial.size() != graph.variable_dim())
    throw std::invalid_argument("initial point has " + std::to_string(initial.size()) +
                                " components, problem " + problem.name + " needs " +
                                std::to_string(graph.variable_dim()));
  if (!problem.in_domain(initial))
    throw std::invalid_argument("initial point outside the domain of " + problem.name);

  if (cost.use_kdl && !(cost.target + cost.kdl_offset > 0.0))
    throw std::invalid_argument("KDL offset " + std::to_string(cost.kdl_offset) +
                                " leaves rho_0 + off non-positive for target " +
                                std::to_string(cost.target));

  const bool vars = config.mode == TargetMode::optimize_vars;
  std::vector<double> x = initial;
  std::vector<double> theta = graph.params();
  std::vector<double>& targets = vars ? x : theta;
  const double divergence_bound = 1e3 * problem.domain_radius();

  OptimizationTrace trace;
  trace.logged_dims = targets.size() <= kMaxLoggedDims ? targets.size() : 0;

  auto make_row = [&](std::size_t k, double rho_n, double rho_cost, double step) {
    TraceRow row{.iteration = k,
                 .rho_n = rho_n,
                 .rho_cost = rho_cost,
                 .objective = rho_n,
                 .target_norm = l2(targets),
                 .step_norm = step};
    if (trace.logged_dims > 0) row.targets = targets;
    return row;
  };
  auto finish = [&](RunStatus status, TraceRow row, std::string message = {}) {
    trace.status = status;
    trace.message = std::move(message);
    trace.final_objective = row.objective;
    trace.final_cost = row.rho_cost;
    if (trace.rows.empty() || trace.rows.back().iteration != row.iteration)
      trace.rows.push_back(std::move(row));
    else
      trace.rows.back() = std::move(row);
    trace.final_targets = targets;
  };

  for (std::size_t k = 0;; ++k) {
    Activations act;
    try {
      act = graph.eval_with_activations(x, theta);
    } catch (const EvalError& e) {
      finish(RunStatus::diverged, make_row(k, std::nan(""), std::nan(""), 0.0), e.what());
      return trace;
    }
    const double rho_n = act.output();
    double rho_cost = 0.0;
    try {
      rho_cost = cost_residual(rho_n, cost);
    } catch (const KdlDomainError& e) {
      finish(RunStatus::diverged, make_row(k, rho_n, std::nan(""), 0.0), e.what());
      return trace;
    }
    if (std::fabs(rho_cost) < config.cost_tol) {
      finish(RunStatus::converged, make_row(k, rho_n, rho_cost, 0.0), "cost below tolerance");
      return trace;
    }
    if (k == config.max_steps) {
      finish(RunStatus::max_steps, make_row(k, rho_n, rho_cost, 0.0));
      return trace;
    }
    UpdateVector update;
    try {
      update = config.method == Method::mlpf
                   ? assemble_update(graph, x, theta, act, config, cost)
                   : step_taylor(graph, x, theta, act, config.eta, cost, config.mode);
    } catch (const EvalError& e) {
      finish(RunStatus::diverged, make_row(k, rho_n, rho_cost, 0.0), e.what());
      return trace;
    } catch (const std::runtime_error& e) {
      finish(RunStatus::diverged, make_row(k, rho_n, rho_cost, 0.0), e.what());
      return trace;
    }
    const double step = update.norm();
    if (step < config.step_tol) {
      finish(RunStatus::converged, make_row(k, rho_n, rho_cost, step), "step below tolerance");
      return trace;
    }
    if (k % options.record_every == 0) trace.rows.push_back(make_row(k, rho_n, rho_cost, step));
    for (std::size_t i = 0; i < targets.size(); ++i) targets[i] += update.delta[i];
    trace.steps = k + 1;
    const double far = linf(targets);
    if (!std::isfinite(far) || far > divergence_bound) {
      finish(RunStatus::diverged, make_row(k + 1, std::nan(""), std::nan(""), 0.0),
             "target left the divergence bound");
      return trace;
    }
  }
}

}  // namespace mlpf
