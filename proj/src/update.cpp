#include "mlpf/update.hpp"

#include <cmath>
#include <stdexcept>

namespace mlpf {

namespace {

double sign0(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

std::span<const double> node_theta(const LayerGraph& graph, std::size_t id,
                                   std::span<const double> theta) {
  return theta.subspan(graph.param_offset(id), graph.node(id).params.size());
}

// Reverse sweep in which each multiplicative layer passes on the sum of its
// per-factor contributions in magnitude, keeping the sign of the exact
// partial. Non-factored layers propagate their exact partials.
std::vector<double> factor_resolved_variables(const LayerGraph& graph,
                                              std::span<const double> x,
                                              std::span<const double> theta,
                                              const Activations& act) {
  std::vector<double> adj(graph.size(), 0.0);
  std::vector<double> out(graph.variable_dim(), 0.0);
  adj.back() = 1.0;
  for (std::size_t id = graph.size(); id >= 1; --id) {
    const double a = adj[id - 1];
    if (a == 0.0) continue;
    const auto& node = graph.node(id);
    const auto in = graph.gather_inputs(id, x, act);
    const auto th = node_theta(graph, id, theta);
    std::vector<double> factors;
    if (node.has_factors()) factors = node.factor_values(in, th);
    for (std::size_t s = 0; s < node.inputs.size(); ++s) {
      double d = node.partial_wrt_input(in, th, s);
      if (!factors.empty()) {
        double mag = 0.0;
        for (std::size_t k = 0; k < factors.size(); ++k) {
          double others = 1.0;
          for (std::size_t m = 0; m < factors.size(); ++m)
            if (m != k) others *= factors[m];
          mag += std::fabs(others * node.factor_partial_wrt_input(in, th, k, s));
        }
        d = sign0(d) * mag;
      }
      if (!std::isfinite(d)) throw EvalError(id, "non-finite factor partial");
      const Ref& r = node.inputs[s];
      (r.is_variable() ? out[r.index] : adj[r.index - 1]) += a * d;
    }
  }
  return out;
}

void check_finite(const UpdateVector& u) {
  for (std::size_t k = 0; k < u.delta.size(); ++k)
    if (!std::isfinite(u.delta[k]))
      throw std::runtime_error("non-finite update for target " + std::to_string(k));
}

}  // namespace

const char* to_string(Method m) noexcept { return m == Method::mlpf ? "mlpf" : "taylor"; }

const char* to_string(TargetMode m) noexcept {
  return m == TargetMode::optimize_vars ? "optimize_vars" : "optimize_params";
}

Method method_from_string(const std::string& name) {
  if (name == "mlpf") return Method::mlpf;
  if (name == "taylor") return Method::taylor;
  throw std::invalid_argument("unknown method '" + name + "' (expected mlpf or taylor)");
}

TargetMode mode_from_string(const std::string& name) {
  if (name == "optimize_vars" || name == "vars") return TargetMode::optimize_vars;
  if (name == "optimize_params" || name == "params") return TargetMode::optimize_params;
  throw std::invalid_argument("unknown mode '" + name + "'");
}

void OptimizerConfig::validate() const {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw std::invalid_argument("eta must be positive");
  if (max_steps < 1) throw std::invalid_argument("max_steps must be at least 1");
  if (!(cost_tol > 0.0)) throw std::invalid_argument("cost_tol must be positive");
  if (!(step_tol > 0.0)) throw std::invalid_argument("step_tol must be positive");
  if (!std::isfinite(alpha) || !std::isfinite(beta))
    throw std::invalid_argument("alpha and beta must be finite");
}

double UpdateVector::norm() const noexcept {
  double s = 0.0;
  for (double d : delta) s += d * d;
  return std::sqrt(s);
}

double layer_sensitivity(const LayerGraph& graph, std::span<const double> x,
                         std::span<const double> theta, const Activations& act,
                         std::size_t layer_id) {
  graph.node(layer_id);
  if (layer_id == graph.size()) return 1.0;
  return graph.sensitivities(x, theta, act, false).layer[layer_id - 1];
}

double neuron_update(const LayerGraph& graph, std::span<const double> x,
                     std::span<const double> theta, const Activations& act,
                     std::size_t layer_id, std::size_t target_id, TargetMode mode,
                     double alpha, double beta) {
  const auto& node = graph.node(layer_id);
  const auto in = graph.gather_inputs(layer_id, x, act);
  const auto th = node_theta(graph, layer_id, theta);
  if (mode == TargetMode::optimize_vars) {
    if (target_id >= graph.variable_dim())
      throw std::out_of_range("no variable " + std::to_string(target_id));
    double partial = 0.0;
    bool reads = false;
    for (std::size_t s = 0; s < node.inputs.size(); ++s) {
      if (node.inputs[s] == Ref::var(target_id)) {
        partial += node.partial_wrt_input(in, th, s);
        reads = true;
      }
    }
    if (!reads)
      throw std::out_of_range("layer " + std::to_string(layer_id) + " does not read x" +
                              std::to_string(target_id));
    return partial * (alpha * x[target_id] + beta);
  }
  const std::size_t off = graph.param_offset(layer_id);
  if (target_id < off || target_id >= off + node.params.size())
    throw std::out_of_range("parameter " + std::to_string(target_id) + " is not owned by layer " +
                            std::to_string(layer_id));
  const double partial = node.partial_wrt_param(in, th, target_id - off);
  if (!std::isfinite(partial)) throw EvalError(layer_id, "non-finite parameter partial");
  return partial * (alpha * theta[target_id] + beta);
}

UpdateVector assemble_update(const LayerGraph& graph, std::span<const double> x,
                             std::span<const double> theta, const OptimizerConfig& config,
                             const CostConfig& cost) {
  return assemble_update(graph, x, theta, graph.eval_with_activations(x, theta), config, cost);
}

UpdateVector assemble_update(const LayerGraph& graph, std::span<const double> x,
                             std::span<const double> theta, const Activations& act,
                             const OptimizerConfig& config, const CostConfig& cost) {
  const bool vars = config.mode == TargetMode::optimize_vars;
  UpdateVector out{.delta = std::vector<double>(vars ? x.size() : theta.size(), 0.0),
                   .eta = config.eta,
                   .alpha = config.alpha,
                   .beta = config.beta};
  const double u = cost_update(act.output(), cost);
  if (u == 0.0) return out;

  const auto sens = graph.sensitivities(x, theta, act, !vars);
  // chain[k] = sum over layers i reading t_k of dF_i * d rho_i / d t_k.
  const std::vector<double>& chain = vars ? sens.variables : sens.params;
  const std::span<const double> targets = vars ? x : theta;
  std::vector<double> proportional_chain;
  if (config.factorized && vars) proportional_chain = factor_resolved_variables(graph, x, theta, act);
  const std::vector<double>& pchain = proportional_chain.empty() ? chain : proportional_chain;

  for (std::size_t k = 0; k < out.delta.size(); ++k)
    out.delta[k] = -config.eta * u * (config.beta * chain[k] + config.alpha * targets[k] * pchain[k]);
  check_finite(out);
  return out;
}

UpdateVector step_taylor(const LayerGraph& graph, std::span<const double> x,
                         std::span<const double> theta, double eta, const CostConfig& cost,
                         TargetMode mode) {
  return step_taylor(graph, x, theta, graph.eval_with_activations(x, theta), eta, cost, mode);
}

UpdateVector step_taylor(const LayerGraph& graph, std::span<const double> x,
                         std::span<const double> theta, const Activations& act, double eta,
                         const CostConfig& cost, TargetMode mode) {
  const bool vars = mode == TargetMode::optimize_vars;
  UpdateVector out{.delta = std::vector<double>(vars ? x.size() : theta.size(), 0.0),
                   .eta = eta,
                   .alpha = 0.0,
                   .beta = 1.0};
  const double rho = cost_residual(act.output(), cost);
  if (rho == 0.0) return out;
  // dX_cost/d rho_N = 2 rho_cost * d rho_cost / d rho_N
  const double outer = 2.0 * rho * cost_residual_slope(act.output(), cost);
  const auto sens = graph.sensitivities(x, theta, act, !vars);
  const std::vector<double>& grad = vars ? sens.variables : sens.params;
  for (std::size_t k = 0; k < out.delta.size(); ++k) out.delta[k] = -eta * outer * grad[k];
  check_finite(out);
  return out;
}

}  // namespace mlpf
