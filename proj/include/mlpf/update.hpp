#pragma once

// Update assembly.
//
// For an optimized scalar t read by layer i, the functional-derivative step is
//
//   delta_t = -eta * dF_cost * dF_i * (d rho_i / d t) * (alpha * t + beta)
//
// where dF_cost = u(rho_cost) comes from the cost kernel and
// dF_i = d rho_N / d rho_i is the layer sensitivity. The alpha * t term is the
// proportional part of the aX + b neuron, beta the chain-rule bias. The
// Taylor baseline is plain gradient descent on X_cost = rho_cost^2.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mlpf/cost.hpp"
#include "mlpf/funcgraph.hpp"

namespace mlpf {

enum class Method { mlpf, taylor };
enum class TargetMode { optimize_params, optimize_vars };

const char* to_string(Method m) noexcept;
const char* to_string(TargetMode m) noexcept;
Method method_from_string(const std::string& name);
TargetMode mode_from_string(const std::string& name);

struct OptimizerConfig {
  Method method = Method::mlpf;
  TargetMode mode = TargetMode::optimize_vars;
  double eta = 1e-3;
  double alpha = 1.0;
  double beta = 1.0;
  std::size_t max_steps = 100000;
  double cost_tol = 1e-12;
  double step_tol = 1e-300;
  /// Resolve multiplicative layers into their factors for the proportional term.
  bool factorized = false;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

struct UpdateVector {
  std::vector<double> delta;
  double eta = 0.0;
  double alpha = 0.0;
  double beta = 0.0;

  double norm() const noexcept;
  std::size_t size() const noexcept { return delta.size(); }
};

/// d rho_N / d rho_i at the given activations.
double layer_sensitivity(const LayerGraph& graph, std::span<const double> x,
                         std::span<const double> theta, const Activations& act,
                         std::size_t layer_id);

/// (d rho_i / d t) * (alpha t + beta) for target t read by layer `layer_id`.
/// In variable mode `target_id` is a variable index, in parameter mode a flat
/// parameter index owned by the layer. Variables read through several slots
/// of the layer contribute once per slot.
double neuron_update(const LayerGraph& graph, std::span<const double> x,
                     std::span<const double> theta, const Activations& act,
                     std::size_t layer_id, std::size_t target_id, TargetMode mode,
                     double alpha, double beta);

/// Functional-derivative step for every target (variables or parameters).
UpdateVector assemble_update(const LayerGraph& graph, std::span<const double> x,
                             std::span<const double> theta, const OptimizerConfig& config,
                             const CostConfig& cost);

/// Chain-rule gradient-descent step on X_cost = rho_cost^2.
UpdateVector step_taylor(const LayerGraph& graph, std::span<const double> x,
                         std::span<const double> theta, double eta, const CostConfig& cost,
                         TargetMode mode = TargetMode::optimize_vars);

/// Same as above with the forward pass already done at (x, theta).
UpdateVector assemble_update(const LayerGraph& graph, std::span<const double> x,
                             std::span<const double> theta, const Activations& act,
                             const OptimizerConfig& config, const CostConfig& cost);
UpdateVector step_taylor(const LayerGraph& graph, std::span<const double> x,
                         std::span<const double> theta, const Activations& act, double eta,
                         const CostConfig& cost, TargetMode mode);

}  // namespace mlpf
