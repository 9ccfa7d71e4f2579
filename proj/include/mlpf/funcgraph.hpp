#pragma once

// Layered representation of a continuous objective.
//
// An objective rho_N(x; theta) is stored as an ordered list of scalar layers.
// Each layer reads the variable vector x and/or the outputs of earlier
// layers, carries its own parameter block theta_i, and knows its analytic
// partial derivatives with respect to every input slot and every parameter.
// The last layer produces the objective value.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlpf {

/// Raised when a layer produces a non-finite value or partial.
class EvalError : public std::runtime_error {
 public:
  EvalError(std::size_t layer_id, const std::string& what);
  std::size_t layer_id() const noexcept { return layer_id_; }

 private:
  std::size_t layer_id_;
};

enum class LayerKind : std::uint8_t {
  affine,       // sum_k w_k u_k + b          params: w_0..w_{m-1}, b
  power,        // a * u^p                    params: a, p
  sin,          // a * sin(u) + b             params: a, b
  cos,          // a * cos(u) + b
  tanh,         // a * tanh(u) + b
  exp,          // a * exp(u) + b
  exp_abs,      // a * exp(|u|) + b
  sqrt,         // a * sqrt(u) + b
  abs,          // a * |u| + b
  log,          // a * log(u) + b
  reciprocal,   // a / u + b
  sum,          // sum_k u_k                  no params
  sum_squares,  // sum_k u_k^2                no params
  product,      // prod_k u_k                 no params; factors = inputs
  distance,     // |u[0:3] - u[3:6]|          no params
  lj_pair,      // 4 eps ((sig/u)^12 - (sig/u)^6)   params: eps, sig
};

const char* to_string(LayerKind kind) noexcept;

/// Where a layer input comes from: a component of x or an earlier layer.
struct Ref {
  enum class Source : std::uint8_t { variable, layer };
  Source source = Source::variable;
  std::size_t index = 0;  // variable index (0-based) or layer id (1-based)

  static Ref var(std::size_t k) { return {Source::variable, k}; }
  static Ref layer(std::size_t id) { return {Source::layer, id}; }
  bool is_variable() const noexcept { return source == Source::variable; }
  friend bool operator==(const Ref&, const Ref&) = default;
};

struct LayerNode {
  std::size_t id = 0;  // 1-based position in the graph
  LayerKind kind = LayerKind::affine;
  std::vector<Ref> inputs;
  std::vector<double> params;
  std::string label;

  /// Layer value for the given input values and parameters.
  double eval(std::span<const double> in, std::span<const double> theta) const;
  double partial_wrt_input(std::span<const double> in,
                           std::span<const double> theta,
                           std::size_t input_slot) const;
  double partial_wrt_param(std::span<const double> in,
                           std::span<const double> theta,
                           std::size_t param_slot) const;

  /// True when the layer value is a product of named sub-terms.
  bool has_factors() const noexcept;
  std::size_t factor_count() const noexcept;
  /// Values of the multiplicative sub-terms; their product is eval().
  std::vector<double> factor_values(std::span<const double> in,
                                    std::span<const double> theta) const;
  /// d(factor)/d(input slot).
  double factor_partial_wrt_input(std::span<const double> in,
                                  std::span<const double> theta,
                                  std::size_t factor,
                                  std::size_t input_slot) const;
};

/// Per-layer values rho_1..rho_N at one point.
struct Activations {
  std::vector<double> values;  // values[i-1] == rho_i

  double layer(std::size_t id) const { return values.at(id - 1); }
  double output() const { return values.back(); }
  std::size_t size() const noexcept { return values.size(); }
};

/// Reverse-sweep result: adjoints dRho_N/dRho_i and the full gradients.
struct Sensitivities {
  std::vector<double> layer;      // layer[i-1] == d rho_N / d rho_i
  std::vector<double> variables;  // d rho_N / d x_k
  std::vector<double> params;     // d rho_N / d theta (flat layout)
};

class LayerGraph {
 public:
  explicit LayerGraph(std::size_t variable_dim) : variable_dim_(variable_dim) {}

  /// Appends a layer and returns its 1-based id. Inputs must reference
  /// variables below variable_dim or layers already in the graph.
  std::size_t add(LayerKind kind, std::vector<Ref> inputs,
                  std::vector<double> params = {}, std::string label = {});

  std::size_t variable_dim() const noexcept { return variable_dim_; }
  std::size_t size() const noexcept { return layers_.size(); }
  const LayerNode& node(std::size_t id) const;
  const std::vector<LayerNode>& layers() const noexcept { return layers_; }

  /// Flat parameter vector: concatenation of every layer's theta_i.
  std::vector<double> params() const;
  std::size_t param_count() const noexcept { return param_offsets_.back(); }
  std::size_t param_offset(std::size_t id) const { return param_offsets_.at(id - 1); }
  /// Layer id owning flat parameter index p.
  std::size_t param_owner(std::size_t p) const;

  double eval_forward(std::span<const double> x) const;
  double eval_forward(std::span<const double> x, std::span<const double> theta) const;
  Activations eval_with_activations(std::span<const double> x) const;
  Activations eval_with_activations(std::span<const double> x,
                                    std::span<const double> theta) const;

  /// Input values seen by layer `id` under the given activations.
  std::vector<double> gather_inputs(std::size_t id, std::span<const double> x,
                                    const Activations& act) const;

  double partial_wrt_param(std::size_t id, std::size_t param_slot,
                           std::span<const double> x) const;
  double partial_wrt_input(std::size_t id, std::size_t input_slot,
                           std::span<const double> x) const;

  /// Reverse sweep over the layers. `act` must come from the same point.
  /// Parameter adjoints are skipped unless `with_params` is set.
  Sensitivities sensitivities(std::span<const double> x,
                              std::span<const double> theta,
                              const Activations& act, bool with_params = true) const;
  std::vector<double> gradient(std::span<const double> x) const;

 private:
  void check_x(std::span<const double> x) const;
  void check_theta(std::span<const double> theta) const;
  std::span<const double> layer_theta(std::size_t id,
                                      std::span<const double> theta) const;

  std::size_t variable_dim_;
  std::vector<LayerNode> layers_;
  std::vector<std::size_t> param_offsets_{0};
};

using ScalarFunction = std::function<double(std::span<const double>)>;

/// Central-difference gradient; test and verification use only.
std::vector<double> fd_gradient(const ScalarFunction& f, std::span<const double> x,
                                double h);

}  // namespace mlpf
