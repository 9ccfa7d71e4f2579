#include "mlpf/funcgraph.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mlpf {

namespace {

// sign(0) = 0: subgradient convention at |.| kinks.
double sign0(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

bool is_unary(LayerKind k) {
  switch (k) {
    case LayerKind::sin:
    case LayerKind::cos:
    case LayerKind::tanh:
    case LayerKind::exp:
    case LayerKind::exp_abs:
    case LayerKind::sqrt:
    case LayerKind::abs:
    case LayerKind::log:
    case LayerKind::reciprocal:
      return true;
    default:
      return false;
  }
}

// op(u) and op'(u) for the unary kinds, before the outer a*op + b.
double unary_value(LayerKind k, double u) {
  switch (k) {
    case LayerKind::sin: return std::sin(u);
    case LayerKind::cos: return std::cos(u);
    case LayerKind::tanh: return std::tanh(u);
    case LayerKind::exp: return std::exp(u);
    case LayerKind::exp_abs: return std::exp(std::fabs(u));
    case LayerKind::sqrt: return std::sqrt(u);
    case LayerKind::abs: return std::fabs(u);
    case LayerKind::log: return std::log(u);
    case LayerKind::reciprocal: return 1.0 / u;
    default: return std::nan("");
  }
}

double unary_derivative(LayerKind k, double u) {
  switch (k) {
    case LayerKind::sin: return std::cos(u);
    case LayerKind::cos: return -std::sin(u);
    case LayerKind::tanh: {
      const double t = std::tanh(u);
      return 1.0 - t * t;
    }
    case LayerKind::exp: return std::exp(u);
    case LayerKind::exp_abs: return std::exp(std::fabs(u)) * sign0(u);
    // sqrt is only used on sums of squares; the norm's kink at 0 takes the
    // zero subgradient like |.| does.
    case LayerKind::sqrt: return u == 0.0 ? 0.0 : 0.5 / std::sqrt(u);
    case LayerKind::abs: return sign0(u);
    case LayerKind::log: return 1.0 / u;
    case LayerKind::reciprocal: return -1.0 / (u * u);
    default: return std::nan("");
  }
}

std::size_t expected_params(LayerKind k, std::size_t n_inputs) {
  if (is_unary(k)) return 2;
  switch (k) {
    case LayerKind::affine: return n_inputs + 1;
    case LayerKind::power: return 2;
    case LayerKind::lj_pair: return 2;
    default: return 0;
  }
}

std::vector<double> default_params(LayerKind k, std::size_t n_inputs) {
  if (is_unary(k)) return {1.0, 0.0};
  switch (k) {
    case LayerKind::affine: {
      std::vector<double> p(n_inputs + 1, 1.0);
      p.back() = 0.0;
      return p;
    }
    case LayerKind::power: return {1.0, 1.0};
    case LayerKind::lj_pair: return {1.0, 1.0};
    default: return {};
  }
}

double lj_ratio6(double r, double sigma) {
  const double s2 = (sigma / r) * (sigma / r);
  return s2 * s2 * s2;
}

}  // namespace

EvalError::EvalError(std::size_t layer_id, const std::string& what)
    : std::runtime_error("layer " + std::to_string(layer_id) + ": " + what),
      layer_id_(layer_id) {}

const char* to_string(LayerKind kind) noexcept {
  switch (kind) {
    case LayerKind::affine: return "affine";
    case LayerKind::power: return "power";
    case LayerKind::sin: return "sin";
    case LayerKind::cos: return "cos";
    case LayerKind::tanh: return "tanh";
    case LayerKind::exp: return "exp";
    case LayerKind::exp_abs: return "exp_abs";
    case LayerKind::sqrt: return "sqrt";
    case LayerKind::abs: return "abs";
    case LayerKind::log: return "log";
    case LayerKind::reciprocal: return "reciprocal";
    case LayerKind::sum: return "sum";
    case LayerKind::sum_squares: return "sum_squares";
    case LayerKind::product: return "product";
    case LayerKind::distance: return "distance";
    case LayerKind::lj_pair: return "lj_pair";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// LayerNode

double LayerNode::eval(std::span<const double> in, std::span<const double> theta) const {
  if (is_unary(kind)) return theta[0] * unary_value(kind, in[0]) + theta[1];
  switch (kind) {
    case LayerKind::affine: {
      double acc = theta[in.size()];
      for (std::size_t k = 0; k < in.size(); ++k) acc += theta[k] * in[k];
      return acc;
    }
    case LayerKind::power: return theta[0] * std::pow(in[0], theta[1]);
    case LayerKind::sum: {
      double acc = 0.0;
      for (double u : in) acc += u;
      return acc;
    }
    case LayerKind::sum_squares: {
      double acc = 0.0;
      for (double u : in) acc += u * u;
      return acc;
    }
    case LayerKind::product: {
      double acc = 1.0;
      for (double u : in) acc *= u;
      return acc;
    }
    case LayerKind::distance: {
      const double dx = in[0] - in[3], dy = in[1] - in[4], dz = in[2] - in[5];
      return std::sqrt(dx * dx + dy * dy + dz * dz);
    }
    case LayerKind::lj_pair: {
      const double s6 = lj_ratio6(in[0], theta[1]);
      return 4.0 * theta[0] * (s6 * s6 - s6);
    }
    default: return std::nan("");
  }
}

double LayerNode::partial_wrt_input(std::span<const double> in,
                                    std::span<const double> theta,
                                    std::size_t slot) const {
  if (slot >= in.size()) throw std::out_of_range("input slot out of range");
  if (is_unary(kind)) return theta[0] * unary_derivative(kind, in[0]);
  switch (kind) {
    case LayerKind::affine: return theta[slot];
    case LayerKind::power: {
      const double p = theta[1];
      if (p == 0.0) return 0.0;
      return theta[0] * p * std::pow(in[0], p - 1.0);
    }
    case LayerKind::sum: return 1.0;
    case LayerKind::sum_squares: return 2.0 * in[slot];
    case LayerKind::product: {
      double acc = 1.0;
      for (std::size_t m = 0; m < in.size(); ++m)
        if (m != slot) acc *= in[m];
      return acc;
    }
    case LayerKind::distance: {
      const double r = eval(in, theta);
      if (r == 0.0) return 0.0;
      return slot < 3 ? (in[slot] - in[slot + 3]) / r : (in[slot] - in[slot - 3]) / r;
    }
    case LayerKind::lj_pair: {
      const double r = in[0];
      const double s6 = lj_ratio6(r, theta[1]);
      return 4.0 * theta[0] * (-12.0 * s6 * s6 + 6.0 * s6) / r;
    }
    default: return std::nan("");
  }
}

double LayerNode::partial_wrt_param(std::span<const double> in,
                                    std::span<const double> theta,
                                    std::size_t slot) const {
  if (slot >= theta.size()) throw std::out_of_range("param slot out of range");
  if (is_unary(kind)) return slot == 0 ? unary_value(kind, in[0]) : 1.0;
  switch (kind) {
    case LayerKind::affine: return slot < in.size() ? in[slot] : 1.0;
    case LayerKind::power: {
      const double up = std::pow(in[0], theta[1]);
      if (slot == 0) return up;
      return up == 0.0 ? 0.0 : theta[0] * up * std::log(in[0]);
    }
    case LayerKind::lj_pair: {
      const double s6 = lj_ratio6(in[0], theta[1]);
      if (slot == 0) return 4.0 * (s6 * s6 - s6);
      return 4.0 * theta[0] * (12.0 * s6 * s6 - 6.0 * s6) / theta[1];
    }
    default: return std::nan("");
  }
}

bool LayerNode::has_factors() const noexcept {
  return kind == LayerKind::product || kind == LayerKind::lj_pair;
}

std::size_t LayerNode::factor_count() const noexcept {
  if (kind == LayerKind::product) return inputs.size();
  if (kind == LayerKind::lj_pair) return 2;
  return 0;
}

// lj_pair factors: attractive (-4 eps s^6) times (1 - s^6), s = sig/r.
std::vector<double> LayerNode::factor_values(std::span<const double> in,
                                             std::span<const double> theta) const {
  if (kind == LayerKind::product) return {in.begin(), in.end()};
  if (kind == LayerKind::lj_pair) {
    const double s6 = lj_ratio6(in[0], theta[1]);
    return {-4.0 * theta[0] * s6, 1.0 - s6};
  }
  return {};
}

double LayerNode::factor_partial_wrt_input(std::span<const double> in,
                                           std::span<const double> theta,
                                           std::size_t factor,
                                           std::size_t slot) const {
  if (kind == LayerKind::product) return factor == slot ? 1.0 : 0.0;
  if (kind == LayerKind::lj_pair) {
    const double r = in[0];
    const double s6 = lj_ratio6(r, theta[1]);
    return factor == 0 ? 24.0 * theta[0] * s6 / r : 6.0 * s6 / r;
  }
  throw std::logic_error("layer has no factors");
}

// ---------------------------------------------------------------------------
// LayerGraph

std::size_t LayerGraph::add(LayerKind kind, std::vector<Ref> inputs,
                            std::vector<double> params, std::string label) {
  const std::size_t id = layers_.size() + 1;
  for (const Ref& r : inputs) {
    if (r.is_variable() ? r.index >= variable_dim_ : (r.index == 0 || r.index >= id)) {
      std::ostringstream os;
      os << "layer " << id << " input " << (r.is_variable() ? "x" : "rho") << r.index
         << " violates topological order";
      throw std::invalid_argument(os.str());
    }
  }
  if (inputs.empty()) throw std::invalid_argument("layer needs at least one input");
  if ((is_unary(kind) || kind == LayerKind::power || kind == LayerKind::lj_pair) &&
      inputs.size() != 1)
    throw std::invalid_argument(std::string(to_string(kind)) + " layer takes one input");
  if (kind == LayerKind::distance && inputs.size() != 6)
    throw std::invalid_argument("distance layer takes six inputs");
  if (params.empty()) params = default_params(kind, inputs.size());
  if (params.size() != expected_params(kind, inputs.size()))
    throw std::invalid_argument(std::string(to_string(kind)) +
                                " layer has wrong parameter count");
  layers_.push_back(LayerNode{id, kind, std::move(inputs), std::move(params), std::move(label)});
  param_offsets_.push_back(param_offsets_.back() + layers_.back().params.size());
  return id;
}

const LayerNode& LayerGraph::node(std::size_t id) const {
  if (id == 0 || id > layers_.size())
    throw std::out_of_range("no layer with id " + std::to_string(id));
  return layers_[id - 1];
}

std::vector<double> LayerGraph::params() const {
  std::vector<double> theta;
  theta.reserve(param_count());
  for (const auto& l : layers_) theta.insert(theta.end(), l.params.begin(), l.params.end());
  return theta;
}

std::size_t LayerGraph::param_owner(std::size_t p) const {
  if (p >= param_count()) throw std::out_of_range("parameter index out of range");
  auto it = std::upper_bound(param_offsets_.begin(), param_offsets_.end(), p);
  return static_cast<std::size_t>(it - param_offsets_.begin());
}

void LayerGraph::check_x(std::span<const double> x) const {
  if (x.size() != variable_dim_)
    throw std::invalid_argument("expected " + std::to_string(variable_dim_) +
                                " variables, got " + std::to_string(x.size()));
}

void LayerGraph::check_theta(std::span<const double> theta) const {
  if (theta.size() != param_count())
    throw std::invalid_argument("expected " + std::to_string(param_count()) +
                                " parameters, got " + std::to_string(theta.size()));
}

std::span<const double> LayerGraph::layer_theta(std::size_t id,
                                                std::span<const double> theta) const {
  return theta.subspan(param_offsets_[id - 1], param_offsets_[id] - param_offsets_[id - 1]);
}

double LayerGraph::eval_forward(std::span<const double> x) const {
  return eval_with_activations(x).output();
}

double LayerGraph::eval_forward(std::span<const double> x,
                                std::span<const double> theta) const {
  return eval_with_activations(x, theta).output();
}

Activations LayerGraph::eval_with_activations(std::span<const double> x) const {
  const auto theta = params();
  return eval_with_activations(x, theta);
}

Activations LayerGraph::eval_with_activations(std::span<const double> x,
                                              std::span<const double> theta) const {
  check_x(x);
  check_theta(theta);
  if (layers_.empty()) throw std::logic_error("empty graph");
  Activations act;
  act.values.resize(layers_.size());
  std::vector<double> in;
  for (const auto& l : layers_) {
    in.clear();
    for (const Ref& r : l.inputs) in.push_back(r.is_variable() ? x[r.index] : act.values[r.index - 1]);
    const double v = l.eval(in, layer_theta(l.id, theta));
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << to_string(l.kind) << " produced non-finite value";
      if (!l.label.empty()) os << " (" << l.label << ")";
      throw EvalError(l.id, os.str());
    }
    act.values[l.id - 1] = v;
  }
  return act;
}

std::vector<double> LayerGraph::gather_inputs(std::size_t id, std::span<const double> x,
                                              const Activations& act) const {
  const auto& l = node(id);
  std::vector<double> in;
  in.reserve(l.inputs.size());
  for (const Ref& r : l.inputs) in.push_back(r.is_variable() ? x[r.index] : act.values[r.index - 1]);
  return in;
}

double LayerGraph::partial_wrt_param(std::size_t id, std::size_t param_slot,
                                     std::span<const double> x) const {
  const auto& l = node(id);
  if (param_slot >= l.params.size())
    throw std::out_of_range("layer " + std::to_string(id) + " has no parameter " +
                            std::to_string(param_slot));
  const auto act = eval_with_activations(x);
  const auto in = gather_inputs(id, x, act);
  const double d = l.partial_wrt_param(in, l.params, param_slot);
  if (!std::isfinite(d)) throw EvalError(id, "non-finite parameter partial");
  return d;
}

double LayerGraph::partial_wrt_input(std::size_t id, std::size_t input_slot,
                                     std::span<const double> x) const {
  const auto& l = node(id);
  if (input_slot >= l.inputs.size())
    throw std::out_of_range("layer " + std::to_string(id) + " has no input " +
                            std::to_string(input_slot));
  const auto act = eval_with_activations(x);
  const auto in = gather_inputs(id, x, act);
  const double d = l.partial_wrt_input(in, l.params, input_slot);
  if (!std::isfinite(d)) throw EvalError(id, "non-finite input partial");
  return d;
}

Sensitivities LayerGraph::sensitivities(std::span<const double> x,
                                        std::span<const double> theta,
                                        const Activations& act,
                                        bool with_params) const {
  check_x(x);
  check_theta(theta);
  if (act.size() != layers_.size()) throw std::invalid_argument("activations do not match graph");
  Sensitivities s;
  s.layer.assign(layers_.size(), 0.0);
  s.variables.assign(variable_dim_, 0.0);
  if (with_params) s.params.assign(param_count(), 0.0);
  s.layer.back() = 1.0;
  std::vector<double> in;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) {
    const auto& l = *it;
    const double adj = s.layer[l.id - 1];
    if (adj == 0.0) continue;
    in.clear();
    for (const Ref& r : l.inputs) in.push_back(r.is_variable() ? x[r.index] : act.values[r.index - 1]);
    const auto th = layer_theta(l.id, theta);
    for (std::size_t k = 0; k < l.inputs.size(); ++k) {
      const double d = l.partial_wrt_input(in, th, k);
      if (!std::isfinite(d)) throw EvalError(l.id, "non-finite input partial");
      const Ref& r = l.inputs[k];
      (r.is_variable() ? s.variables[r.index] : s.layer[r.index - 1]) += adj * d;
    }
    if (!with_params) continue;
    const std::size_t off = param_offsets_[l.id - 1];
    for (std::size_t p = 0; p < th.size(); ++p) {
      const double d = l.partial_wrt_param(in, th, p);
      if (std::isfinite(d)) s.params[off + p] += adj * d;
    }
  }
  return s;
}

std::vector<double> LayerGraph::gradient(std::span<const double> x) const {
  const auto theta = params();
  const auto act = eval_with_activations(x, theta);
  return sensitivities(x, theta, act, false).variables;
}

std::vector<double> fd_gradient(const ScalarFunction& f, std::span<const double> x,
                                double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  std::vector<double> xp(x.begin(), x.end());
  std::vector<double> g(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double x0 = xp[k];
    xp[k] = x0 + h;
    const double fp = f(xp);
    xp[k] = x0 - h;
    const double fm = f(xp);
    xp[k] = x0;
    if (!std::isfinite(fp) || !std::isfinite(fm))
      throw std::domain_error("non-finite evaluation at coordinate " + std::to_string(k));
    g[k] = (fp - fm) / (2.0 * h);
  }
  return g;
}

}  // namespace mlpf
