#include "mlpf/cost.hpp"

#include <cmath>
#include <sstream>

namespace mlpf {

const char* to_string(KernelKind kind) noexcept {
  switch (kind) {
    case KernelKind::square: return "square";
    case KernelKind::sigmoid_convex: return "sigmoid";
  }
  return "?";
}

KernelKind kernel_from_string(const std::string& name) {
  if (name == "square") return KernelKind::square;
  if (name == "sigmoid" || name == "sigmoid_convex") return KernelKind::sigmoid_convex;
  throw std::invalid_argument("unknown kernel '" + name + "' (expected square or sigmoid)");
}

double CostKernel::operator()(double rho) const noexcept {
  switch (kind) {
    case KernelKind::square: return (2.0 / 3.0) * rho * rho * rho;
    // 2/(1+e^-rho) - 1 == tanh(rho/2); the tanh form is exactly odd.
    case KernelKind::sigmoid_convex: return std::tanh(0.5 * rho);
  }
  return std::nan("");
}

double CostKernel::derivative(double rho) const noexcept {
  switch (kind) {
    case KernelKind::square: return 2.0 * rho * rho;
    case KernelKind::sigmoid_convex: return 2.0 * logistic_derivative(rho);
  }
  return std::nan("");
}

KdlDomainError::KdlDomainError(const std::string& which, double value)
    : std::domain_error([&] {
        std::ostringstream os;
        os.precision(17);
        os << "KDL log argument " << which << " = " << value << " is not positive";
        return os.str();
      }()),
      value_(value) {}

double apply_kdl(double rho_n, double rho_0, double off) {
  const double a = rho_n + off;
  const double b = rho_0 + off;
  if (!(a > 0.0)) throw KdlDomainError("rho_N + off", a);
  if (!(b > 0.0)) throw KdlDomainError("rho_0 + off", b);
  if (rho_n == rho_0) return 0.0;
  return std::log(a) - std::log(b);
}

double cost_residual(double rho_n, const CostConfig& cost) {
  if (cost.use_kdl) return apply_kdl(rho_n, cost.target, cost.kdl_offset);
  return rho_n - cost.target;
}

double cost_residual_slope(double rho_n, const CostConfig& cost) {
  if (!cost.use_kdl) return 1.0;
  const double a = rho_n + cost.kdl_offset;
  if (!(a > 0.0)) throw KdlDomainError("rho_N + off", a);
  return 1.0 / a;
}

double cost_update(const CostKernel& kernel, double rho_n, const CostConfig& cost) {
  return kernel(cost_residual(rho_n, cost));
}

double logistic(double r) noexcept { return 1.0 / (1.0 + std::exp(-r)); }

double logistic_derivative(double r) noexcept {
  const double e = std::exp(-std::fabs(r));
  const double d = 1.0 + e;
  return e / (d * d);
}

}  // namespace mlpf
