#pragma once

// Cost kernels: the scalar factor dF_cost = u(rho_cost) that the functional
// derivative of a convex cost functional contributes to every update.
//
//   square          X_cost = rho^2          ->  u(rho) = (2/3) rho^3
//   sigmoid_convex  convex whose functional derivative is the logistic,
//                   centred so that u(0) = 0  ->  u(rho) = 2/(1 + e^-rho) - 1
//
// The residual rho_cost is rho_N - rho_0, or in KDL form
// log(rho_N + off) - log(rho_0 + off).

#include <stdexcept>
#include <string>

namespace mlpf {

enum class KernelKind { square, sigmoid_convex };

const char* to_string(KernelKind kind) noexcept;
KernelKind kernel_from_string(const std::string& name);

struct CostKernel {
  KernelKind kind = KernelKind::square;

  /// u(rho). Odd, strictly increasing, u(0) = 0.
  double operator()(double rho) const noexcept;
  /// du/drho.
  double derivative(double rho) const noexcept;
};

struct CostConfig {
  CostKernel kernel;
  bool use_kdl = false;
  double kdl_offset = 1.0;
  double target = 0.0;  // rho_0
};

/// A KDL log argument was not strictly positive.
class KdlDomainError : public std::domain_error {
 public:
  KdlDomainError(const std::string& which, double value);
  double value() const noexcept { return value_; }

 private:
  double value_;
};

/// log(rho_n + off) - log(rho_0 + off).
double apply_kdl(double rho_n, double rho_0, double off);

/// rho_cost for the objective value rho_n under `cost`.
double cost_residual(double rho_n, const CostConfig& cost);
/// d rho_cost / d rho_n (1 without KDL).
double cost_residual_slope(double rho_n, const CostConfig& cost);

/// dF_cost = u(rho_cost); its sign is the sign of rho_cost.
double cost_update(const CostKernel& kernel, double rho_n, const CostConfig& cost);
inline double cost_update(double rho_n, const CostConfig& cost) {
  return cost_update(cost.kernel, rho_n, cost);
}

/// Logistic function and its closed-form derivative e^-r / (1 + e^-r)^2.
double logistic(double r) noexcept;
double logistic_derivative(double r) noexcept;

}  // namespace mlpf
