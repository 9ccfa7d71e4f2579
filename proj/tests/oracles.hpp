#pragma once

// Independent reference implementations used only by tests. Nothing here
// calls into the library's graph machinery.

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

inline double ctl(double x1, double x2) {
  const double r = std::sqrt(x1 * x1 + x2 * x2);
  const double inner = std::fabs(std::exp(std::fabs(100.0 - r / std::numbers::pi)) * std::sin(x1) * std::sin(x2));
  return -1.0 / std::pow(inner + 1.0, 0.1);
}

inline double dvg02_y(int i) {
  const double t = 0.1 * i;
  return 53.81 * std::pow(1.27, t) * std::tanh(3.01 * t + std::sin(2.13 * t)) * std::cos(t * std::exp(0.507));
}

inline double dvg02(const std::vector<double>& x) {
  double s = 0.0;
  for (int i = 1; i <= 24; ++i) {
    const double t = 0.1 * i;
    const double r = x[0] * std::pow(x[1], t) * std::tanh(x[2] * t + std::sin(x[3] * t)) *
                         std::cos(t * std::exp(x[4])) -
                     dvg02_y(i);
    s += r * r;
  }
  return s;
}

inline double lj(const std::vector<double>& c) {
  double e = 0.0;
  const std::size_t n = c.size() / 3;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = c[3 * i] - c[3 * j], dy = c[3 * i + 1] - c[3 * j + 1], dz = c[3 * i + 2] - c[3 * j + 2];
      const double inv6 = 1.0 / std::pow(dx * dx + dy * dy + dz * dz, 3);
      e += 4.0 * (inv6 * inv6 - inv6);
    }
  return e;
}

/// Central differences, written independently of the library helper.
inline std::vector<double> central(const std::function<double(const std::vector<double>&)>& f,
                                   std::vector<double> x, double h) {
  std::vector<double> g(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double keep = x[k];
    x[k] = keep + h;
    const double fp = f(x);
    x[k] = keep - h;
    const double fm = f(x);
    x[k] = keep;
    g[k] = (fp - fm) / (2 * h);
  }
  return g;
}

inline double rel(double a, double b) { return std::fabs(a - b) / std::max(1e-300, std::fabs(b)); }

}  // namespace oracle
