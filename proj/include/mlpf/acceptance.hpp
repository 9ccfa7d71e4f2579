#pragma once

// Acceptance suite shared by `mlpf check` and the acceptance test binary.

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace mlpf {

struct CriterionResult {
  std::string id;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct Criterion {
  std::string id;
  std::string title;
  std::function<CriterionResult()> run;
};

std::vector<Criterion> acceptance_criteria();

CriterionResult check_gradient_oracle();
CriterionResult check_kernel_exactness();
CriterionResult check_ctl_convergence();
CriterionResult check_dvg02_progress();
CriterionResult check_lj13_trap();
CriterionResult check_lj13_recovery();
CriterionResult check_determinism();

/// Spread of the 12 outer radii about the particle nearest the centroid:
/// max |r_i - mean| / mean. 13-particle geometries only.
double icosahedral_spread(const std::vector<double>& coords);

/// Runs the criteria whose id is in `only` (all when empty), printing one
/// PASS/FAIL line per criterion. Returns true when every run criterion passed.
/// Throws std::invalid_argument for an unknown id.
bool run_acceptance(std::ostream& out, const std::vector<std::string>& only = {});

}  // namespace mlpf
