#pragma once

// Benchmark objectives expressed as layer graphs: Cross-Leg Table (2-D),
// DeVilliers-Glasser 02 (5-D least squares) and the 13-particle
// Lennard-Jones cluster (39-D, reduced units eps = sigma = 1).

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mlpf/funcgraph.hpp"

namespace mlpf {

/// Icosahedral LJ-13 global minimum energy in reduced units.
inline constexpr double kLj13GlobalMinimum = -44.326801;

struct NamedPoint {
  std::string name;
  std::vector<double> x;
};

struct BenchmarkProblem {
  std::string name;
  LayerGraph graph;
  /// Per-dimension [lower, upper]; empty when the problem is unbounded.
  std::vector<std::pair<double, double>> domain_box;
  /// Known minimizer; nullopt when the minimum is a degenerate set.
  std::optional<std::vector<double>> global_minimum_location;
  double global_minimum_value = 0.0;
  std::vector<NamedPoint> canonical_initials;
  /// rho_0 used to build the cost residual.
  double target = 0.0;

  std::size_t dim() const noexcept { return graph.variable_dim(); }
  bool in_domain(const std::vector<double>& x) const;
  /// Half-width of the largest box side; 1 for unbounded problems.
  double domain_radius() const;
  const NamedPoint& initial(const std::string& name) const;
};

BenchmarkProblem ctl_problem();
BenchmarkProblem dvg02_problem();

/// Generating parameters of the DVG02 data and its abscissae t_i = 0.1 i.
inline constexpr std::array<double, 5> kDvg02Optimum{53.81, 1.27, 3.01, 2.13, 0.507};
double dvg02_time(int i);
double dvg02_data(int i);

// ---------------------------------------------------------------------------
// Lennard-Jones cluster

struct ClusterGeometry {
  std::vector<double> coords;  // 3 * n_particles, xyz interleaved
  double pair_distance_floor = 0.3;

  std::size_t particles() const noexcept { return coords.size() / 3; }
  std::array<double, 3> particle(std::size_t i) const;
  double distance(std::size_t i, std::size_t j) const;
  std::array<double, 3> centroid() const;
  void center();
};

/// Sum of 4[(1/r)^12 - (1/r)^6] over pairs. Throws if a pair is closer than
/// the geometry's floor.
double lj_energy(const ClusterGeometry& geom);
/// Analytic dE/dcoords, same layout as coords.
std::vector<double> lj_gradient(const ClusterGeometry& geom);

ClusterGeometry icosahedron_coords(double radius_scale);

/// Rigid-shell radius minimising lj_energy(icosahedron_coords(r)).
double optimal_icosahedron_radius();

struct RelaxResult {
  ClusterGeometry geometry;
  double energy = 0.0;
  double gradient_norm = 0.0;
  std::size_t steps = 0;
  bool converged = false;
};

/// Plain fixed-step gradient descent on lj_energy.
RelaxResult relax_lj(ClusterGeometry geom, double gradient_tol, std::size_t max_steps,
                     double step = 2e-3);

/// Thrown when a seed does not yield an acceptable local minimum.
class SeedRejected : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reproducible non-icosahedral local minimum: a seeded random compact
/// cluster relaxed by relax_lj to gradient norm < 1e-8, centred at the
/// origin. Throws SeedRejected when relaxation does not converge, the
/// cluster falls apart, or it lands within 0.5 of the icosahedral minimum.
ClusterGeometry lj_local_minimum_init(std::uint64_t seed);

/// First accepted seed at or after `first_seed`.
std::pair<std::uint64_t, ClusterGeometry> find_lj_local_minimum(std::uint64_t first_seed,
                                                                std::size_t max_tries = 64);

BenchmarkProblem lj13_problem(const ClusterGeometry& init);

/// Resolves ctl, dvg02 and lj13 (lj13 built from lj_local_minimum_init(lj_seed)).
BenchmarkProblem problem_by_name(const std::string& name, std::uint64_t lj_seed = 0);
std::vector<std::string> problem_names();

}  // namespace mlpf
