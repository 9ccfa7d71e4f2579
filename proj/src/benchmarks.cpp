#include "mlpf/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace mlpf {

namespace {

using K = LayerKind;

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

bool BenchmarkProblem::in_domain(const std::vector<double>& x) const {
  if (x.size() != dim()) return false;
  if (domain_box.empty()) return true;
  for (std::size_t k = 0; k < x.size(); ++k)
    if (x[k] < domain_box[k].first || x[k] > domain_box[k].second) return false;
  return true;
}

double BenchmarkProblem::domain_radius() const {
  double r = 0.0;
  for (const auto& [lo, hi] : domain_box) r = std::max(r, 0.5 * (hi - lo));
  return domain_box.empty() ? 1.0 : r;
}

const NamedPoint& BenchmarkProblem::initial(const std::string& key) const {
  for (const auto& p : canonical_initials)
    if (p.name == key) return p;
  throw std::invalid_argument("problem " + name + " has no initial point named '" + key + "'");
}

// ---------------------------------------------------------------------------
// Cross-Leg Table
//
//   f(x) = -1 / (|exp(|100 - sqrt(x1^2 + x2^2)/pi|) sin x1 sin x2| + 1)^0.1
//
// Layer split: h1 = x1^2 + x2^2, h2 = sqrt h1, h3 = 100 - h2/pi,
// h4 = exp|h3|, s1 = sin x1, s2 = sin x2, h5 = h4 s1 s2, h6 = |h5| + 1,
// h7 = h6^0.1, f = -1/h7.

BenchmarkProblem ctl_problem() {
  LayerGraph g(2);
  const auto h1 = g.add(K::sum_squares, {Ref::var(0), Ref::var(1)}, {}, "h1=x1^2+x2^2");
  const auto h2 = g.add(K::sqrt, {Ref::layer(h1)}, {1.0, 0.0}, "h2=sqrt(h1)");
  const auto h3 = g.add(K::affine, {Ref::layer(h2)}, {-1.0 / std::numbers::pi, 100.0},
                        "h3=100-h2/pi");
  const auto h4 = g.add(K::exp_abs, {Ref::layer(h3)}, {1.0, 0.0}, "h4=exp|h3|");
  const auto s1 = g.add(K::sin, {Ref::var(0)}, {1.0, 0.0}, "sin x1");
  const auto s2 = g.add(K::sin, {Ref::var(1)}, {1.0, 0.0}, "sin x2");
  const auto h5 = g.add(K::product, {Ref::layer(h4), Ref::layer(s1), Ref::layer(s2)}, {},
                        "h5=h4 sin x1 sin x2");
  const auto h6 = g.add(K::abs, {Ref::layer(h5)}, {1.0, 1.0}, "h6=|h5|+1");
  const auto h7 = g.add(K::power, {Ref::layer(h6)}, {1.0, 0.1}, "h7=h6^0.1");
  g.add(K::reciprocal, {Ref::layer(h7)}, {-1.0, 0.0}, "f=-1/h7");

  BenchmarkProblem p{.name = "ctl", .graph = std::move(g)};
  p.domain_box.assign(2, {-10.0, 10.0});
  p.global_minimum_location = std::vector<double>{0.0, 0.0};
  p.global_minimum_value = -1.0;
  p.canonical_initials = {{"m7m5", {-7.0, -5.0}}, {"p7p5", {7.0, 5.0}}, {"p7m5", {7.0, -5.0}}};
  p.target = -1.0;
  return p;
}

// ---------------------------------------------------------------------------
// DeVilliers-Glasser 02
//
//   f(x) = sum_{i=1..24} [x1 x2^t_i tanh(x3 t_i + sin(x4 t_i)) cos(t_i e^x5) - y_i]^2
//
// Per term: a = t x4, s = sin a, b = t x3 + s, th = tanh b, p = x2^t,
// c = cos(t E) with the shared E = e^x5, m = x1 p th c, r = m - y, q = r^2.

double dvg02_time(int i) { return 0.1 * i; }

double dvg02_data(int i) {
  const double t = dvg02_time(i);
  const auto& o = kDvg02Optimum;
  return o[0] * std::pow(o[1], t) * std::tanh(o[2] * t + std::sin(o[3] * t)) *
         std::cos(t * std::exp(o[4]));
}

BenchmarkProblem dvg02_problem() {
  LayerGraph g(5);
  const auto e5 = g.add(K::exp, {Ref::var(4)}, {1.0, 0.0}, "exp x5");
  std::vector<Ref> squares;
  for (int i = 1; i <= 24; ++i) {
    const double t = dvg02_time(i);
    const std::string tag = "[" + std::to_string(i) + "]";
    const auto a = g.add(K::affine, {Ref::var(3)}, {t, 0.0}, "t x4" + tag);
    const auto s = g.add(K::sin, {Ref::layer(a)}, {1.0, 0.0}, "sin(t x4)" + tag);
    const auto b = g.add(K::affine, {Ref::var(2), Ref::layer(s)}, {t, 1.0, 0.0}, "t x3 + s" + tag);
    const auto th = g.add(K::tanh, {Ref::layer(b)}, {1.0, 0.0}, "tanh" + tag);
    const auto pw = g.add(K::power, {Ref::var(1)}, {1.0, t}, "x2^t" + tag);
    const auto ca = g.add(K::affine, {Ref::layer(e5)}, {t, 0.0}, "t e^x5" + tag);
    const auto c = g.add(K::cos, {Ref::layer(ca)}, {1.0, 0.0}, "cos" + tag);
    const auto m = g.add(K::product, {Ref::var(0), Ref::layer(pw), Ref::layer(th), Ref::layer(c)},
                         {}, "model" + tag);
    const auto r = g.add(K::affine, {Ref::layer(m)}, {1.0, -dvg02_data(i)}, "residual" + tag);
    squares.push_back(Ref::layer(g.add(K::power, {Ref::layer(r)}, {1.0, 2.0}, "residual^2" + tag)));
  }
  g.add(K::sum, std::move(squares), {}, "f");

  BenchmarkProblem p{.name = "dvg02", .graph = std::move(g)};
  p.domain_box.assign(5, {-500.0, 500.0});
  p.global_minimum_location = std::vector<double>(kDvg02Optimum.begin(), kDvg02Optimum.end());
  p.global_minimum_value = 0.0;
  p.canonical_initials = {{"fifty", {50.0, 50.0, 50.0, 50.0, 1.0}},
                          {"ten", {10.0, 10.0, 10.0, 10.0, 10.0}},
                          {"fifth", {0.2, 0.2, 0.2, 0.2, 0.2}}};
  p.target = 0.0;
  return p;
}

// ---------------------------------------------------------------------------
// Lennard-Jones cluster

std::array<double, 3> ClusterGeometry::particle(std::size_t i) const {
  return {coords.at(3 * i), coords.at(3 * i + 1), coords.at(3 * i + 2)};
}

double ClusterGeometry::distance(std::size_t i, std::size_t j) const {
  const double dx = coords[3 * i] - coords[3 * j];
  const double dy = coords[3 * i + 1] - coords[3 * j + 1];
  const double dz = coords[3 * i + 2] - coords[3 * j + 2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

std::array<double, 3> ClusterGeometry::centroid() const {
  std::array<double, 3> c{0.0, 0.0, 0.0};
  const std::size_t n = particles();
  for (std::size_t i = 0; i < n; ++i)
    for (int d = 0; d < 3; ++d) c[d] += coords[3 * i + d];
  for (double& v : c) v /= static_cast<double>(n);
  return c;
}

void ClusterGeometry::center() {
  const auto c = centroid();
  for (std::size_t i = 0; i < particles(); ++i)
    for (int d = 0; d < 3; ++d) coords[3 * i + d] -= c[d];
}

double lj_energy(const ClusterGeometry& geom) {
  if (geom.coords.size() % 3 != 0) throw std::invalid_argument("coordinates not a multiple of 3");
  const std::size_t n = geom.particles();
  double e = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double r = geom.distance(i, j);
      if (r < geom.pair_distance_floor) {
        std::ostringstream os;
        os << "pair (" << i << ", " << j << ") at distance " << r << " below floor "
           << geom.pair_distance_floor;
        throw std::domain_error(os.str());
      }
      const double ir2 = 1.0 / (r * r);
      const double ir6 = ir2 * ir2 * ir2;
      e += 4.0 * (ir6 * ir6 - ir6);
    }
  }
  return e;
}

std::vector<double> lj_gradient(const ClusterGeometry& geom) {
  const std::size_t n = geom.particles();
  std::vector<double> g(geom.coords.size(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double d[3];
      double r2 = 0.0;
      for (int k = 0; k < 3; ++k) {
        d[k] = geom.coords[3 * i + k] - geom.coords[3 * j + k];
        r2 += d[k] * d[k];
      }
      const double ir2 = 1.0 / r2;
      const double ir6 = ir2 * ir2 * ir2;
      // (dE/dr) / r
      const double c = (-48.0 * ir6 * ir6 + 24.0 * ir6) * ir2;
      for (int k = 0; k < 3; ++k) {
        g[3 * i + k] += c * d[k];
        g[3 * j + k] -= c * d[k];
      }
    }
  }
  return g;
}

ClusterGeometry icosahedron_coords(double radius_scale) {
  if (!(radius_scale > 0.0)) throw std::invalid_argument("radius_scale must be positive");
  const double phi = std::numbers::phi;
  const double norm = std::sqrt(1.0 + phi * phi);
  const double a = radius_scale / norm;
  const double b = radius_scale * phi / norm;
  ClusterGeometry g;
  g.coords = {0.0, 0.0, 0.0};
  for (double s1 : {-1.0, 1.0}) {
    for (double s2 : {-1.0, 1.0}) {
      const double v[3][3] = {{0.0, s1 * a, s2 * b}, {s1 * a, s2 * b, 0.0}, {s2 * b, 0.0, s1 * a}};
      for (const auto& p : v) g.coords.insert(g.coords.end(), p, p + 3);
    }
  }
  return g;
}

double optimal_icosahedron_radius() {
  auto energy = [](double r) { return lj_energy(icosahedron_coords(r)); };
  // Coarse scan brackets the minimum, golden-section refines it.
  double best = 0.9;
  double best_e = energy(best);
  for (double r = 0.9; r <= 1.4; r += 0.01) {
    const double e = energy(r);
    if (e < best_e) {
      best_e = e;
      best = r;
    }
  }
  double lo = best - 0.01, hi = best + 0.01;
  const double inv_phi = 1.0 / std::numbers::phi;
  double c = hi - (hi - lo) * inv_phi, d = lo + (hi - lo) * inv_phi;
  double fc = energy(c), fd = energy(d);
  while (hi - lo > 1e-12) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - (hi - lo) * inv_phi;
      fc = energy(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + (hi - lo) * inv_phi;
      fd = energy(d);
    }
  }
  return 0.5 * (lo + hi);
}

RelaxResult relax_lj(ClusterGeometry geom, double gradient_tol, std::size_t max_steps,
                     double step) {
  RelaxResult out;
  for (std::size_t k = 0;; ++k) {
    const auto g = lj_gradient(geom);
    double gn = 0.0;
    for (double v : g) gn += v * v;
    gn = std::sqrt(gn);
    if (!std::isfinite(gn)) break;
    out.gradient_norm = gn;
    out.steps = k;
    if (gn < gradient_tol) {
      out.converged = true;
      break;
    }
    if (k == max_steps) break;
    for (std::size_t i = 0; i < g.size(); ++i) geom.coords[i] -= step * g[i];
  }
  out.energy = lj_energy(geom);
  out.geometry = std::move(geom);
  return out;
}

namespace {

constexpr std::size_t kLjParticles = 13;
constexpr double kLocalMinGradientTol = 1e-8;
constexpr std::size_t kLocalMinBudget = 3'000'000;

// Every particle keeps at least three neighbours within 1.5 sigma.
bool is_bound(const ClusterGeometry& g) {
  for (std::size_t i = 0; i < g.particles(); ++i) {
    int neighbours = 0;
    for (std::size_t j = 0; j < g.particles(); ++j)
      if (j != i && g.distance(i, j) < 1.5) ++neighbours;
    if (neighbours < 3) return false;
  }
  return true;
}

}  // namespace

ClusterGeometry lj_local_minimum_init(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ClusterGeometry g;
  // Rejection-sample a compact cluster inside a sphere of radius 1.3 with
  // no pair closer than 0.95.
  std::size_t attempts = 0;
  while (g.particles() < kLjParticles) {
    if (++attempts > 100000) throw SeedRejected("seed " + std::to_string(seed) + ": packing failed");
    const double p[3] = {2.6 * uniform01(rng) - 1.3, 2.6 * uniform01(rng) - 1.3,
                         2.6 * uniform01(rng) - 1.3};
    if (p[0] * p[0] + p[1] * p[1] + p[2] * p[2] > 1.3 * 1.3) continue;
    bool ok = true;
    for (std::size_t j = 0; j < g.particles() && ok; ++j) {
      const auto q = g.particle(j);
      const double d2 = (p[0] - q[0]) * (p[0] - q[0]) + (p[1] - q[1]) * (p[1] - q[1]) +
                        (p[2] - q[2]) * (p[2] - q[2]);
      ok = d2 >= 0.95 * 0.95;
    }
    if (ok) g.coords.insert(g.coords.end(), p, p + 3);
  }
  auto relaxed = relax_lj(std::move(g), kLocalMinGradientTol, kLocalMinBudget);
  if (!relaxed.converged)
    throw SeedRejected("seed " + std::to_string(seed) + ": relaxation did not converge");
  if (!is_bound(relaxed.geometry))
    throw SeedRejected("seed " + std::to_string(seed) + ": cluster dissociated");
  if (relaxed.energy <= kLj13GlobalMinimum + 0.5)
    throw SeedRejected("seed " + std::to_string(seed) + ": relaxed into the icosahedral basin");
  relaxed.geometry.center();
  return relaxed.geometry;
}

std::pair<std::uint64_t, ClusterGeometry> find_lj_local_minimum(std::uint64_t first_seed,
                                                                std::size_t max_tries) {
  for (std::size_t k = 0; k < max_tries; ++k) {
    try {
      return {first_seed + k, lj_local_minimum_init(first_seed + k)};
    } catch (const SeedRejected&) {
    }
  }
  throw std::runtime_error("no LJ local minimum found in " + std::to_string(max_tries) +
                           " seeds starting at " + std::to_string(first_seed));
}

BenchmarkProblem lj13_problem(const ClusterGeometry& init) {
  const std::size_t n = init.particles();
  if (n < 2 || init.coords.size() != 3 * n)
    throw std::invalid_argument("cluster needs at least two particles");
  LayerGraph g(3 * n);
  std::vector<Ref> pair_terms;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::string tag = "(" + std::to_string(i) + "," + std::to_string(j) + ")";
      std::vector<Ref> in;
      for (std::size_t k = 0; k < 3; ++k) in.push_back(Ref::var(3 * i + k));
      for (std::size_t k = 0; k < 3; ++k) in.push_back(Ref::var(3 * j + k));
      const auto r = g.add(K::distance, std::move(in), {}, "r" + tag);
      pair_terms.push_back(Ref::layer(g.add(K::lj_pair, {Ref::layer(r)}, {1.0, 1.0}, "E" + tag)));
    }
  }
  g.add(K::sum, std::move(pair_terms), {}, "E");

  BenchmarkProblem p{.name = "lj13", .graph = std::move(g)};
  p.global_minimum_value = kLj13GlobalMinimum;
  if (n == kLjParticles) p.global_minimum_location = icosahedron_coords(optimal_icosahedron_radius()).coords;
  p.canonical_initials = {{"local_min", init.coords}};
  p.target = kLj13GlobalMinimum;
  return p;
}

BenchmarkProblem problem_by_name(const std::string& name, std::uint64_t lj_seed) {
  if (name == "ctl") return ctl_problem();
  if (name == "dvg02") return dvg02_problem();
  if (name == "lj13") return lj13_problem(find_lj_local_minimum(lj_seed).second);
  throw std::invalid_argument("unknown problem '" + name + "' (expected ctl, dvg02 or lj13)");
}

std::vector<std::string> problem_names() { return {"ctl", "dvg02", "lj13"}; }

}  // namespace mlpf
