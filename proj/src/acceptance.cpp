#include "mlpf/acceptance.hpp"

#include <algorithm>
#include <stdexcept>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <unistd.h>

#include "mlpf/benchmarks.hpp"
#include "mlpf/cost.hpp"
#include "mlpf/experiment.hpp"
#include "mlpf/trace_io.hpp"

namespace mlpf {

namespace {

constexpr double kLjReference = -44.3268;

std::string fmt(double v, int prec = 6) {
  std::ostringstream o;
  o.precision(prec);
  o << v;
  return o.str();
}

RunConfig cell_config(const std::string& problem, const std::string& cell) {
  RunConfig c = defaults_for(problem);
  for (const auto& m : standard_method_matrix(problem))
    if (m.name == cell) {
      m.apply(c);
      return c;
    }
  throw std::invalid_argument("no cell " + cell);
}

const BenchmarkProblem& lj_problem() {
  static const BenchmarkProblem problem = problem_by_name("lj13", defaults_for("lj13").lj_seed);
  return problem;
}

double linf(const std::vector<double>& v) {
  double m = 0.0;
  for (double d : v) m = std::max(m, std::fabs(d));
  return m;
}

template <class F>
CriterionResult timed(std::string id, std::string title, F&& body) {
  CriterionResult r{std::move(id), std::move(title), false, {}, 0.0};
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail += (r.detail.empty() ? "" : "; ") + std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

// Largest ||analytic - fd|| / max(1, ||analytic||) over the sample.
double worst_gradient_error(const BenchmarkProblem& p, const std::vector<std::vector<double>>& points) {
  const auto f = [&](std::span<const double> x) { return p.graph.eval_forward(x); };
  double worst = 0.0;
  for (const auto& x : points) {
    const auto g = p.graph.gradient(x);
    const auto fd = fd_gradient(f, x, 1e-6);
    double diff = 0.0, norm = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      diff += (g[k] - fd[k]) * (g[k] - fd[k]);
      norm += g[k] * g[k];
    }
    worst = std::max(worst, std::sqrt(diff) / std::max(1.0, std::sqrt(norm)));
  }
  return worst;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

double icosahedral_spread(const std::vector<double>& coords) {
  if (coords.size() != 39) throw std::invalid_argument("icosahedral_spread needs 13 particles");
  ClusterGeometry g{coords};
  const auto c = g.centroid();
  std::size_t centre = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < 13; ++i) {
    const auto p = g.particle(i);
    const double d = std::hypot(p[0] - c[0], p[1] - c[1], p[2] - c[2]);
    if (d < best) best = d, centre = i;
  }
  std::vector<double> radii;
  for (std::size_t i = 0; i < 13; ++i)
    if (i != centre) radii.push_back(g.distance(i, centre));
  double mean = 0.0;
  for (double r : radii) mean += r / 12.0;
  double spread = 0.0;
  for (double r : radii) spread = std::max(spread, std::fabs(r - mean) / mean);
  return spread;
}

CriterionResult check_gradient_oracle() {
  return timed("gradient_oracle", "analytic gradients match central differences", [](CriterionResult& r) {
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    bool ok = true;

    const auto ctl = ctl_problem();
    std::vector<std::vector<double>> pts;
    while (pts.size() < 100) {
      std::vector<double> x = {-10 + 20 * u01(rng), -10 + 20 * u01(rng)};
      // stay off the sin(x_j) = 0 lines and the origin, where |.| has kinks
      if (std::fabs(std::sin(x[0])) < 1e-3 || std::fabs(std::sin(x[1])) < 1e-3) continue;
      if (std::hypot(x[0], x[1]) < 1e-3) continue;
      pts.push_back(std::move(x));
    }
    const double e_ctl = worst_gradient_error(ctl, pts);

    const auto dvg = dvg02_problem();
    pts.clear();
    while (pts.size() < 100) {
      // x2 > 0 keeps x2^t real; moderate x5 keeps cos(t e^x5) resolvable at h = 1e-6
      pts.push_back({1 + 59 * u01(rng), 1 + 59 * u01(rng), 1 + 59 * u01(rng), 1 + 59 * u01(rng),
                     2 * u01(rng)});
    }
    const double e_dvg = worst_gradient_error(dvg, pts);

    const auto base = icosahedron_coords(optimal_icosahedron_radius());
    const auto lj = lj13_problem(base);
    pts.clear();
    while (pts.size() < 100) {
      ClusterGeometry g = base;
      for (double& c : g.coords) c += 0.3 * (u01(rng) - 0.5);
      double closest = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < 13; ++i)
        for (std::size_t j = i + 1; j < 13; ++j) closest = std::min(closest, g.distance(i, j));
      if (closest < 0.8) continue;
      pts.push_back(g.coords);
    }
    const double e_lj = worst_gradient_error(lj, pts);

    ok = e_ctl < 1e-6 && e_dvg < 1e-6 && e_lj < 1e-6;
    r.passed = ok;
    r.detail = "worst relative error ctl " + fmt(e_ctl, 3) + ", dvg02 " + fmt(e_dvg, 3) + ", lj13 " +
               fmt(e_lj, 3) + " (limit 1e-6)";
  });
}

CriterionResult check_kernel_exactness() {
  return timed("kernel_exactness", "cost kernels: (2/3) rho^3, odd, logistic identity", [](CriterionResult& r) {
    const CostKernel square{KernelKind::square};
    const CostKernel sigmoid{KernelKind::sigmoid_convex};
    const double eps = std::numeric_limits<double>::epsilon();
    double worst_sq = 0.0;
    bool odd = square(0.0) == 0.0 && sigmoid(0.0) == 0.0;
    for (int i = -2000; i <= 2000; ++i) {
      const double rho = i / 200.0;
      const double want = 2.0 / 3.0 * rho * rho * rho;
      if (want != 0.0) worst_sq = std::max(worst_sq, std::fabs(square(rho) - want) / std::fabs(want));
      else if (square(rho) != 0.0) worst_sq = 1.0;
      odd = odd && square(-rho) == -square(rho) && sigmoid(-rho) == -sigmoid(rho);
    }
    // d/dr logistic against e^-r / (1 + e^-r)^2, five-point stencil
    double worst_a5 = 0.0;
    const double h = 1e-3;
    for (int i = -1000; i <= 1000; ++i) {
      const double rho = i / 100.0;
      const double fd = (-logistic(rho + 2 * h) + 8 * logistic(rho + h) - 8 * logistic(rho - h) +
                         logistic(rho - 2 * h)) /
                        (12 * h);
      const double closed = std::exp(-rho) / ((1 + std::exp(-rho)) * (1 + std::exp(-rho)));
      worst_a5 = std::max({worst_a5, std::fabs(fd - closed), std::fabs(logistic_derivative(rho) - closed),
                           std::fabs(sigmoid.derivative(rho) - 2 * closed)});
    }
    r.passed = worst_sq <= 4 * eps && odd && worst_a5 < 1e-10;
    r.detail = "square rel err " + fmt(worst_sq, 3) + " (limit 4 eps), odd " + (odd ? "yes" : "no") +
               ", logistic identity err " + fmt(worst_a5, 3) + " (limit 1e-10)";
  });
}

CriterionResult check_ctl_convergence() {
  return timed("ctl_convergence", "CTL: MLP_f reaches the origin, Taylor trapped somewhere", [](CriterionResult& r) {
    const auto problem = ctl_problem();
    bool mlpf_all = true, taylor_fails = false;
    std::string detail;
    for (const auto& init : problem.canonical_initials) {
      for (const std::string cell : {"mlpf-square", "taylor"}) {
        RunConfig c = cell_config("ctl", cell);
        c.initial = init.name;
        c.max_steps = 100000;
        c.full_resolution = true;
        const auto trace = run_experiment(c, problem);
        double best = std::numeric_limits<double>::infinity();
        for (const auto& row : trace.rows) best = std::min(best, linf(row.targets));
        best = std::min(best, linf(trace.final_targets));
        const bool reached = best < 1e-3;
        if (cell == "taylor")
          taylor_fails |= !reached;
        else
          mlpf_all &= reached;
        detail += init.name + "/" + cell + ": min |x|inf " + fmt(best, 3) + " (" + to_string(trace.status) + "); ";
      }
    }
    r.passed = mlpf_all && taylor_fails;
    r.detail = detail + "mlpf all reached " + (mlpf_all ? "yes" : "no") + ", taylor failed somewhere " +
               (taylor_fails ? "yes" : "no");
  });
}

CriterionResult check_dvg02_progress() {
  return timed("dvg02_progress", "DVG02: 1e3-fold reduction in 2e5 steps without stalling", [](CriterionResult& r) {
    const auto problem = dvg02_problem();
    RunConfig c = cell_config("dvg02", "mlpf-square+KDL");
    c.initial = "fifty";
    c.max_steps = 200000;
    c.full_resolution = true;
    const auto trace = run_experiment(c, problem);
    const double f0 = trace.rows.front().objective;
    const double fmin_final = trace.final_objective;
    const bool reduced = std::isfinite(fmin_final) && fmin_final <= f0 * 1e-3;
    // stall: some 1e4-step window whose cost rho_cost^2 changes by < 1e-12 relative
    bool stalled = false;
    std::size_t stall_at = 0;
    const auto& rows = trace.rows;
    for (std::size_t i = 0, j = 0; i < rows.size(); ++i) {
      while (j < rows.size() && rows[j].iteration < rows[i].iteration + 10000) ++j;
      if (j == rows.size()) break;
      if (rows[j].iteration != rows[i].iteration + 10000) continue;
      const double a = rows[i].rho_cost * rows[i].rho_cost;
      const double b = rows[j].rho_cost * rows[j].rho_cost;
      if (std::fabs(rows[i].rho_cost) > c.cost_tol && std::fabs(b - a) < 1e-12 * std::fabs(a)) {
        stalled = true;
        stall_at = rows[i].iteration;
        break;
      }
    }
    r.passed = reduced && !stalled && trace.status != RunStatus::diverged;
    r.detail = "f0 " + fmt(f0, 4) + " -> " + fmt(fmin_final, 4) + " after " + std::to_string(trace.steps) +
               " steps (" + to_string(trace.status) + "), ratio " + fmt(fmin_final / f0, 3) +
               (stalled ? ", stalled at " + std::to_string(stall_at) : ", no stall");
  });
}

CriterionResult check_lj13_trap() {
  return timed("lj13_trap", "LJ-13: Taylor stays in the local minimum", [](CriterionResult& r) {
    const auto& problem = lj_problem();
    RunConfig c = cell_config("lj13", "taylor");
    c.max_steps = 10000;
    const auto trace = run_experiment(c, problem);
    const double e0 = trace.rows.front().objective;
    const double e1 = trace.final_objective;
    r.passed = trace.status != RunStatus::diverged && std::fabs(e1 - e0) < 1e-6;
    r.detail = "E " + fmt(e0, 12) + " -> " + fmt(e1, 12) + " over " + std::to_string(trace.steps) +
               " steps, |dE| " + fmt(std::fabs(e1 - e0), 3) + " (limit 1e-6)";
  });
}

CriterionResult check_lj13_recovery() {
  return timed("lj13_recovery", "LJ-13: MLP_f recovers the icosahedron", [](CriterionResult& r) {
    const auto& problem = lj_problem();
    RunConfig sq = cell_config("lj13", "mlpf-square+KDL");
    sq.max_steps = 1000000;
    const auto t_sq = run_experiment(sq, problem);
    const bool sq_ok = t_sq.final_objective <= kLjReference * 0.98;

    RunConfig sg = cell_config("lj13", "mlpf-sigmoid+KDL");
    sg.max_steps = 10000;
    const auto t_sg = run_experiment(sg, problem);
    const double spread = icosahedral_spread(t_sg.final_targets);
    const bool sg_ok = spread <= 0.05;

    RunConfig nk = cell_config("lj13", "mlpf-square");
    nk.max_steps = 1000000;
    const auto t_nk = run_experiment(nk, problem);
    const bool nk_ok = t_nk.final_objective >= kLjReference * 0.95;

    r.passed = sq_ok && sg_ok && nk_ok;
    r.detail = "init E " + fmt(t_sq.rows.front().objective, 8) + "; square+KDL final " +
               fmt(t_sq.final_objective, 8) + " (need <= " + fmt(kLjReference * 0.98, 8) + ", " +
               (sq_ok ? "ok" : "FAIL") + "); sigmoid+KDL outer-radius spread at " +
               std::to_string(t_sg.steps) + " steps " + fmt(spread, 3) + " (need <= 0.05, " +
               (sg_ok ? "ok" : "FAIL") + "); square no-KDL final " + fmt(t_nk.final_objective, 8) +
               " (need >= " + fmt(kLjReference * 0.95, 8) + ", " + (nk_ok ? "ok" : "FAIL") + ")";
  });
}

CriterionResult check_determinism() {
  return timed("determinism", "repeated runs write byte-identical CSV", [](CriterionResult& r) {
    const auto dir = std::filesystem::temp_directory_path() /
                     ("mlpf_determinism_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    bool same = true;
    std::string detail;
    for (const std::string problem : {"ctl", "dvg02"}) {
      RunConfig c = defaults_for(problem);
      c.max_steps = 5000;
      c.full_resolution = true;
      std::string text[2];
      c.output = (dir / (problem + ".csv")).string();
      for (int k = 0; k < 2; ++k) {
        run_experiment(c);
        text[k] = slurp(c.output);
      }
      const bool eq = !text[0].empty() && text[0] == text[1];
      same &= eq;
      detail += problem + " " + std::to_string(text[0].size()) + " bytes " + (eq ? "identical" : "DIFFER") + "; ";
    }
    std::filesystem::remove_all(dir);
    r.passed = same;
    r.detail = detail;
  });
}

std::vector<Criterion> acceptance_criteria() {
  return {
      {"gradient_oracle", "gradient oracle suite", check_gradient_oracle},
      {"kernel_exactness", "kernel exactness", check_kernel_exactness},
      {"ctl_convergence", "CTL convergence", check_ctl_convergence},
      {"dvg02_progress", "DVG02 progress", check_dvg02_progress},
      {"lj13_trap", "LJ-13 trap", check_lj13_trap},
      {"lj13_recovery", "LJ-13 MLP_f recovery", check_lj13_recovery},
      {"determinism", "determinism", check_determinism},
  };
}

bool run_acceptance(std::ostream& out, const std::vector<std::string>& only) {
  const auto criteria = acceptance_criteria();
  for (const auto& id : only)
    if (std::none_of(criteria.begin(), criteria.end(), [&](const Criterion& c) { return c.id == id; }))
      throw std::invalid_argument("unknown criterion '" + id + "'");
  bool all = true;
  std::size_t ran = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto r = c.run();
    ++ran;
    all &= r.passed;
    out << (r.passed ? "PASS " : "FAIL ") << r.id << " (" << fmt(r.seconds, 3) << " s): " << r.detail
        << std::endl;
  }
  return all && ran > 0;
}

}  // namespace mlpf
