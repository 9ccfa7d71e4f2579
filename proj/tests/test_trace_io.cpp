#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "mlpf/benchmarks.hpp"
#include "mlpf/experiment.hpp"
#include "mlpf/trace_io.hpp"
#include "oracles.hpp"

using namespace mlpf;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("mlpf_trace_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir / name;
}

void expect_same(const OptimizationTrace& a, const OptimizationTrace& b) {
  ASSERT_EQ(a.rows.size(), b.rows.size());
  EXPECT_EQ(a.status, b.status);
  EXPECT_EQ(a.steps, b.steps);
  EXPECT_EQ(a.logged_dims, b.logged_dims);
  EXPECT_EQ(a.final_targets, b.final_targets);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].iteration, b.rows[i].iteration);
    EXPECT_EQ(a.rows[i].rho_n, b.rows[i].rho_n);
    EXPECT_EQ(a.rows[i].rho_cost, b.rows[i].rho_cost);
    EXPECT_EQ(a.rows[i].objective, b.rows[i].objective);
    EXPECT_EQ(a.rows[i].target_norm, b.rows[i].target_norm);
    EXPECT_EQ(a.rows[i].step_norm, b.rows[i].step_norm);
    EXPECT_EQ(a.rows[i].targets, b.rows[i].targets);
  }
}

RunConfig short_dvg() {
  RunConfig c = defaults_for("dvg02");
  c.max_steps = 300;
  return c;
}

}  // namespace

TEST(TraceIo, CsvRoundTripIsBitExact) {
  const auto c = short_dvg();
  const auto t = run_experiment(c);
  const auto path = scratch("dvg.csv");
  emit_trace(t, c, path.string(), TraceFormat::csv);
  const auto doc = read_trace(path.string());
  expect_same(t, doc.trace);
  EXPECT_EQ(emit_config(doc.config), emit_config(c));
  EXPECT_EQ(doc.code_version, kCodeVersion);
}

TEST(TraceIo, JsonRoundTripIsBitExact) {
  const auto c = short_dvg();
  const auto t = run_experiment(c);
  const auto path = scratch("dvg.json");
  emit_trace(t, c, path.string(), TraceFormat::json);
  const auto doc = read_trace(path.string());
  expect_same(t, doc.trace);
  EXPECT_EQ(emit_config(doc.config), emit_config(c));
}

TEST(TraceIo, NonFiniteValuesSurvive) {
  OptimizationTrace t;
  t.logged_dims = 1;
  t.status = RunStatus::diverged;
  t.rows.push_back({0, 1.0, 2.0, 1.0, 3.0, 0.5, {3.0}});
  t.rows.push_back({1, std::nan(""), std::nan(""), std::nan(""), HUGE_VAL, 0.0, {HUGE_VAL}});
  t.final_targets = {HUGE_VAL};
  for (auto fmt : {TraceFormat::csv, TraceFormat::json}) {
    const auto path = scratch(fmt == TraceFormat::csv ? "nan.csv" : "nan.json");
    emit_trace(t, defaults_for("ctl"), path.string(), fmt);
    const auto back = read_trace(path.string()).trace;
    ASSERT_EQ(back.rows.size(), 2u);
    EXPECT_TRUE(std::isnan(back.rows[1].rho_n));
    EXPECT_EQ(back.rows[1].target_norm, HUGE_VAL);
  }
}

TEST(TraceIo, CsvHeaderAndConstantColumnCount) {
  RunConfig c = defaults_for("ctl");
  c.max_steps = 50;
  const auto csv = trace_to_csv(run_experiment(c), c);
  std::istringstream in(csv);
  std::string line;
  std::size_t cols = 0, rows = 0;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const std::size_t n = std::count(line.begin(), line.end(), ',') + 1;
    if (!header) {
      EXPECT_EQ(line, "iteration,rho_n,rho_cost,objective,target_norm,step_norm,x1,x2");
      header = true;
      cols = n;
      continue;
    }
    EXPECT_EQ(n, cols);
    ++rows;
  }
  EXPECT_EQ(rows, 51u);
}

TEST(TraceIo, SeventeenSignificantDigits) {
  RunConfig c = defaults_for("ctl");
  c.max_steps = 3;
  const auto csv = trace_to_csv(run_experiment(c), c);
  // -6.2523004340745927e-05 style: 17 significant digits in every real cell
  EXPECT_NE(csv.find("e-05,0.99993747699565927"), std::string::npos);
}

TEST(TraceIo, LjObjectiveMatchesEnergyOfFinalCoordinates) {
  RunConfig c = defaults_for("lj13");
  c.max_steps = 200;
  c.eta = 1e-4;
  const auto t = run_experiment(c);
  const auto path = scratch("lj.csv");
  emit_trace(t, c, path.string(), TraceFormat::csv);
  const auto doc = read_trace(path.string());
  ASSERT_EQ(doc.trace.final_targets.size(), 39u);
  EXPECT_EQ(doc.trace.logged_dims, 0u);
  EXPECT_NEAR(doc.trace.rows.back().objective, oracle::lj(doc.trace.final_targets), 1e-9);
}

TEST(TraceIo, MalformedInputRejected) {
  EXPECT_THROW(parse_trace_csv("# status = converged\niteration,rho_n\n"), std::runtime_error);
  EXPECT_THROW(parse_trace_csv("iteration,rho_n,rho_cost,objective,target_norm,step_norm\n0,1,2\n"),
               std::runtime_error);
  EXPECT_THROW(read_trace("/nonexistent/trace.csv"), std::runtime_error);
}

TEST(TraceIo, UnwritablePathThrows) {
  OptimizationTrace t;
  EXPECT_THROW(emit_trace(t, defaults_for("ctl"), "/nonexistent/dir/t.csv", TraceFormat::csv),
               std::runtime_error);
}
