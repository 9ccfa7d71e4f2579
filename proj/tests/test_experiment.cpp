#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "mlpf/acceptance.hpp"
#include "mlpf/experiment.hpp"
#include "mlpf/trace_io.hpp"

using namespace mlpf;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("mlpf_exp_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST(RunExperiment, DvgFromOptimumConvergesImmediately) {
  RunConfig c = defaults_for("dvg02");
  c.x0 = {53.81, 1.27, 3.01, 2.13, 0.507};
  const auto t = run_experiment(c);
  EXPECT_EQ(t.status, RunStatus::converged);
  EXPECT_EQ(t.steps, 0u);
}

TEST(RunExperiment, LjTaylorFlatAtLocalMinimum) {
  RunConfig c = defaults_for("lj13");
  c.method = Method::taylor;
  c.use_kdl = false;
  c.max_steps = 10000;
  const auto t = run_experiment(c);
  EXPECT_EQ(t.status, RunStatus::max_steps);
  EXPECT_LT(std::fabs(t.final_objective - t.rows.front().objective), 1e-6);
}

TEST(RunExperiment, SubsamplingKeepsWithinRowCap) {
  RunConfig c = defaults_for("ctl");
  c.max_steps = 1000;
  c.max_rows = 50;
  EXPECT_EQ(record_stride(c), 21u);
  const auto t = run_experiment(c);
  EXPECT_LE(t.rows.size(), 50u);
  EXPECT_EQ(t.rows.front().iteration, 0u);
  EXPECT_EQ(t.rows.back().iteration, 1000u);
  c.full_resolution = true;
  EXPECT_EQ(record_stride(c), 1u);
  EXPECT_EQ(run_experiment(c).rows.size(), 1001u);
}

TEST(RunExperiment, DefaultCapIsOneMillionRows) {
  RunConfig c = defaults_for("dvg02");
  c.max_steps = 5000000;
  EXPECT_LE((c.max_steps + record_stride(c) - 1) / record_stride(c) + 1, 1000000u);
}

TEST(RunExperiment, RepeatedRunsAreByteIdentical) {
  const auto dir = scratch_dir("det");
  RunConfig c = defaults_for("dvg02");
  c.max_steps = 2000;
  c.output = (dir / "t.csv").string();
  run_experiment(c);
  const auto first = slurp(c.output);
  run_experiment(c);
  EXPECT_EQ(slurp(c.output), first);
  EXPECT_FALSE(first.empty());
}

TEST(CompareMethods, EmptyInitialsGiveEmptySummary) {
  const auto rows = compare_methods(defaults_for("ctl"), {}, standard_method_matrix("ctl"), "");
  EXPECT_TRUE(rows.empty());
}

TEST(CompareMethods, MatrixHasFiveCells) {
  const auto cells = standard_method_matrix("dvg02");
  ASSERT_EQ(cells.size(), 5u);
  std::vector<std::string> names;
  for (const auto& c : cells) names.push_back(c.name);
  EXPECT_EQ(names, (std::vector<std::string>{"mlpf-square", "mlpf-square+KDL", "mlpf-sigmoid+KDL",
                                             "mlpf-square-factorized+KDL", "taylor"}));
}

TEST(CompareMethods, SummaryMatchesTracesAndJobsDoNotChangeResults) {
  const auto dir = scratch_dir("cmp");
  RunConfig base = defaults_for("ctl");
  base.max_steps = 300;
  const std::vector<std::string> inits{"m7m5", "p7p5"};
  const auto cells = standard_method_matrix("ctl");
  const auto serial = compare_methods(base, inits, cells, (dir / "a").string(), 1);
  const auto parallel = compare_methods(base, inits, cells, (dir / "b").string(), 3);
  ASSERT_EQ(serial.size(), 10u);
  ASSERT_EQ(parallel.size(), 10u);
  for (std::size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(serial[i].cell, parallel[i].cell);
    EXPECT_EQ(serial[i].initial, parallel[i].initial);
    EXPECT_EQ(serial[i].final_objective, parallel[i].final_objective);
    const auto doc = read_trace(serial[i].trace_path);
    EXPECT_EQ(serial[i].status, to_string(doc.trace.status));
    EXPECT_EQ(serial[i].steps, doc.trace.steps);
    EXPECT_LE(serial[i].steps, base.max_steps);
    EXPECT_EQ(fs::path(serial[i].trace_path).filename(), fs::path(parallel[i].trace_path).filename());
    EXPECT_EQ(slurp(serial[i].trace_path).size(), slurp(parallel[i].trace_path).size());
  }
  const auto csv = summary_to_csv(serial);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 11);
}

TEST(CompareMethods, FailingCellRecordedOthersRun) {
  RunConfig base = defaults_for("ctl");
  base.max_steps = 20;
  auto cells = standard_method_matrix("ctl");
  cells.push_back({"broken", [](RunConfig& c) { c.eta = -1; }});
  const auto rows = compare_methods(base, {"m7m5"}, cells, "", 2);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows.back().status, "error");
  EXPECT_NE(rows.back().error.find("eta"), std::string::npos);
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) EXPECT_NE(rows[i].status, "error");
}

TEST(IcosahedralSpread, ZeroForIcosahedron) {
  EXPECT_LT(icosahedral_spread(icosahedron_coords(1.1).coords), 1e-12);
  auto g = icosahedron_coords(1.1);
  g.coords[4] *= 1.2;
  EXPECT_GT(icosahedral_spread(g.coords), 0.01);
}
