// mlpf command-line front-end.
//
//   mlpf run [--config FILE] [--<key> VALUE ...] [--out DIR] [--full]
//   mlpf compare --problem NAME [--initials a,b] [--jobs N] [--out DIR]
//   mlpf list-problems
//   mlpf check [--only id,...]
//
// Exit codes: 0 success, 1 usage or config error, 2 numeric failure during a
// run, 3 acceptance failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "mlpf/acceptance.hpp"
#include "mlpf/benchmarks.hpp"
#include "mlpf/config.hpp"
#include "mlpf/experiment.hpp"
#include "mlpf/trace_io.hpp"

namespace fs = std::filesystem;
using namespace mlpf;

namespace {

constexpr int kOk = 0, kUsage = 1, kNumeric = 2, kAcceptance = 3;

std::string default_out_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("MLPF_OUT_DIR"); env && *env) return env;
  return ".";
}

std::string flag_name(std::string key) {
  for (char& c : key)
    if (c == '_') c = '-';
  return "--" + key;
}

struct ConfigFlags {
  std::string config_file;
  std::map<std::string, std::string> values;
  bool full = false;

  void attach(CLI::App* app, const std::vector<std::string>& skip = {}) {
    app->add_option("--config,-c", config_file, "key = value config file");
    for (const auto& key : config_keys()) {
      if (std::find(skip.begin(), skip.end(), key) != skip.end()) continue;
      app->add_option(flag_name(key), values[key], "config key " + key);
    }
    app->add_flag("--full", full, "keep every iteration (same as --full-resolution true)");
  }

  RunConfig resolve(CLI::App* app) const {
    RunConfig c;
    if (!config_file.empty()) {
      c = load_config(config_file);
    } else {
      auto it = values.find("problem");
      const bool given = it != values.end() && app->count(flag_name("problem")) > 0;
      c = defaults_for(given ? it->second : "ctl");
    }
    if (app->count(flag_name("problem")) > 0 && !config_file.empty()) {
      // switching problem from a file keeps the file's keys but the new problem
      c.problem = values.at("problem");
    }
    for (const auto& [key, value] : values)
      if (key != "problem" && app->count(flag_name(key)) > 0) set_config_value(c, key, value);
    if (full) c.full_resolution = true;
    c.validate();
    return c;
  }
};

std::string default_trace_name(const RunConfig& c) {
  std::string name = c.problem + "_" + to_string(c.method);
  if (c.method == Method::mlpf) {
    name += std::string("_") + to_string(c.kernel);
    if (c.use_kdl) name += "_kdl";
    if (c.factorized) name += "_factorized";
  }
  name += "_" + (c.x0.empty() ? (c.initial.empty() ? std::string("default") : c.initial) : "x0");
  return name + (c.format == TraceFormat::csv ? ".csv" : ".json");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

int cmd_run(CLI::App* app, const ConfigFlags& flags, const std::string& out_flag) {
  RunConfig c = flags.resolve(app);
  if (c.output.empty()) {
    const std::string dir = default_out_dir(out_flag);
    fs::create_directories(dir);
    c.output = (fs::path(dir) / default_trace_name(c)).string();
  } else if (!out_flag.empty() && fs::path(c.output).is_relative()) {
    fs::create_directories(out_flag);
    c.output = (fs::path(out_flag) / c.output).string();
  }
  const auto trace = run_experiment(c);
  std::cout << "status " << to_string(trace.status) << ", steps " << trace.steps << ", objective "
            << format_double(trace.final_objective) << ", rho_cost " << format_double(trace.final_cost)
            << "\ntrace " << c.output << "\n";
  if (!trace.message.empty()) std::cout << "message " << trace.message << "\n";
  return trace.status == RunStatus::diverged ? kNumeric : kOk;
}

int cmd_compare(CLI::App* app, const ConfigFlags& flags, const std::string& out_flag,
                const std::string& initials_flag, const std::string& cells_flag, unsigned jobs) {
  RunConfig base = flags.resolve(app);
  auto cells = standard_method_matrix(base.problem);
  if (!cells_flag.empty()) {
    std::vector<MethodCell> keep;
    for (const auto& name : split_list(cells_flag)) {
      auto it = std::find_if(cells.begin(), cells.end(), [&](const MethodCell& m) { return m.name == name; });
      if (it == cells.end()) throw ConfigError(0, "cells", "unknown cell '" + name + "'");
      keep.push_back(*it);
    }
    cells = keep;
  }
  std::vector<std::string> initials;
  if (app->count("--initials") > 0) {
    initials = split_list(initials_flag);
  } else if (base.problem == "lj13") {
    initials = {"local_min"};
  } else {
    for (const auto& p : problem_by_name(base.problem).canonical_initials) initials.push_back(p.name);
  }
  const std::string dir = default_out_dir(out_flag);
  const auto rows = compare_methods(base, initials, cells, dir, jobs);
  const std::string table = summary_to_csv(rows);
  fs::create_directories(dir);
  const auto summary = fs::path(dir) / (base.problem + "_summary.csv");
  std::ofstream(summary, std::ios::binary) << table;
  std::cout << table << "summary " << summary.string() << "\n";
  return kOk;
}

int cmd_list() {
  for (const auto& name : problem_names()) {
    const RunConfig d = defaults_for(name);
    std::cout << name;
    if (name == "lj13") {
      std::cout << "  dim 39  target " << format_double(kLj13GlobalMinimum)
                << "  initials local_min (lj_seed)";
    } else {
      const auto p = problem_by_name(name);
      std::cout << "  dim " << p.dim() << "  target " << format_double(p.target) << "  initials";
      for (const auto& i : p.canonical_initials) std::cout << ' ' << i.name;
    }
    std::cout << "  eta " << format_double(d.eta) << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Functional-derivative optimizer over layered objectives"};
  app.require_subcommand(1);

  std::string out_flag;
  ConfigFlags run_flags, cmp_flags;
  auto* run = app.add_subcommand("run", "run one optimization and write its trace");
  run_flags.attach(run);
  run->add_option("--out", out_flag, "output directory (default $MLPF_OUT_DIR or .)");

  std::string initials_flag, cells_flag;
  unsigned jobs = 1;
  auto* cmp = app.add_subcommand("compare", "run the method matrix over initials");
  cmp_flags.attach(cmp, {"output", "initial"});
  cmp->add_option("--out", out_flag, "output directory (default $MLPF_OUT_DIR or .)");
  cmp->add_option("--initials", initials_flag, "comma-separated canonical initials");
  cmp->add_option("--cells", cells_flag, "comma-separated subset of the method matrix");
  cmp->add_option("--jobs,-j", jobs, "concurrent cells")->check(CLI::PositiveNumber);

  auto* list = app.add_subcommand("list-problems", "list benchmark problems");

  std::string only;
  auto* check = app.add_subcommand("check", "run the acceptance suite");
  check->add_option("--only", only, "comma-separated criterion ids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return cmd_run(run, run_flags, out_flag);
    if (*cmp) return cmd_compare(cmp, cmp_flags, out_flag, initials_flag, cells_flag, jobs);
    if (*list) return cmd_list();
    if (*check) return run_acceptance(std::cout, split_list(only)) ? kOk : kAcceptance;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumeric;
  }
  return kUsage;
}
