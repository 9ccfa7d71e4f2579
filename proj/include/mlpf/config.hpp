#pragma once

// Run configuration in flat `key = value` text, one entry per line, `#`
// starting a comment. Keys mirror the CLI flags of `mlpf run`.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlpf/cost.hpp"
#include "mlpf/update.hpp"

namespace mlpf {

/// Parse or validation failure. line() is 0 for validation errors.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::size_t line, std::string field, const std::string& what);
  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

enum class TraceFormat { csv, json };

struct RunConfig {
  std::string problem = "ctl";
  Method method = Method::mlpf;
  TargetMode mode = TargetMode::optimize_vars;
  KernelKind kernel = KernelKind::square;
  bool use_kdl = false;
  double kdl_offset = 1.0;
  double eta = 1e-3;
  double alpha = 1.0;
  double beta = 1.0;
  std::size_t max_steps = 100000;
  double cost_tol = 1e-12;
  double step_tol = 1e-300;
  bool factorized = false;
  /// Named canonical initial; ignored when `x0` is set.
  std::string initial;
  std::vector<double> x0;
  std::uint64_t lj_seed = 0;
  std::uint64_t rng_seed = 0;
  std::string output;
  TraceFormat format = TraceFormat::csv;
  bool full_resolution = false;
  /// Persisted traces are subsampled to at most this many rows.
  std::size_t max_rows = 1000000;

  OptimizerConfig optimizer() const;
  CostConfig cost(double target) const;
  void validate() const;
};

/// Problem defaults (frozen learning rates, KDL offsets, step budgets).
RunConfig defaults_for(const std::string& problem);

/// Parses `key = value` text. Keys absent from the text take the defaults of
/// the named problem (ctl if `problem` is absent).
RunConfig parse_config(const std::string& source);
RunConfig load_config(const std::string& path);

/// Serialises every key; parse_config(emit_config(c)) reproduces c.
std::string emit_config(const RunConfig& config);

/// Applies one `key = value` assignment; used by the parser and CLI overrides.
void set_config_value(RunConfig& config, const std::string& key, const std::string& value,
                      std::size_t line = 0);
std::vector<std::string> config_keys();

std::string format_double(double v);

}  // namespace mlpf
