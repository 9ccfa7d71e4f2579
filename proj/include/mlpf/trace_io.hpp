#pragma once

// Trace persistence.
//
// CSV layout: `# key = value` comment lines echoing the run configuration
// (prefixed `config.`), the code version, terminal status, step count and
// final target vector, then one header row naming the columns and one data
// row per kept iteration. Columns are
//
//   iteration,rho_n,rho_cost,objective,target_norm,step_norm[,x1..xn]
//
// where x1..xn appear only for targets with at most five components. Reals
// are written with 17 significant digits and read back bit-exactly.
//
// JSON layout: {"format": "mlpf-trace", "code_version", "config": {...},
// "status", "message", "steps", "final_targets": [...], "columns": [...],
// "rows": [[...], ...]}. Non-finite reals are written as the strings "nan",
// "inf" and "-inf".

#include <string>
#include <vector>

#include "mlpf/config.hpp"
#include "mlpf/optimizer.hpp"

namespace mlpf {

inline constexpr const char* kCodeVersion = "0.1.0";

struct TraceDocument {
  RunConfig config;
  std::string code_version;
  OptimizationTrace trace;
};

std::vector<std::string> trace_columns(const OptimizationTrace& trace);

std::string trace_to_csv(const OptimizationTrace& trace, const RunConfig& config);
std::string trace_to_json(const OptimizationTrace& trace, const RunConfig& config);

/// Writes the trace; throws std::runtime_error on I/O failure.
void emit_trace(const OptimizationTrace& trace, const RunConfig& config, const std::string& path,
                TraceFormat format);

TraceDocument parse_trace_csv(const std::string& text);
TraceDocument parse_trace_json(const std::string& text);
/// Reads either format (JSON when the first non-blank byte is '{').
TraceDocument read_trace(const std::string& path);

}  // namespace mlpf
