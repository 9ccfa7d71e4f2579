#include "mlpf/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mlpf/benchmarks.hpp"

namespace mlpf {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v, std::size_t line) {
  double out = 0.0;
  const char* b = v.data() + (!v.empty() && v[0] == '+' ? 1 : 0);
  auto [p, ec] = std::from_chars(b, v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || p != v.data() + v.size())
    throw ConfigError(line, key, "expected a number, got '" + v + "'");
  return out;
}

std::uint64_t parse_uint(const std::string& key, const std::string& v, std::size_t line) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    // accept integral values written as doubles, e.g. 1e5
    double d = parse_double(key, v, line);
    if (d < 0.0 || d != std::floor(d) || d > 1.8e19)
      throw ConfigError(line, key, "expected a non-negative integer, got '" + v + "'");
    return static_cast<std::uint64_t>(d);
  }
  return out;
}

bool parse_bool(const std::string& key, std::string v, std::size_t line) {
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(line, key, "expected a boolean, got '" + v + "'");
}

std::vector<double> parse_vector(const std::string& key, const std::string& v, std::size_t line) {
  std::vector<double> out;
  if (trim(v).empty()) return out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item), line));
  return out;
}

template <class F>
auto wrap(const std::string& key, std::size_t line, F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(line, key, e.what());
  }
}

}  // namespace

ConfigError::ConfigError(std::size_t line, std::string field, const std::string& what)
    : std::runtime_error((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
                         field + ": " + what),
      line_(line),
      field_(std::move(field)) {}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  // shortest text that parses back to the same double
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }
  return std::string(buf, p);
}

OptimizerConfig RunConfig::optimizer() const {
  OptimizerConfig c;
  c.method = method;
  c.mode = mode;
  c.eta = eta;
  c.alpha = alpha;
  c.beta = beta;
  c.max_steps = max_steps;
  c.cost_tol = cost_tol;
  c.step_tol = step_tol;
  c.factorized = factorized;
  c.rng_seed = rng_seed;
  return c;
}

CostConfig RunConfig::cost(double target) const {
  return CostConfig{.kernel = CostKernel{kernel},
                    .use_kdl = use_kdl,
                    .kdl_offset = kdl_offset,
                    .target = target};
}

void RunConfig::validate() const {
  const auto names = problem_names();
  if (std::find(names.begin(), names.end(), problem) == names.end())
    throw ConfigError(0, "problem", "unknown problem '" + problem + "'");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ConfigError(0, "eta", "must be positive and finite");
  if (!std::isfinite(alpha)) throw ConfigError(0, "alpha", "must be finite");
  if (!std::isfinite(beta)) throw ConfigError(0, "beta", "must be finite");
  if (max_steps < 1) throw ConfigError(0, "max_steps", "must be at least 1");
  if (!(cost_tol > 0.0)) throw ConfigError(0, "cost_tol", "must be positive");
  if (!(step_tol > 0.0)) throw ConfigError(0, "step_tol", "must be positive");
  if (!(kdl_offset > 0.0) || !std::isfinite(kdl_offset))
    throw ConfigError(0, "kdl_offset", "must be positive and finite");
  if (use_kdl) {
    const double target = problem == "ctl" ? -1.0 : problem == "lj13" ? kLj13GlobalMinimum : 0.0;
    if (!(target + kdl_offset > 0.0))
      throw ConfigError(0, "kdl_offset", "must exceed " + format_double(-target) + " for " + problem);
  }
  if (max_rows < 2) throw ConfigError(0, "max_rows", "must be at least 2");
  for (double v : x0)
    if (!std::isfinite(v)) throw ConfigError(0, "x0", "components must be finite");
  if (x0.empty() && !initial.empty() && problem != "lj13") {
    const auto p = problem_by_name(problem);
    bool found = false;
    for (const auto& ni : p.canonical_initials) found |= ni.name == initial;
    if (!found) throw ConfigError(0, "initial", "unknown initial '" + initial + "' for " + problem);
  }
  if (problem == "lj13" && !x0.empty() && x0.size() != 39)
    throw ConfigError(0, "x0", "lj13 needs 39 coordinates");
  if (problem == "ctl" && !x0.empty() && x0.size() != 2) throw ConfigError(0, "x0", "ctl needs 2 components");
  if (problem == "dvg02" && !x0.empty() && x0.size() != 5)
    throw ConfigError(0, "x0", "dvg02 needs 5 components");
}

RunConfig defaults_for(const std::string& problem) {
  RunConfig c;
  c.problem = problem;
  if (problem == "ctl") {
    c.eta = 1e-3;
    c.kdl_offset = 2.0;  // rho_0 = -1, the log argument needs off > 1
    c.max_steps = 100000;
    c.initial = "m7m5";
  } else if (problem == "dvg02") {
    c.use_kdl = true;
    c.kdl_offset = 1.0;
    c.eta = 1e-15;
    c.max_steps = 200000;
    c.initial = "fifty";
  } else if (problem == "lj13") {
    c.use_kdl = true;
    c.kdl_offset = 50.0;
    c.eta = 1e-4;
    c.max_steps = 1000000;
    c.initial = "local_min";
  } else {
    throw ConfigError(0, "problem", "unknown problem '" + problem + "'");
  }
  return c;
}

std::vector<std::string> config_keys() {
  return {"problem",   "method",     "mode",     "kernel",   "use_kdl",     "kdl_offset",
          "eta",       "alpha",      "beta",     "max_steps", "cost_tol",   "step_tol",
          "factorized", "initial",   "x0",       "lj_seed",  "rng_seed",    "output",
          "format",    "full_resolution", "max_rows"};
}

void set_config_value(RunConfig& c, const std::string& key, const std::string& raw,
                      std::size_t line) {
  const std::string v = trim(raw);
  if (key == "problem") {
    c.problem = v;
  } else if (key == "method") {
    c.method = wrap(key, line, [&] { return method_from_string(v); });
  } else if (key == "mode") {
    c.mode = wrap(key, line, [&] { return mode_from_string(v); });
  } else if (key == "kernel") {
    c.kernel = wrap(key, line, [&] { return kernel_from_string(v); });
  } else if (key == "use_kdl") {
    c.use_kdl = parse_bool(key, v, line);
  } else if (key == "kdl_offset") {
    c.kdl_offset = parse_double(key, v, line);
  } else if (key == "eta") {
    c.eta = parse_double(key, v, line);
  } else if (key == "alpha") {
    c.alpha = parse_double(key, v, line);
  } else if (key == "beta") {
    c.beta = parse_double(key, v, line);
  } else if (key == "max_steps") {
    c.max_steps = parse_uint(key, v, line);
  } else if (key == "cost_tol") {
    c.cost_tol = parse_double(key, v, line);
  } else if (key == "step_tol") {
    c.step_tol = parse_double(key, v, line);
  } else if (key == "factorized") {
    c.factorized = parse_bool(key, v, line);
  } else if (key == "initial") {
    c.initial = v;
  } else if (key == "x0") {
    c.x0 = parse_vector(key, v, line);
  } else if (key == "lj_seed") {
    c.lj_seed = parse_uint(key, v, line);
  } else if (key == "rng_seed") {
    c.rng_seed = parse_uint(key, v, line);
  } else if (key == "output") {
    c.output = v;
  } else if (key == "format") {
    if (v == "csv")
      c.format = TraceFormat::csv;
    else if (v == "json")
      c.format = TraceFormat::json;
    else
      throw ConfigError(line, key, "expected csv or json, got '" + v + "'");
  } else if (key == "full_resolution") {
    c.full_resolution = parse_bool(key, v, line);
  } else if (key == "max_rows") {
    c.max_rows = parse_uint(key, v, line);
  } else {
    throw ConfigError(line, key, "unknown key");
  }
}

RunConfig parse_config(const std::string& source) {
  struct Entry {
    std::size_t line;
    std::string key, value;
  };
  std::vector<Entry> entries;
  std::istringstream in(source);
  std::string text;
  std::size_t line = 0;
  std::string problem = "ctl";
  while (std::getline(in, text)) {
    ++line;
    if (auto hash = text.find('#'); hash != std::string::npos) text.erase(hash);
    text = trim(text);
    if (text.empty()) continue;
    auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError(line, trim(text), "expected 'key = value'");
    Entry e{line, trim(text.substr(0, eq)), trim(text.substr(eq + 1))};
    if (e.key.empty()) throw ConfigError(line, "", "missing key");
    for (const auto& prev : entries)
      if (prev.key == e.key) throw ConfigError(line, e.key, "duplicate key");
    if (e.key == "problem") problem = e.value;
    entries.push_back(std::move(e));
  }
  RunConfig c;
  try {
    c = defaults_for(problem);
  } catch (const ConfigError&) {
    std::size_t at = 0;
    for (const auto& e : entries)
      if (e.key == "problem") at = e.line;
    throw ConfigError(at, "problem", "unknown problem '" + problem + "'");
  }
  for (const auto& e : entries) set_config_value(c, e.key, e.value, e.line);
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string emit_config(const RunConfig& c) {
  std::ostringstream o;
  std::string x0;
  for (std::size_t i = 0; i < c.x0.size(); ++i) x0 += (i ? ", " : "") + format_double(c.x0[i]);
  o << "problem = " << c.problem << '\n'
    << "method = " << to_string(c.method) << '\n'
    << "mode = " << to_string(c.mode) << '\n'
    << "kernel = " << to_string(c.kernel) << '\n'
    << "use_kdl = " << (c.use_kdl ? "true" : "false") << '\n'
    << "kdl_offset = " << format_double(c.kdl_offset) << '\n'
    << "eta = " << format_double(c.eta) << '\n'
    << "alpha = " << format_double(c.alpha) << '\n'
    << "beta = " << format_double(c.beta) << '\n'
    << "max_steps = " << c.max_steps << '\n'
    << "cost_tol = " << format_double(c.cost_tol) << '\n'
    << "step_tol = " << format_double(c.step_tol) << '\n'
    << "factorized = " << (c.factorized ? "true" : "false") << '\n'
    << "initial = " << c.initial << '\n'
    << "x0 = " << x0 << '\n'
    << "lj_seed = " << c.lj_seed << '\n'
    << "rng_seed = " << c.rng_seed << '\n'
    << "output = " << c.output << '\n'
    << "format = " << (c.format == TraceFormat::csv ? "csv" : "json") << '\n'
    << "full_resolution = " << (c.full_resolution ? "true" : "false") << '\n'
    << "max_rows = " << c.max_rows << '\n';
  return o.str();
}

}  // namespace mlpf
