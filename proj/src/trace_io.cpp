#include "mlpf/trace_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace mlpf {

namespace {

using nlohmann::json;

const std::vector<std::string> kBaseColumns = {"iteration",   "rho_n",     "rho_cost",
                                               "objective",   "target_norm", "step_norm"};

std::string real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_real(const std::string& s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return HUGE_VAL;
  if (s == "-inf") return -HUGE_VAL;
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size())
    throw std::runtime_error("trace: bad number '" + s + "'");
  return v;
}

std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

std::string join_reals(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + real(v[i]);
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

json real_json(double v) { return std::isfinite(v) ? json(v) : json(real(v)); }
double json_real(const json& j) {
  if (j.is_null()) return std::nan("");
  if (j.is_string()) return parse_real(j.get<std::string>());
  return j.get<double>();
}

std::vector<double> row_values(const TraceRow& r, std::size_t dims) {
  std::vector<double> v = {static_cast<double>(r.iteration), r.rho_n, r.rho_cost,
                           r.objective, r.target_norm, r.step_norm};
  for (std::size_t i = 0; i < dims; ++i) v.push_back(i < r.targets.size() ? r.targets[i] : std::nan(""));
  return v;
}

TraceRow row_from_values(const std::vector<double>& v, std::size_t dims) {
  TraceRow r;
  r.iteration = static_cast<std::size_t>(v.at(0));
  r.rho_n = v.at(1);
  r.rho_cost = v.at(2);
  r.objective = v.at(3);
  r.target_norm = v.at(4);
  r.step_norm = v.at(5);
  r.targets.assign(v.begin() + 6, v.begin() + 6 + static_cast<std::ptrdiff_t>(dims));
  return r;
}

void finish_trace(OptimizationTrace& t) {
  if (!t.rows.empty()) {
    t.final_objective = t.rows.back().objective;
    t.final_cost = t.rows.back().rho_cost;
  }
}

}  // namespace

std::vector<std::string> trace_columns(const OptimizationTrace& trace) {
  auto cols = kBaseColumns;
  for (std::size_t i = 0; i < trace.logged_dims; ++i) cols.push_back("x" + std::to_string(i + 1));
  return cols;
}

std::string trace_to_csv(const OptimizationTrace& trace, const RunConfig& config) {
  std::ostringstream o;
  o << "# format = mlpf-trace\n"
    << "# code_version = " << kCodeVersion << '\n';
  std::istringstream cfg(emit_config(config));
  for (std::string line; std::getline(cfg, line);) o << "# config." << line << '\n';
  o << "# status = " << to_string(trace.status) << '\n'
    << "# message = " << one_line(trace.message) << '\n'
    << "# steps = " << trace.steps << '\n'
    << "# final_targets = " << join_reals(trace.final_targets) << '\n';
  const auto cols = trace_columns(trace);
  for (std::size_t i = 0; i < cols.size(); ++i) o << (i ? "," : "") << cols[i];
  o << '\n';
  for (const auto& r : trace.rows) {
    const auto v = row_values(r, trace.logged_dims);
    o << r.iteration;
    for (std::size_t i = 1; i < v.size(); ++i) o << ',' << real(v[i]);
    o << '\n';
  }
  return o.str();
}

std::string trace_to_json(const OptimizationTrace& trace, const RunConfig& config) {
  json cfg = json::object();
  std::istringstream in(emit_config(config));
  for (std::string line; std::getline(in, line);) {
    auto eq = line.find('=');
    cfg[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  json rows = json::array();
  for (const auto& r : trace.rows) {
    json row = json::array();
    const auto v = row_values(r, trace.logged_dims);
    row.push_back(r.iteration);
    for (std::size_t i = 1; i < v.size(); ++i) row.push_back(real_json(v[i]));
    rows.push_back(std::move(row));
  }
  json finals = json::array();
  for (double v : trace.final_targets) finals.push_back(real_json(v));
  json doc = {{"format", "mlpf-trace"},
              {"code_version", kCodeVersion},
              {"config", cfg},
              {"status", to_string(trace.status)},
              {"message", trace.message},
              {"steps", trace.steps},
              {"final_targets", finals},
              {"columns", trace_columns(trace)},
              {"rows", rows}};
  return doc.dump(1) + "\n";
}

void emit_trace(const OptimizationTrace& trace, const RunConfig& config, const std::string& path,
                TraceFormat format) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << (format == TraceFormat::csv ? trace_to_csv(trace, config) : trace_to_json(trace, config));
  f.flush();
  if (!f) throw std::runtime_error("write failed for " + path);
}

TraceDocument parse_trace_csv(const std::string& text) {
  TraceDocument doc;
  std::string cfg;
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> cols;
  bool saw_status = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string body = trim(line.substr(1));
      auto eq = body.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = trim(body.substr(0, eq));
      const std::string value = trim(body.substr(eq + 1));
      if (key.rfind("config.", 0) == 0)
        cfg += key.substr(7) + " = " + value + "\n";
      else if (key == "code_version")
        doc.code_version = value;
      else if (key == "status") {
        doc.trace.status = status_from_string(value);
        saw_status = true;
      } else if (key == "message")
        doc.trace.message = value;
      else if (key == "steps")
        doc.trace.steps = std::stoull(value);
      else if (key == "final_targets" && !value.empty())
        for (const auto& s : split(value, ',')) doc.trace.final_targets.push_back(parse_real(trim(s)));
      continue;
    }
    if (cols.empty()) {
      cols = split(line, ',');
      if (cols.size() < kBaseColumns.size() ||
          !std::equal(kBaseColumns.begin(), kBaseColumns.end(), cols.begin()))
        throw std::runtime_error("trace: unexpected column header '" + line + "'");
      doc.trace.logged_dims = cols.size() - kBaseColumns.size();
      continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() != cols.size())
      throw std::runtime_error("trace: row has " + std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(cols.size()));
    std::vector<double> v;
    for (const auto& c : cells) v.push_back(parse_real(c));
    doc.trace.rows.push_back(row_from_values(v, doc.trace.logged_dims));
  }
  if (cols.empty() || !saw_status) throw std::runtime_error("trace: missing header");
  doc.config = parse_config(cfg);
  finish_trace(doc.trace);
  return doc;
}

TraceDocument parse_trace_json(const std::string& text) {
  const json j = json::parse(text);
  if (j.value("format", "") != "mlpf-trace") throw std::runtime_error("trace: not an mlpf trace");
  TraceDocument doc;
  doc.code_version = j.at("code_version").get<std::string>();
  std::string cfg;
  for (const auto& [k, v] : j.at("config").items()) cfg += k + " = " + v.get<std::string>() + "\n";
  doc.config = parse_config(cfg);
  doc.trace.status = status_from_string(j.at("status").get<std::string>());
  doc.trace.message = j.at("message").get<std::string>();
  doc.trace.steps = j.at("steps").get<std::size_t>();
  for (const auto& v : j.at("final_targets")) doc.trace.final_targets.push_back(json_real(v));
  const auto cols = j.at("columns").get<std::vector<std::string>>();
  doc.trace.logged_dims = cols.size() - kBaseColumns.size();
  for (const auto& row : j.at("rows")) {
    if (row.size() != cols.size()) throw std::runtime_error("trace: ragged row");
    std::vector<double> v;
    for (const auto& c : row) v.push_back(json_real(c));
    doc.trace.rows.push_back(row_from_values(v, doc.trace.logged_dims));
  }
  finish_trace(doc.trace);
  return doc;
}

TraceDocument read_trace(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  const std::string text = ss.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return parse_trace_json(text);
  return parse_trace_csv(text);
}

}  // namespace mlpf
