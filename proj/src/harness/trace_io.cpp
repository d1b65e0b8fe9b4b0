#include "hsda/harness/trace_io.hpp"

#include "hsda/harness/config.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

namespace hsda::harness {

namespace {

std::string num(double v) { return format_double(v); }
std::string num(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }
std::string num(long v) { return std::to_string(v); }

nlohmann::json opt_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

const std::vector<std::string>& trace_columns() {
  static const std::vector<std::string> cols = {"t",         "f_gap",       "grad_norm",     "v_abs",
                                                "delta_or_zeta", "step_norm", "inner_iters", "lanczos_iters",
                                                "hvp_cum",   "wall_ms"};
  return cols;
}

void write_trace_csv(std::ostream& out, const IterateTrace<double>& tr) {
  const auto& cols = trace_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << "\n";
  for (const auto& r : tr.records) {
    out << num(r.t) << ',' << num(r.f_gap) << ',' << num(r.grad_norm) << ',' << num(r.v_abs) << ','
        << num(r.delta_or_zeta) << ',' << num(r.step_norm) << ',' << num(r.inner_iters) << ','
        << num(r.lanczos_iters) << ',' << num(r.hvp_cum) << ',' << num(r.wall_ms) << "\n";
  }
  if (tr.reason != Termination::aborted) {
    const long t_final = tr.records.empty() ? 1 : tr.records.back().t + 1;
    out << num(t_final) << ',' << num(tr.final_f_gap) << ',' << num(tr.final_grad_norm) << ",,,,,,,\n";
  }
}

std::string trace_csv(const IterateTrace<double>& trace) {
  std::ostringstream ss;
  write_trace_csv(ss, trace);
  return ss.str();
}

nlohmann::json trace_summary(const IterateTrace<double>& tr) {
  nlohmann::json j;
  j["algorithm"] = tr.algorithm;
  j["problem"] = tr.problem;
  j["termination"] = to_string(tr.reason);
  j["certified"] = tr.certified;
  if (!tr.error.empty()) j["error"] = tr.error;
  nlohmann::json fin;
  fin["f_gap"] = opt_json(tr.final_f_gap);
  fin["grad_norm"] = tr.final_grad_norm;
  fin["lambda_min"] = opt_json(tr.final_lambda_min);
  fin["x"] = std::vector<double>(tr.x_final.data(), tr.x_final.data() + tr.x_final.size());
  j["final"] = fin;
  nlohmann::json tot;
  tot["outer_iters"] = tr.outer_iters;
  tot["inner_iters"] = tr.total_inner;
  tot["lanczos_iters"] = tr.total_lanczos;
  tot["hvp"] = tr.total_hvp;
  tot["safeguard_retries"] = tr.total_retries;
  tot["wall_ms"] = tr.wall_ms;
  j["totals"] = tot;
  nlohmann::json xs = nlohmann::json::array();
  for (const auto& r : tr.records) {
    if (r.x) xs.push_back(std::vector<double>(r.x->data(), r.x->data() + r.x->size()));
  }
  if (!xs.empty()) j["iterates"] = xs;  // x_t per record, only with snapshots on
  return j;
}

TraceTable parse_trace_csv(const std::string& text) {
  TraceTable t;
  std::stringstream ss(text);
  std::string line;
  auto split = [](const std::string& l) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ls(l);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!l.empty() && l.back() == ',') cells.emplace_back();
    return cells;
  };
  if (!std::getline(ss, line)) throw ConfigError("trace CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  t.header = split(line);
  if (t.header != trace_columns()) throw ConfigError("trace CSV header does not match the trace schema");
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != t.header.size()) {
      throw ConfigError("trace CSV row has " + std::to_string(cells.size()) + " cells, expected " +
                        std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(cells));
  }
  return t;
}

TraceTable read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read trace file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_trace_csv(buf.str());
}

}  // namespace hsda::harness
