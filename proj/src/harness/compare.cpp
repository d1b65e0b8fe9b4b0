#include "hsda/harness/compare.hpp"

#include "hsda/core.hpp"
#include "hsda/harness/trace_io.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace hsda::harness {

namespace {

nlohmann::json load_summary(const std::string& csv_path) {
  const std::string json_path = std::filesystem::path(csv_path).replace_extension(".json").string();
  std::ifstream in(json_path);
  if (!in) throw ConfigError("missing summary '" + json_path + "' next to trace '" + csv_path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("cannot parse summary '" + json_path + "': " + e.what());
  }
}

}  // namespace

std::string compare_runs(const std::vector<std::string>& paths) {
  require(paths.size() >= 2, "compare_runs: need at least two traces");
  std::vector<TraceTable> tables;
  std::vector<std::string> labels;
  std::map<std::string, int> label_count;
  nlohmann::json identity;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const nlohmann::json summary = load_summary(paths[i]);
    const nlohmann::json id = summary.value("problem_identity", nlohmann::json());
    if (i == 0) {
      identity = id;
    } else if (id != identity) {
      throw MismatchedProblem("trace '" + paths[i] + "' was produced on a different problem (" + id.dump() +
                              " vs " + identity.dump() + ")");
    }
    std::string label = summary.value("algorithm", std::string("run"));
    if (++label_count[label] > 1) label += "#" + std::to_string(label_count[label]);
    labels.push_back(label);
    tables.push_back(read_trace_csv(paths[i]));
  }

  const auto& cols = trace_columns();
  std::ostringstream out;
  out << "t";
  for (const auto& l : labels)
    for (std::size_t c = 1; c < cols.size(); ++c) out << ',' << l << '.' << cols[c];
  out << "\n";

  // Traces are contiguous in t starting at 1; key rows by t regardless.
  std::map<long, std::vector<const std::vector<std::string>*>> rows;
  for (std::size_t k = 0; k < tables.size(); ++k) {
    for (const auto& r : tables[k].rows) {
      const long t = std::stol(r[0]);
      auto& slot = rows[t];
      slot.resize(tables.size(), nullptr);
      slot[k] = &r;
    }
  }
  for (const auto& [t, slot] : rows) {
    out << t;
    for (std::size_t k = 0; k < tables.size(); ++k) {
      for (std::size_t c = 1; c < cols.size(); ++c) {
        out << ',';
        if (k < slot.size() && slot[k]) out << (*slot[k])[c];
      }
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace hsda::harness
