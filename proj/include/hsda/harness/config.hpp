#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace hsda::harness {

/// One experiment: problem, algorithm, initial point, seed and output naming.
/// Text form is flat `key=value` lines with dotted namespaces:
///
///   problem.name=wtoy
///   problem.eps_w=0.01
///   algorithm.name=hsda
///   algorithm.eps=0.003
///   init.x=w_start1
///   seed=7
///
/// Numeric parameters are validated against per-problem and per-algorithm
/// key sets; anything else is a ConfigError.
struct ExperimentConfig {
  std::string problem = "wtoy";
  std::map<std::string, double> problem_params;
  std::string algorithm = "hsda";
  std::map<std::string, double> algorithm_params;
  std::string init_x = "w_start1";
  std::string init_y = "zeros";
  std::uint64_t seed = 0;
  std::string output_name;  // empty: <problem>_<algorithm>
  bool snapshots = false;

  bool operator==(const ExperimentConfig&) const = default;

  std::string resolved_output_name() const;
  double problem_param(const std::string& key, double fallback) const;
  double algorithm_param(const std::string& key, double fallback) const;
  bool has_algorithm_param(const std::string& key) const;
};

const std::vector<std::string>& problem_names();
const std::vector<std::string>& algorithm_names();
const std::vector<std::string>& problem_keys(const std::string& problem);
const std::vector<std::string>& algorithm_keys(const std::string& algorithm);

/// Applies one `key=value` assignment. Throws ConfigError on unknown keys or
/// malformed values.
void apply_assignment(ExperimentConfig& cfg, const std::string& key, const std::string& value);
void apply_assignment(ExperimentConfig& cfg, const std::string& line);

/// Parses config text ('#' starts a comment). Duplicate keys are rejected.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical text; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& cfg);

/// Ordered key/value pairs of the canonical form, for echoing into summaries.
std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig& cfg);

/// Checks cross-key consistency (names known, parameter keys belong to the
/// chosen problem and algorithm).
void validate(const ExperimentConfig& cfg);

/// Seventeen significant digits, enough to round-trip any double.
std::string format_double(double v);
double parse_double(const std::string& text, const std::string& what);

}  // namespace hsda::harness
