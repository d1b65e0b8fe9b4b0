#include "hsda/harness/config.hpp"

#include "hsda/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace hsda::harness {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

const std::vector<std::string> kInitPresets = {"w_start1", "w_start2", "zeros", "random"};

void check_init(const std::string& value, const std::string& key) {
  if (contains(kInitPresets, value)) return;
  std::stringstream ss(value);
  std::string item;
  int count = 0;
  while (std::getline(ss, item, ',')) {
    parse_double(trim(item), key);
    ++count;
  }
  if (count == 0) throw ConfigError(key + ": expected a preset or a comma-separated vector");
}

std::uint64_t parse_seed(const std::string& text) {
  std::uint64_t out = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last || text.empty()) {
    throw ConfigError("seed: expected a nonnegative integer, got '" + text + "'");
  }
  return out;
}

bool parse_bool(const std::string& text, const std::string& key) {
  if (text == "1" || text == "true") return true;
  if (text == "0" || text == "false") return false;
  throw ConfigError(key + ": expected 0, 1, true or false, got '" + text + "'");
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& text, const std::string& what) {
  double out = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last || first == last) {
    throw ConfigError(what + ": expected a number, got '" + text + "'");
  }
  return out;
}

const std::vector<std::string>& problem_names() {
  static const std::vector<std::string> v = {"wtoy", "quadratic", "robust_regression"};
  return v;
}

const std::vector<std::string>& algorithm_names() {
  static const std::vector<std::string> v = {"hsda", "ihsda", "gda"};
  return v;
}

const std::vector<std::string>& problem_keys(const std::string& problem) {
  static const std::map<std::string, std::vector<std::string>> keys = {
      {"wtoy", {"eps_w", "L_w"}},
      {"quadratic", {"n", "m", "mu_y", "ell2", "coupling", "p_min", "p_max"}},
      {"robust_regression", {"samples", "features", "lambda_adv", "noise"}},
  };
  auto it = keys.find(problem);
  if (it == keys.end()) throw ConfigError("unknown problem '" + problem + "'");
  return it->second;
}

const std::vector<std::string>& algorithm_keys(const std::string& algorithm) {
  static const std::map<std::string, std::vector<std::string>> keys = {
      {"hsda", {"eps", "omega", "max_outer", "warm_dist", "L2", "tight_L2", "N_cap"}},
      {"ihsda",
       {"eps", "omega", "max_outer", "warm_dist", "L2", "tight_L2", "N_cap", "B_g", "max_retries",
        "lanczos_max_iters"}},
      {"gda", {"step_x", "step_y", "ascent_steps", "max_outer"}},
  };
  auto it = keys.find(algorithm);
  if (it == keys.end()) throw ConfigError("unknown algorithm '" + algorithm + "'");
  return it->second;
}

std::string ExperimentConfig::resolved_output_name() const {
  return output_name.empty() ? problem + "_" + algorithm : output_name;
}

double ExperimentConfig::problem_param(const std::string& key, double fallback) const {
  auto it = problem_params.find(key);
  return it == problem_params.end() ? fallback : it->second;
}

double ExperimentConfig::algorithm_param(const std::string& key, double fallback) const {
  auto it = algorithm_params.find(key);
  return it == algorithm_params.end() ? fallback : it->second;
}

bool ExperimentConfig::has_algorithm_param(const std::string& key) const {
  return algorithm_params.count(key) > 0;
}

void apply_assignment(ExperimentConfig& cfg, const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  if (key.empty()) throw ConfigError("empty key");
  if (key == "problem.name") {
    cfg.problem = value;
  } else if (key == "algorithm.name") {
    cfg.algorithm = value;
  } else if (key.rfind("problem.", 0) == 0) {
    cfg.problem_params[key.substr(8)] = parse_double(value, key);
  } else if (key.rfind("algorithm.", 0) == 0) {
    cfg.algorithm_params[key.substr(10)] = parse_double(value, key);
  } else if (key == "init.x") {
    check_init(value, key);
    cfg.init_x = value;
  } else if (key == "init.y") {
    check_init(value, key);
    cfg.init_y = value;
  } else if (key == "seed") {
    cfg.seed = parse_seed(value);
  } else if (key == "output.name") {
    if (value.find_first_of("/\\") != std::string::npos) {
      throw ConfigError("output.name must not contain path separators");
    }
    cfg.output_name = value;
  } else if (key == "output.snapshots") {
    cfg.snapshots = parse_bool(value, key);
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

void apply_assignment(ExperimentConfig& cfg, const std::string& line) {
  const auto eq = line.find('=');
  if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + line + "'");
  apply_assignment(cfg, line.substr(0, eq), line.substr(eq + 1));
}

void validate(const ExperimentConfig& cfg) {
  const auto& pk = problem_keys(cfg.problem);
  const auto& ak = algorithm_keys(cfg.algorithm);
  for (const auto& [k, v] : cfg.problem_params) {
    if (!contains(pk, k)) throw ConfigError("unknown key 'problem." + k + "' for problem " + cfg.problem);
    if (!std::isfinite(v)) throw ConfigError("problem." + k + " must be finite");
  }
  for (const auto& [k, v] : cfg.algorithm_params) {
    if (!contains(ak, k)) throw ConfigError("unknown key 'algorithm." + k + "' for algorithm " + cfg.algorithm);
    if (!std::isfinite(v)) throw ConfigError("algorithm." + k + " must be finite");
  }
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (!seen.insert(key).second) {
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    apply_assignment(cfg, key, line.substr(eq + 1));
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  out.emplace_back("problem.name", cfg.problem);
  for (const auto& [k, v] : cfg.problem_params) out.emplace_back("problem." + k, format_double(v));
  out.emplace_back("algorithm.name", cfg.algorithm);
  for (const auto& [k, v] : cfg.algorithm_params) out.emplace_back("algorithm." + k, format_double(v));
  out.emplace_back("init.x", cfg.init_x);
  out.emplace_back("init.y", cfg.init_y);
  out.emplace_back("seed", std::to_string(cfg.seed));
  if (!cfg.output_name.empty()) out.emplace_back("output.name", cfg.output_name);
  out.emplace_back("output.snapshots", cfg.snapshots ? "1" : "0");
  return out;
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& [k, v] : config_entries(cfg)) out += k + "=" + v + "\n";
  return out;
}

}  // namespace hsda::harness
