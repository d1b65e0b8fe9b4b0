#pragma once

#include "hsda/harness/config.hpp"
#include "hsda/oracle.hpp"
#include "hsda/trace.hpp"

#include <json.hpp>

#include <string>

namespace hsda::harness {

/// Builds the configured problem. Random problems draw from cfg.seed.
ProblemOracle<double> build_problem(const ExperimentConfig& cfg);

/// Name, fully resolved parameters and (for random problems) the seed. Two
/// traces are comparable only if their identities are equal.
nlohmann::json problem_identity(const ExperimentConfig& cfg);

VectorXd initial_x(const ExperimentConfig& cfg, const ProblemOracle<double>& oracle);
VectorXd initial_y(const ExperimentConfig& cfg, const ProblemOracle<double>& oracle);

struct RunResult {
  IterateTrace<double> trace;
  nlohmann::json summary;  // trace summary + parameters + identity + config echo
  bool aborted = false;
};

/// Resolves every default, runs the selected driver and assembles the
/// summary. ConfigError is raised before any computation; driver failures are
/// caught and reported through `aborted` with the partial trace kept.
RunResult execute(const ExperimentConfig& cfg);

struct WrittenRun {
  RunResult result;
  std::string csv_path;
  std::string json_path;
};

/// execute() plus <out_dir>/<name>.csv and <out_dir>/<name>.json. Throws
/// RunAborted<double> after writing when the driver failed.
WrittenRun run_experiment(const ExperimentConfig& cfg, const std::string& out_dir);

}  // namespace hsda::harness
