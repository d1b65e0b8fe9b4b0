// Command-line front end: solve, compare, fdcheck.
//
// Exit codes: 0 success, 2 configuration or usage error, 3 driver error.

#include "hsda/harness/compare.hpp"
#include "hsda/harness/config.hpp"
#include "hsda/harness/experiment.hpp"
#include "hsda/harness/fd_check.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <set>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDriver = 3;

using hsda::harness::ExperimentConfig;

int run_solve(const std::vector<std::string>& config_paths, const std::vector<std::string>& sets,
              const std::string& out_dir, const std::optional<std::uint64_t>& seed) {
  std::vector<ExperimentConfig> configs;
  std::set<std::string> names;
  for (const auto& path : config_paths) {
    ExperimentConfig cfg = hsda::harness::load_config(path);
    for (const auto& s : sets) hsda::harness::apply_assignment(cfg, s);
    if (seed) cfg.seed = *seed;
    hsda::harness::validate(cfg);
    if (!names.insert(cfg.resolved_output_name()).second) {
      throw hsda::ConfigError("two configs write to the same output name '" + cfg.resolved_output_name() + "'");
    }
    hsda::harness::build_problem(cfg);  // surfaces problem-level config errors before any run starts
    configs.push_back(std::move(cfg));
  }

  struct Outcome {
    int code = kExitOk;
    std::string message;
  };
  auto work = [&out_dir](const ExperimentConfig& cfg) -> Outcome {
    try {
      const auto w = hsda::harness::run_experiment(cfg, out_dir);
      const auto& tr = w.result.trace;
      char line[512];
      std::snprintf(line, sizeof line, "%s: %s after %ld iterations, grad_norm=%.6g%s -> %s",
                    cfg.resolved_output_name().c_str(), hsda::to_string(tr.reason), tr.outer_iters,
                    tr.final_grad_norm,
                    tr.final_f_gap ? (", f_gap=" + hsda::harness::format_double(*tr.final_f_gap)).c_str() : "",
                    w.csv_path.c_str());
      return {kExitOk, line};
    } catch (const hsda::ConfigError& e) {
      return {kExitConfig, cfg.resolved_output_name() + ": configuration error: " + e.what()};
    } catch (const std::invalid_argument& e) {
      return {kExitConfig, cfg.resolved_output_name() + ": invalid parameter: " + e.what()};
    } catch (const std::exception& e) {
      return {kExitDriver, cfg.resolved_output_name() + ": " + e.what()};
    }
  };

  std::vector<Outcome> outcomes;
  if (configs.size() == 1) {
    outcomes.push_back(work(configs.front()));
  } else {
    std::vector<std::future<Outcome>> futures;
    for (const auto& cfg : configs) futures.push_back(std::async(std::launch::async, work, std::cref(cfg)));
    for (auto& f : futures) outcomes.push_back(f.get());
  }
  int code = kExitOk;
  for (const auto& o : outcomes) {
    (o.code == kExitOk ? std::cout : std::cerr) << o.message << "\n";
    code = std::max(code, o.code);
  }
  return code;
}

int run_compare(const std::string& out_path, const std::vector<std::string>& traces) {
  const std::string merged = hsda::harness::compare_runs(traces);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw hsda::ConfigError("cannot write '" + out_path + "'");
  out << merged;
  std::cout << "merged " << traces.size() << " traces into " << out_path << "\n";
  return kExitOk;
}

int run_fdcheck(const std::string& problem, const std::vector<std::string>& sets, int points, double step,
                std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.problem = problem;
  cfg.seed = seed;
  for (const auto& s : sets) hsda::harness::apply_assignment(cfg, s);
  hsda::harness::validate(cfg);
  const auto oracle = hsda::harness::build_problem(cfg);
  if (!oracle.has_closed_form()) {
    throw hsda::ConfigError("fdcheck: problem '" + problem + "' has no closed-form value function");
  }
  const auto rep = hsda::harness::fd_check(oracle, points, step, seed);
  nlohmann::json j = {{"problem", problem},
                      {"points", rep.points},
                      {"step", step},
                      {"max_grad_err", rep.max_grad_err},
                      {"max_hess_err", rep.max_hess_err},
                      {"max_F_err", rep.max_F_err},
                      {"ascent_steps", rep.ascent_steps}};
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Second-order descent ascent solvers for nonconvex-strongly-concave minimax problems"};
  app.require_subcommand(1);

  auto* solve = app.add_subcommand("solve", "run one or more experiment configs");
  std::vector<std::string> config_paths;
  std::vector<std::string> solve_sets;
  std::string out_dir;
  std::uint64_t seed_value = 0;
  solve->add_option("--config", config_paths, "config file (repeat to run several concurrently)")->required();
  solve->add_option("--set", solve_sets, "override as key=value (repeatable)");
  solve->add_option("--out", out_dir, "output directory")->required();
  auto* seed_opt = solve->add_option("--seed", seed_value, "seed overriding the config files");

  auto* compare = app.add_subcommand("compare", "merge trace CSVs into one table");
  std::string compare_out;
  std::vector<std::string> traces;
  compare->add_option("--out", compare_out, "merged CSV path")->required();
  compare->add_option("traces", traces, "trace CSV files")->required();

  auto* fdcheck = app.add_subcommand("fdcheck", "finite-difference check of a closed-form value function");
  std::string fd_problem;
  std::vector<std::string> fd_sets;
  int fd_points = 50;
  double fd_step = 1e-5;
  std::uint64_t fd_seed = 0;
  fdcheck->add_option("--problem", fd_problem, "problem name")->required();
  fdcheck->add_option("--set", fd_sets, "override as key=value (repeatable)");
  fdcheck->add_option("--points", fd_points, "number of random points");
  fdcheck->add_option("--step", fd_step, "finite-difference step");
  fdcheck->add_option("--seed", fd_seed, "seed for points and random problems");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (solve->parsed()) {
      std::optional<std::uint64_t> seed;
      if (seed_opt->count() > 0) seed = seed_value;
      return run_solve(config_paths, solve_sets, out_dir, seed);
    }
    if (compare->parsed()) return run_compare(compare_out, traces);
    if (fdcheck->parsed()) return run_fdcheck(fd_problem, fd_sets, fd_points, fd_step, fd_seed);
  } catch (const hsda::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const hsda::MismatchedProblem& e) {
    std::cerr << "mismatched problem: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDriver;
  }
  return kExitOk;
}
