#include "hsda/harness/compare.hpp"
#include "hsda/harness/config.hpp"
#include "hsda/harness/experiment.hpp"
#include "hsda/harness/fd_check.hpp"
#include "hsda/harness/trace_io.hpp"
#include "hsda/problems.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace hsda::harness {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hsda_harness_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ExperimentConfig random_config(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, 2);
  std::uniform_real_distribution<double> unif(-1e3, 1e3);
  std::bernoulli_distribution coin(0.5);
  ExperimentConfig c;
  c.problem = problem_names()[pick(rng)];
  c.algorithm = algorithm_names()[pick(rng)];
  for (const auto& k : problem_keys(c.problem))
    if (coin(rng)) c.problem_params[k] = unif(rng) * std::pow(10.0, pick(rng) * 7 - 7);
  for (const auto& k : algorithm_keys(c.algorithm))
    if (coin(rng)) c.algorithm_params[k] = unif(rng) / 3;
  const char* inits[] = {"w_start1", "zeros", "random", "0.5,-1e-3,2"};
  c.init_x = inits[pick(rng)];
  c.init_y = coin(rng) ? "zeros" : "random";
  c.seed = rng();
  if (coin(rng)) c.output_name = "run" + std::to_string(pick(rng));
  c.snapshots = coin(rng);
  return c;
}

TEST(Config, RoundTripRandomConfigs) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 100; ++i) {
    const ExperimentConfig c = random_config(rng);
    const std::string text = serialize_config(c);
    const ExperimentConfig back = parse_config(text);
    EXPECT_TRUE(back == c) << text;
    EXPECT_EQ(serialize_config(back), text);
  }
}

TEST(Config, ParsesCommentsAndWhitespace) {
  const auto c = parse_config(
      "# experiment\n"
      "problem.name = quadratic\n"
      "problem.n=4   # small\n"
      "\n"
      "algorithm.name=ihsda\n"
      "algorithm.eps=1e-3\n"
      "seed=9\n");
  EXPECT_EQ(c.problem, "quadratic");
  EXPECT_EQ(c.problem_params.at("n"), 4);
  EXPECT_EQ(c.algorithm, "ihsda");
  EXPECT_EQ(c.algorithm_params.at("eps"), 1e-3);
  EXPECT_EQ(c.seed, 9u);
}

TEST(Config, Rejections) {
  EXPECT_THROW(parse_config("bogus=1\n"), ConfigError);
  EXPECT_THROW(parse_config("problem.name=wtoy\nproblem.n=3\n"), ConfigError);
  EXPECT_THROW(parse_config("algorithm.name=gda\nalgorithm.eps=1\n"), ConfigError);
  EXPECT_THROW(parse_config("algorithm.eps=abc\n"), ConfigError);
  EXPECT_THROW(parse_config("seed=1\nseed=2\n"), ConfigError);
  EXPECT_THROW(parse_config("problem.name=nothing\n"), ConfigError);
  EXPECT_THROW(parse_config("just text\n"), ConfigError);
  EXPECT_THROW(parse_config("seed=-1\n"), ConfigError);
  EXPECT_THROW(parse_config("init.x=1,two\n"), ConfigError);
  EXPECT_THROW(parse_config("output.name=a/b\n"), ConfigError);
  EXPECT_THROW(parse_config("algorithm.eps=nan\n"), ConfigError);
}

TEST(Config, DoubleFormattingRoundTrips) {
  for (double v : {0.1, 1.0 / 3, 1e-300, -2.5e17, 123456789.123456789}) {
    EXPECT_EQ(parse_double(format_double(v), "v"), v);
  }
}

TEST(Experiment, ConfigErrorsSurfaceBeforeRunning) {
  ExperimentConfig c;
  c.algorithm = "hsda";
  c.algorithm_params["eps"] = 5.0;  // above min(L2/2, 1)
  EXPECT_THROW(execute(c), ConfigError);
  ExperimentConfig r;
  r.problem = "robust_regression";
  r.algorithm = "ihsda";
  r.init_x = "zeros";
  EXPECT_THROW(execute(r), ConfigError);  // no B_g and no closed form
  r.problem_params["lambda_adv"] = 0.4;
  r.algorithm_params["B_g"] = 1;
  EXPECT_THROW(execute(r), ConfigError);
  ExperimentConfig q;
  q.problem = "quadratic";
  EXPECT_THROW(execute(q), ConfigError);  // w_start1 needs n = 3
}

TEST(Experiment, WToyHsdaReachesMinimizer) {
  const auto dir = scratch_dir("wtoy");
  ExperimentConfig c;
  c.algorithm_params["eps"] = 3e-3;
  const auto w = run_experiment(c, dir.string());
  EXPECT_TRUE(fs::exists(w.csv_path));
  EXPECT_TRUE(fs::exists(w.json_path));
  EXPECT_LE(*w.result.trace.final_f_gap, 1e-4);
  std::ifstream js(w.json_path);
  const auto j = nlohmann::json::parse(js);
  EXPECT_EQ(j["termination"], "v_threshold");
  EXPECT_EQ(j["parameters"]["L2_source"], "closed_form");
  EXPECT_EQ(j["parameters"]["L2"], 2.0);
  EXPECT_EQ(j["config"]["algorithm.eps"], "0.0030000000000000001");
  EXPECT_EQ(j["problem_identity"]["name"], "wtoy");
  EXPECT_FALSE(j["problem_identity"].contains("seed"));
}

TEST(Experiment, AnalyticL2WhenTightDisabled) {
  ExperimentConfig c;
  c.algorithm_params["tight_L2"] = 0;
  c.algorithm_params["max_outer"] = 2;
  const auto r = execute(c);
  EXPECT_EQ(r.summary["parameters"]["L2_source"], "analytic");
  EXPECT_DOUBLE_EQ(r.summary["parameters"]["L2"].get<double>(), build_problem(c).constants.L2());
}

TEST(TraceCsv, Format) {
  ExperimentConfig c;
  c.algorithm_params["eps"] = 3e-3;
  const auto r = execute(c);
  const std::string csv = trace_csv(r.trace);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,f_gap,grad_norm,v_abs,delta_or_zeta,step_norm,inner_iters,lanczos_iters,hvp_cum,wall_ms");
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), r.trace.records.size() + 1);
  for (const auto& l : lines) EXPECT_EQ(std::count(l.begin(), l.end(), ','), 9) << l;
  EXPECT_EQ(lines[0].substr(0, 2), "1,");
  const std::string& last = lines.back();
  EXPECT_EQ(last.substr(0, last.find(',')), std::to_string(r.trace.records.size() + 1));
  EXPECT_EQ(last.substr(last.size() - 7), ",,,,,,,");
  EXPECT_EQ(csv.find(';'), std::string::npos);
}

TEST(TraceJson, IteratesOnlyWithSnapshots) {
  ExperimentConfig c;
  c.algorithm_params["eps"] = 3e-3;
  EXPECT_FALSE(trace_summary(execute(c).trace).contains("iterates"));
  c.snapshots = true;
  const auto r = execute(c);
  const auto j = trace_summary(r.trace);
  ASSERT_TRUE(j.contains("iterates"));
  ASSERT_EQ(j["iterates"].size(), r.trace.records.size());
  EXPECT_EQ(j["iterates"][0].get<std::vector<double>>(), (std::vector<double>{0.1, 0.1, 0.1}));
}

TEST(TraceCsv, BlankGapWithoutClosedForm) {
  ExperimentConfig c;
  c.problem = "robust_regression";
  c.problem_params["samples"] = 4;
  c.problem_params["features"] = 3;
  c.init_x = "zeros";
  c.algorithm_params["max_outer"] = 3;
  const auto r = execute(c);
  const auto table = parse_trace_csv(trace_csv(r.trace));
  ASSERT_FALSE(table.rows.empty());
  for (const auto& row : table.rows) EXPECT_EQ(row[1], "");
  EXPECT_NE(table.rows[0][2], "");
  EXPECT_TRUE(r.summary["final"]["f_gap"].is_null());
  EXPECT_EQ(r.summary["problem_identity"]["seed"], 0);
}

std::string strip_wall(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
  return out;
}

TEST(Experiment, DeterministicApartFromWallClock) {
  for (const char* alg : {"hsda", "ihsda", "gda"}) {
    ExperimentConfig c;
    c.problem = "quadratic";
    c.problem_params["n"] = 6;
    c.problem_params["m"] = 3;
    c.algorithm = alg;
    c.init_x = "random";
    c.seed = 77;
    if (std::string(alg) != "gda") c.algorithm_params["max_outer"] = 50;
    const auto a = execute(c);
    const auto b = execute(c);
    EXPECT_EQ(strip_wall(trace_csv(a.trace)), strip_wall(trace_csv(b.trace))) << alg;
    EXPECT_TRUE(a.trace.x_final == b.trace.x_final) << alg;
  }
}

TEST(Experiment, AbortedRunStillWritesTrace) {
  const auto dir = scratch_dir("abort");
  ExperimentConfig c;
  c.algorithm = "gda";
  c.algorithm_params["step_y"] = 100;
  std::size_t recorded = 0;
  try {
    run_experiment(c, dir.string());
    FAIL() << "expected RunAborted";
  } catch (const RunAborted<double>& e) {
    recorded = e.trace().records.size();
  }
  EXPECT_GT(recorded, 0u);
  std::ifstream js(dir / "wtoy_gda.json");
  ASSERT_TRUE(js.good());
  const auto j = nlohmann::json::parse(js);
  EXPECT_EQ(j["termination"], "aborted");
  EXPECT_TRUE(j.contains("error"));
  // no closing row after an abort
  EXPECT_EQ(read_trace_csv((dir / "wtoy_gda.csv").string()).rows.size(), recorded);
}

TEST(Compare, MergesTwoAlgorithms) {
  const auto dir = scratch_dir("compare");
  ExperimentConfig a;
  a.algorithm_params["eps"] = 3e-3;
  ExperimentConfig b = a;
  b.algorithm = "ihsda";
  const auto wa = run_experiment(a, dir.string());
  const auto wb = run_experiment(b, dir.string());
  const std::string merged = compare_runs({wa.csv_path, wb.csv_path});
  std::istringstream in(merged);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header.substr(0, 20), "t,hsda.f_gap,hsda.gr");
  EXPECT_NE(header.find(",ihsda.f_gap,"), std::string::npos);
  EXPECT_EQ(std::count(header.begin(), header.end(), ','), 18);
  const std::size_t rows = std::max(wa.result.trace.records.size(), wb.result.trace.records.size()) + 1;
  std::size_t count = 0;
  std::string line;
  while (std::getline(in, line)) ++count;
  EXPECT_EQ(count, rows);
}

TEST(Compare, DuplicateAlgorithmsGetSuffix) {
  const auto dir = scratch_dir("compare_dup");
  ExperimentConfig a;
  a.algorithm_params["max_outer"] = 2;
  a.output_name = "first";
  ExperimentConfig b = a;
  b.output_name = "second";
  b.algorithm_params["omega"] = 0.4;
  const auto wa = run_experiment(a, dir.string());
  const auto wb = run_experiment(b, dir.string());
  const std::string merged = compare_runs({wa.csv_path, wb.csv_path});
  EXPECT_NE(merged.find("hsda#2.f_gap"), std::string::npos);
}

TEST(Compare, RejectsMismatchedProblems) {
  const auto dir = scratch_dir("compare_bad");
  ExperimentConfig a;
  a.algorithm_params["max_outer"] = 2;
  ExperimentConfig b = a;
  b.problem_params["eps_w"] = 0.02;
  b.output_name = "other";
  const auto wa = run_experiment(a, dir.string());
  const auto wb = run_experiment(b, dir.string());
  EXPECT_THROW(compare_runs({wa.csv_path, wb.csv_path}), MismatchedProblem);
  EXPECT_THROW(compare_runs({wa.csv_path}), PreconditionViolation);
  EXPECT_THROW(compare_runs({wa.csv_path, (dir / "missing.csv").string()}), ConfigError);
}

TEST(FdCheck, WToyClosedForm) {
  const auto o = make_wtoy(WToyParams<double>{});
  const auto rep = fd_check(o, 20, 1e-5, 1);
  EXPECT_LE(rep.max_grad_err, 1e-5);
  EXPECT_LE(rep.max_hess_err, 1e-3);
  EXPECT_LE(rep.max_F_err, 1e-10);
  EXPECT_EQ(rep.points, 20);
}

TEST(FdCheck, QuadraticClosedForm) {
  const auto o = make_quadratic(random_quadratic_params<double>(5, 4, 0.5, 1.0, 3));
  const auto rep = fd_check(o, 10, 1e-5, 2);
  EXPECT_LE(rep.max_grad_err, 1e-8);
  EXPECT_LE(rep.max_hess_err, 1e-3);
}

TEST(FdCheck, RejectsBadArguments) {
  const auto o = make_wtoy(WToyParams<double>{});
  EXPECT_THROW(fd_check(o, 5, 0.0, 1), PreconditionViolation);
  EXPECT_THROW(fd_check(o, 0, 1e-5, 1), PreconditionViolation);
  const auto r = make_robust_regression(random_robust_regression_params<double>(3, 2, 1.0, 1));
  EXPECT_THROW(fd_check(r, 5, 1e-5, 1), PreconditionViolation);
}

}  // namespace
}  // namespace hsda::harness
