#include "hsda/harness/experiment.hpp"

#include "hsda/gda.hpp"
#include "hsda/harness/trace_io.hpp"
#include "hsda/hsda.hpp"
#include "hsda/ihsda.hpp"
#include "hsda/problems.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace hsda::harness {

namespace {

long as_count(double v, const std::string& key, long min_value) {
  if (!(v >= double(min_value)) || std::floor(v) != v || v > 1e12) {
    throw ConfigError(key + " must be an integer >= " + std::to_string(min_value));
  }
  return static_cast<long>(v);
}

void require_positive(double v, const std::string& key) {
  if (!(v > 0)) throw ConfigError(key + " must be positive");
}

struct ProblemDefaults {
  std::map<std::string, double> values;
  bool random = false;
};

ProblemDefaults resolved_problem_params(const ExperimentConfig& cfg) {
  ProblemDefaults d;
  auto get = [&](const std::string& k, double fallback) {
    d.values[k] = cfg.problem_param(k, fallback);
    return d.values[k];
  };
  if (cfg.problem == "wtoy") {
    get("eps_w", 0.01);
    get("L_w", 5);
  } else if (cfg.problem == "quadratic") {
    get("n", 10);
    get("m", 5);
    get("mu_y", 1);
    get("ell2", 1);
    get("coupling", 1);
    get("p_min", 0.1);
    get("p_max", 2);
    d.random = true;
  } else if (cfg.problem == "robust_regression") {
    get("samples", 20);
    get("features", 10);
    get("lambda_adv", 1);
    get("noise", 0.1);
    d.random = true;
  } else {
    throw ConfigError("unknown problem '" + cfg.problem + "'");
  }
  return d;
}

VectorXd parse_vector(const std::string& text, Eigen::Index n, const std::string& key) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    vals.push_back(parse_double(b == std::string::npos ? "" : item.substr(b, e - b + 1), key));
  }
  if (static_cast<Eigen::Index>(vals.size()) != n) {
    throw ConfigError(key + ": expected " + std::to_string(n) + " entries, got " + std::to_string(vals.size()));
  }
  return Eigen::Map<VectorXd>(vals.data(), n);
}

VectorXd initial_vector(const std::string& preset, Eigen::Index n, std::uint64_t seed, std::uint64_t stream,
                        const std::string& key) {
  if (preset == "zeros") return VectorXd::Zero(n);
  if (preset == "w_start1" || preset == "w_start2") {
    if (n != 3) throw ConfigError(key + "=" + preset + " needs a 3-dimensional x-space");
    return preset == "w_start1" ? VectorXd{{0.1, 0.1, 0.1}} : VectorXd{{1.0, 0.1, 0.1}};
  }
  if (preset == "random") {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
    return v;
  }
  return parse_vector(preset, n, key);
}

struct L2Choice {
  double value = 0;
  std::string source;
};

L2Choice resolve_L2(const ExperimentConfig& cfg, const ProblemOracle<double>& o) {
  if (cfg.has_algorithm_param("L2")) {
    const double v = cfg.algorithm_param("L2", 0);
    require_positive(v, "algorithm.L2");
    return {v, "override"};
  }
  const bool tight = cfg.algorithm_param("tight_L2", 1) != 0;
  if (tight && o.closed_form && o.closed_form->hessian_lipschitz && *o.closed_form->hessian_lipschitz > 0) {
    return {*o.closed_form->hessian_lipschitz, "closed_form"};
  }
  return {o.constants.L2(), "analytic"};
}

double resolve_warm_dist(const ExperimentConfig& cfg, const ProblemOracle<double>& o, const VectorXd& x1,
                         const VectorXd& y0) {
  if (cfg.has_algorithm_param("warm_dist")) {
    const double v = cfg.algorithm_param("warm_dist", 0);
    if (!(v >= 0)) throw ConfigError("algorithm.warm_dist must be nonnegative");
    return v;
  }
  if (o.closed_form) return (y0 - o.closed_form->y_star(x1)).norm();
  return 10.0;
}

}  // namespace

ProblemOracle<double> build_problem(const ExperimentConfig& cfg) {
  validate(cfg);
  const ProblemDefaults d = resolved_problem_params(cfg);
  const auto& v = d.values;
  if (cfg.problem == "wtoy") {
    WToyParams<double> p;
    p.eps_w = v.at("eps_w");
    p.L_w = v.at("L_w");
    require_positive(p.eps_w, "problem.eps_w");
    if (!(p.L_w > 1)) throw ConfigError("problem.L_w must exceed 1");
    return make_wtoy(p);
  }
  if (cfg.problem == "quadratic") {
    const long n = as_count(v.at("n"), "problem.n", 1);
    const long m = as_count(v.at("m"), "problem.m", 1);
    require_positive(v.at("mu_y"), "problem.mu_y");
    require_positive(v.at("p_min"), "problem.p_min");
    if (!(v.at("p_max") >= v.at("p_min"))) throw ConfigError("problem.p_max must be >= problem.p_min");
    if (!(v.at("ell2") >= 0)) throw ConfigError("problem.ell2 must be nonnegative");
    return make_quadratic(random_quadratic_params<double>(n, m, v.at("mu_y"), v.at("coupling"), cfg.seed,
                                                          v.at("p_min"), v.at("p_max"), v.at("ell2")));
  }
  const long N = as_count(v.at("samples"), "problem.samples", 1);
  const long dim = as_count(v.at("features"), "problem.features", 1);
  if (dim > 200) throw ConfigError("problem.features must be at most 200");
  try {
    return make_robust_regression(
        random_robust_regression_params<double>(N, dim, v.at("lambda_adv"), cfg.seed, v.at("noise")));
  } catch (const ConstructionError& e) {
    throw ConfigError(e.what());
  }
}

nlohmann::json problem_identity(const ExperimentConfig& cfg) {
  const ProblemDefaults d = resolved_problem_params(cfg);
  nlohmann::json j;
  j["name"] = cfg.problem;
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [k, v] : d.values) params[k] = v;
  j["params"] = params;
  if (d.random) j["seed"] = cfg.seed;
  return j;
}

VectorXd initial_x(const ExperimentConfig& cfg, const ProblemOracle<double>& o) {
  return initial_vector(cfg.init_x, o.dim_x, cfg.seed, 1, "init.x");
}

VectorXd initial_y(const ExperimentConfig& cfg, const ProblemOracle<double>& o) {
  if (cfg.init_y == "w_start1" || cfg.init_y == "w_start2") throw ConfigError("init.y does not accept x presets");
  return initial_vector(cfg.init_y, o.dim_y, cfg.seed, 2, "init.y");
}

RunResult execute(const ExperimentConfig& cfg) {
  validate(cfg);
  const ProblemOracle<double> oracle = build_problem(cfg);
  const VectorXd x1 = initial_x(cfg, oracle);
  const VectorXd y0 = initial_y(cfg, oracle);

  nlohmann::json params;
  RunResult out;
  auto run = [&](auto&& fn) {
    try {
      out.trace = fn();
    } catch (const RunAborted<double>& e) {
      out.trace = e.trace();
      out.aborted = true;
    }
  };

  if (cfg.algorithm == "gda") {
    GdaConfig<double> g = GdaConfig<double>::defaults(oracle.constants);
    g.step_x = cfg.algorithm_param("step_x", g.step_x);
    g.step_y = cfg.algorithm_param("step_y", g.step_y);
    g.ascent_steps = as_count(cfg.algorithm_param("ascent_steps", 1), "algorithm.ascent_steps", 1);
    g.max_outer = as_count(cfg.algorithm_param("max_outer", 200), "algorithm.max_outer", 1);
    g.snapshots = cfg.snapshots;
    if (!(g.step_x >= 0)) throw ConfigError("algorithm.step_x must be nonnegative");
    require_positive(g.step_y, "algorithm.step_y");
    params = {{"step_x", g.step_x}, {"step_y", g.step_y}, {"ascent_steps", g.ascent_steps},
              {"max_outer", g.max_outer}};
    run([&] { return gda_run(oracle, g, x1, y0); });
  } else {
    const double eps = cfg.algorithm_param("eps", 1e-3);
    require_positive(eps, "algorithm.eps");
    const L2Choice L2 = resolve_L2(cfg, oracle);
    const double omega = cfg.algorithm_param("omega", 0.3);
    const long max_outer = as_count(cfg.algorithm_param("max_outer", 1000), "algorithm.max_outer", 1);
    const double warm = resolve_warm_dist(cfg, oracle, x1, y0);
    const long N_cap = as_count(cfg.algorithm_param("N_cap", 0), "algorithm.N_cap", 0);
    params = {{"eps", eps},          {"L2", L2.value},        {"L2_source", L2.source},
              {"omega", omega},      {"max_outer", max_outer}, {"warm_dist", warm},
              {"alpha", std::sqrt(L2.value * eps)}, {"Lambda", std::sqrt(eps / L2.value)},
              {"L1", oracle.constants.L1()},        {"kappa", oracle.constants.kappa()}};
    if (cfg.algorithm == "hsda") {
      HsdaConfig<double> h;
      try {
        h = HsdaConfig<double>::standard(eps, L2.value, omega);
      } catch (const PreconditionViolation& e) {
        throw ConfigError(e.what());
      }
      h.max_outer = max_outer;
      h.warm_dist = warm;
      h.N_cap = N_cap;
      h.snapshots = cfg.snapshots;
      run([&] { return hsda_run(oracle, h, x1, y0); });
    } else {
      double B_g = 0;
      if (cfg.has_algorithm_param("B_g")) {
        B_g = cfg.algorithm_param("B_g", 0);
        require_positive(B_g, "algorithm.B_g");
        params["B_g_source"] = "override";
      } else if (oracle.closed_form) {
        B_g = estimate_gradient_bound(oracle, x1, cfg.seed);
        params["B_g_source"] = "grid";
      } else {
        throw ConfigError("algorithm.B_g is required for problems without a closed-form value function");
      }
      IhsdaConfig<double> c;
      try {
        c = IhsdaConfig<double>::make(eps, L2.value, oracle.constants.L1(), B_g, omega);
      } catch (const PreconditionViolation& e) {
        throw ConfigError(e.what());
      }
      c.max_outer = max_outer;
      c.warm_dist = warm;
      c.N_cap = N_cap;
      c.max_retries = as_count(cfg.algorithm_param("max_retries", 4), "algorithm.max_retries", 0);
      c.lanczos_max_iters =
          as_count(cfg.algorithm_param("lanczos_max_iters", 0), "algorithm.lanczos_max_iters", 0);
      c.seed = cfg.seed;
      c.snapshots = cfg.snapshots;
      params["B_g"] = B_g;
      params["max_retries"] = c.max_retries;
      run([&] { return ihsda_run(oracle, c, x1, y0); });
    }
  }

  out.summary = trace_summary(out.trace);
  out.summary["parameters"] = params;
  out.summary["problem_identity"] = problem_identity(cfg);
  nlohmann::json echo = nlohmann::json::object();
  for (const auto& [k, v] : config_entries(cfg)) echo[k] = v;
  out.summary["config"] = echo;
  out.summary["constants"] = {{"mu", oracle.constants.mu()},
                              {"ell1", oracle.constants.ell1()},
                              {"ell2", oracle.constants.ell2()},
                              {"L2_analytic", oracle.constants.L2()}};
  return out;
}

WrittenRun run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
  validate(cfg);
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) throw ConfigError("cannot create output directory '" + out_dir + "'");

  WrittenRun w;
  w.result = execute(cfg);
  const fs::path base = fs::path(out_dir) / cfg.resolved_output_name();
  w.csv_path = base.string() + ".csv";
  w.json_path = base.string() + ".json";
  {
    std::ofstream csv(w.csv_path, std::ios::binary);
    if (!csv) throw ConfigError("cannot write '" + w.csv_path + "'");
    write_trace_csv(csv, w.result.trace);
  }
  {
    std::ofstream js(w.json_path, std::ios::binary);
    if (!js) throw ConfigError("cannot write '" + w.json_path + "'");
    js << w.result.summary.dump(2) << "\n";
  }
  if (w.result.aborted) {
    throw RunAborted<double>(w.result.trace.error, w.result.trace);
  }
  return w;
}

}  // namespace hsda::harness
