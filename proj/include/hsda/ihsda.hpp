#pragma once

#include "hsda/hsda.hpp"
#include "hsda/lanczos.hpp"

#include <cmath>
#include <cstdint>
#include <functional>

namespace hsda {

template <typename Scalar>
struct IhsdaConfig {
  Scalar eps = 0;
  Scalar L2 = 0;
  Scalar L1 = 0;
  Scalar B_g = 0;
  Scalar omega = Scalar(0.3);
  Scalar Lambda = 0;
  Scalar eps1 = 0;
  Scalar eps2 = 0;
  long max_outer = 1000;
  Scalar warm_dist = 10;
  long max_retries = 4;
  long lanczos_max_iters = 0;  // <= 0: default policy
  long N_cap = 0;
  Scalar yy_tol = Scalar(1e-12);
  std::uint64_t seed = 0;
  bool snapshots = false;
  /// Observer called after every Lanczos solve, e.g. for diagnostics.
  std::function<void(const HomogenizedOperator<Scalar>&, const RitzPair<Scalar>&)> on_lanczos;

  static IhsdaConfig make(Scalar eps, Scalar L2, Scalar L1, Scalar B_g, Scalar omega = Scalar(0.3)) {
    using std::sqrt;
    IhsdaConfig c;
    c.eps = eps;
    c.L2 = L2;
    c.L1 = L1;
    c.B_g = B_g;
    c.omega = omega;
    c.Lambda = sqrt(eps / L2);
    c.eps1 = eps / 12;
    c.eps2 = sqrt(L2 * eps) / 12;
    c.validate();
    return c;
  }

  void validate() const {
    require(eps > 0 && L2 > 0 && L1 > 0, "IhsdaConfig: eps, L1, L2 must be positive");
    require(eps <= std::min({L2 * L2 * L2 / 36, L2 / 2, Scalar(1)}),
            "IhsdaConfig: eps must satisfy eps <= min(L2^3/36, L2/2, 1)");
    require(omega > Scalar(0.25) && omega < Scalar(0.5), "IhsdaConfig: omega must lie in (1/4, 1/2)");
    require(B_g > 0, "IhsdaConfig: B_g must be positive");
    require(Lambda > 0 && eps1 > 0 && eps2 > 0, "IhsdaConfig: Lambda, eps1, eps2 must be positive");
    require(max_outer >= 1, "IhsdaConfig: max_outer must be at least 1");
    require(max_retries >= 0, "IhsdaConfig: max_retries must be nonnegative");
    require(warm_dist >= 0, "IhsdaConfig: warm_dist must be nonnegative");
  }

  Scalar base() const { return std::sqrt(L2 * eps); }

  AscentSchedule<Scalar> schedule(const SmoothnessConstants<Scalar>& c) const {
    return AscentSchedule<Scalar>(c, eps1, eps2, N_cap);
  }
};

template <typename Scalar>
struct SafeguardState {
  Scalar alpha_t = 0;
  Scalar e_t = 0;
  long retries = 0;
  Scalar last_zeta = 0;
  Scalar last_g_norm = 0;

  static SafeguardState initial(const IhsdaConfig<Scalar>& cfg) {
    SafeguardState s;
    s.alpha_t = cfg.base();
    s.e_t = cfg.base();
    return s;
  }
};

/// Escalates alpha and tightens the Lanczos budget; e is computed from the
/// updated alpha.
template <typename Scalar>
SafeguardState<Scalar> safeguard_update(const SafeguardState<Scalar>& state, NoDeduce<Scalar> g_norm, NoDeduce<Scalar> zeta,
                                        const IhsdaConfig<Scalar>& cfg) {
  using std::pow;
  using std::sqrt;
  if (state.retries >= cfg.max_retries) {
    throw RetryBudgetExceeded("safeguard_update: retry budget of " + std::to_string(cfg.max_retries) +
                              " exhausted (B_g may be too small or Lanczos failed)");
  }
  const Scalar L = cfg.Lambda;
  SafeguardState<Scalar> s = state;
  s.alpha_t = 3 * cfg.base() + 2 * g_norm * L + (cfg.L1 + zeta) * L * L;
  const Scalar denom = cfg.L1 + s.alpha_t + cfg.B_g;
  s.e_t = std::min(cfg.eps / 4, sqrt(cfg.L2) * pow(cfg.eps, Scalar(2.5)) / (64 * denom * denom));
  s.retries = state.retries + 1;
  s.last_zeta = zeta;
  s.last_g_norm = g_norm;
  return s;
}

/// min(n + 1, ceil(8 sqrt(kappa) log((n + 1) / e))) with kappa estimated from
/// the norm bound 2 (L1 + alpha + B_g) / sqrt(L2 eps).
template <typename Scalar>
long ihsda_lanczos_cap(const IhsdaConfig<Scalar>& cfg, Eigen::Index n, const SafeguardState<Scalar>& s) {
  if (cfg.lanczos_max_iters > 0) return std::min<long>(cfg.lanczos_max_iters, static_cast<long>(n) + 1);
  const Scalar kappa_est = 2 * (cfg.L1 + s.alpha_t + cfg.B_g) / cfg.base();
  return default_lanczos_max_iters(n, s.e_t, kappa_est);
}

/// One outer iteration of the inexact method; `hvp` is the running
/// operator-application count before this step.
template <typename Scalar>
StepResult<Scalar> ihsda_step(const ProblemOracle<Scalar>& oracle, const IhsdaConfig<Scalar>& cfg,
                              const AscentSchedule<Scalar>& schedule, long t, const NoDeduce<Vector<Scalar>>& x,
                              const NoDeduce<Vector<Scalar>>& y_prev, NoDeduce<Scalar> warm, bool is_first,
                              long hvp) {
  using std::abs;
  require(x.size() == oracle.dim_x && y_prev.size() == oracle.dim_y, "ihsda_step: dimension mismatch");
  const Eigen::Index n = oracle.dim_x;
  const long N = iteration_count(schedule, is_first, warm);
  InexactInfo<Scalar> info = run_ascent(oracle, x, y_prev, schedule, N, cfg.yy_tol);
  const Scalar g_norm = info.g.norm();
  const LinearMap<Scalar> H_action = info.H;

  StepResult<Scalar> out;
  out.y = info.y;
  auto& rec = out.record;
  rec.g_norm = double(g_norm);
  rec.grad_norm = rec.g_norm;
  detail::fill_closed_form(oracle, x, rec);
  rec.inner_iters = N;
  if (cfg.snapshots) rec.x = x;

  SafeguardState<Scalar> state = SafeguardState<Scalar>::initial(cfg);
  bool tolerated_cap = false;
  long lanczos_total = 0;
  long calls = 0;
  for (;;) {
    const HomogenizedOperator<Scalar> op(H_action, info.g, state.alpha_t);
    LanczosOptions<Scalar> lo;
    lo.e_budget = state.e_t;
    lo.gap_floor = cfg.base();
    lo.use_gap_certificate = state.retries > 0;
    lo.max_iters = ihsda_lanczos_cap(cfg, n, state);
    lo.seed = derive_seed(cfg.seed, t, state.retries);
    RitzPair<Scalar> pair;
    try {
      pair = lanczos_min_eigenpair(op, lo);
    } catch (const MaxItersExceeded<Scalar>& e) {
      if (tolerated_cap) throw;
      tolerated_cap = true;
      pair = e.best();
    }
    ++calls;
    lanczos_total += pair.lanczos_iters;
    if (cfg.on_lanczos) cfg.on_lanczos(op, pair);

    rec.v_abs = double(abs(pair.v_hat));
    rec.delta_or_zeta = double(pair.zeta);
    rec.alpha = double(state.alpha_t);
    rec.e_budget = double(state.e_t);
    rec.k_norm = double(pair.k.norm());
    rec.rho = double(pair.rho);

    if (!v_above_threshold(pair.u_hat, pair.v_hat, cfg.Lambda)) {
      const Direction<Scalar> dir = classify_direction(pair.u_hat, pair.v_hat, info.g, cfg.omega);
      rec.branch = dir.branch;
      const Scalar s_norm = dir.s.norm();
      if (s_norm <= Scalar(1e-14)) {
        throw NonConvergence("ihsda_step: zero direction below the v threshold");
      }
      out.x_next = x + (cfg.Lambda / s_norm) * dir.s;
      rec.step_norm = double(cfg.Lambda);
      break;
    }
    if (pair.k.norm() <= cfg.eps / 2) {
      const Vector<Scalar> s = pair.u_hat / pair.v_hat;
      out.x_next = x + s;
      out.terminal = true;
      rec.branch = Branch::ratio;
      rec.step_norm = double(s.norm());
      break;
    }
    state = safeguard_update(state, g_norm, pair.zeta, cfg);
  }
  rec.terminal = out.terminal;
  rec.retries = state.retries;
  rec.lanczos_iters = lanczos_total;
  rec.lanczos_calls = calls;
  rec.hvp_cum = hvp + lanczos_total;
  if (oracle.closed_form) rec.F_next = double(oracle.closed_form->F(out.x_next));
  return out;
}

/// Runs the inexact method until a Ritz pair certifies termination or
/// max_outer is reached (best iterate returned, uncertified).
template <typename Scalar>
IterateTrace<Scalar> ihsda_run(const ProblemOracle<Scalar>& oracle, const IhsdaConfig<Scalar>& cfg,
                               const NoDeduce<Vector<Scalar>>& x1, const NoDeduce<Vector<Scalar>>& y0) {
  cfg.validate();
  const AscentSchedule<Scalar> schedule = cfg.schedule(oracle.constants);
  auto step = [&](long t, const Vector<Scalar>& x, const Vector<Scalar>& y, Scalar warm, bool first, long hvp,
                  Termination& reason) {
    reason = Termination::ritz_certified;
    return ihsda_step(oracle, cfg, schedule, t, x, y, warm, first, hvp);
  };
  return detail::outer_loop(oracle, "ihsda", schedule, cfg.max_outer, cfg.warm_dist, cfg.yy_tol, x1, y0, step);
}

}  // namespace hsda
