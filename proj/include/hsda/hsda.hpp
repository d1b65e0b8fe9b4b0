#pragma once

#include "hsda/homogeneous.hpp"
#include "hsda/inner_ascent.hpp"
#include "hsda/trace.hpp"

#include <cmath>
#include <limits>

namespace hsda {

/// Parameters of the exact method. `L2` is whichever Lipschitz constant of the
/// value-function Hessian the caller trusts; the generic bound
/// SmoothnessConstants::L2() is always valid but usually very loose.
template <typename Scalar>
struct HsdaConfig {
  Scalar eps = 0;
  Scalar L2 = 0;
  Scalar omega = Scalar(0.3);
  Scalar alpha = 0;
  Scalar Lambda = 0;
  Scalar eps1 = 0;
  Scalar eps2 = 0;
  long max_outer = 1000;
  Scalar warm_dist = 10;
  long N_cap = 0;  // <= 0: schedule default
  Scalar yy_tol = Scalar(1e-12);
  bool snapshots = false;

  static HsdaConfig standard(Scalar eps, Scalar L2, Scalar omega = Scalar(0.3)) {
    using std::sqrt;
    require(eps > 0 && L2 > 0, "HsdaConfig: eps and L2 must be positive");
    require(eps <= std::min(L2 / 2, Scalar(1)), "HsdaConfig: eps must satisfy eps <= min(L2/2, 1)");
    HsdaConfig c;
    c.eps = eps;
    c.L2 = L2;
    c.omega = omega;
    c.alpha = sqrt(L2 * eps);
    c.Lambda = sqrt(eps / L2);
    c.eps1 = eps / 12;
    c.eps2 = sqrt(L2 * eps) / 12;
    c.validate();
    return c;
  }

  void validate() const {
    require(eps > 0 && L2 > 0, "HsdaConfig: eps and L2 must be positive");
    require(eps <= std::min(L2 / 2, Scalar(1)), "HsdaConfig: eps must satisfy eps <= min(L2/2, 1)");
    require(omega > 0 && omega < Scalar(0.5), "HsdaConfig: omega must lie in (0, 1/2)");
    require(Lambda > 0 && Lambda <= std::sqrt(Scalar(0.5)) + Scalar(1e-15), "HsdaConfig: Lambda must lie in (0, sqrt(2)/2]");
    require(alpha > 0 && eps1 > 0 && eps2 > 0, "HsdaConfig: alpha, eps1, eps2 must be positive");
    require(max_outer >= 1, "HsdaConfig: max_outer must be at least 1");
    require(warm_dist >= 0, "HsdaConfig: warm_dist must be nonnegative");
  }

  AscentSchedule<Scalar> schedule(const SmoothnessConstants<Scalar>& c) const {
    return AscentSchedule<Scalar>(c, eps1, eps2, N_cap);
  }
};

template <typename Scalar>
struct StepResult {
  Vector<Scalar> x_next;
  Vector<Scalar> y;
  StepRecord<Scalar> record;
  bool terminal = false;
};

/// ||u|| < Lambda |v|, i.e. |v| > 1 / sqrt(1 + Lambda^2) for a unit [u; v],
/// without the cancellation of the square-root form.
template <typename Scalar>
bool v_above_threshold(const Vector<Scalar>& u, Scalar v, Scalar Lambda) {
  using std::abs;
  return u.norm() < Lambda * abs(v);
}

/// One outer iteration of the exact method from (x_t, y_prev).
template <typename Scalar>
StepResult<Scalar> hsda_step(const ProblemOracle<Scalar>& oracle, const HsdaConfig<Scalar>& cfg,
                             const AscentSchedule<Scalar>& schedule, const NoDeduce<Vector<Scalar>>& x,
                             const NoDeduce<Vector<Scalar>>& y_prev, NoDeduce<Scalar> warm, bool is_first) {
  using std::abs;
  require(x.size() == oracle.dim_x && y_prev.size() == oracle.dim_y, "hsda_step: dimension mismatch");
  const long N = iteration_count(schedule, is_first, warm);
  InexactInfo<Scalar> info = run_ascent(oracle, x, y_prev, schedule, N, cfg.yy_tol);
  const Matrix<Scalar> H = H_dense(info.H);
  const ExactEigenpair<Scalar> pair = solve_exact(H, info.g, cfg.alpha);

  StepResult<Scalar> out;
  out.y = info.y;
  auto& rec = out.record;
  rec.g_norm = double(info.g.norm());
  rec.grad_norm = rec.g_norm;
  detail::fill_closed_form(oracle, x, rec);
  rec.v_abs = double(abs(pair.v));
  rec.delta_or_zeta = double(pair.delta);
  rec.inner_iters = N;
  rec.alpha = double(cfg.alpha);
  if (cfg.snapshots) rec.x = x;

  const Direction<Scalar> dir = classify_direction(pair.u, pair.v, info.g, cfg.omega);
  rec.branch = dir.branch;
  const Scalar s_norm = dir.s.norm();
  if (v_above_threshold(pair.u, pair.v, cfg.Lambda) || s_norm <= Scalar(1e-14)) {
    out.x_next = x + dir.s;
    out.terminal = true;
    rec.step_norm = double(s_norm);
  } else {
    out.x_next = x + (cfg.Lambda / s_norm) * dir.s;
    rec.step_norm = double(cfg.Lambda);
  }
  rec.terminal = out.terminal;
  if (oracle.closed_form) rec.F_next = double(oracle.closed_form->F(out.x_next));
  return out;
}

namespace detail {

/// Outer loop shared by the exact and inexact drivers. `step` maps
/// (t, x, y, warm, is_first, hvp_so_far) to a StepResult and reports the
/// termination reason of terminal steps.
template <typename Scalar, typename StepFn>
IterateTrace<Scalar> outer_loop(const ProblemOracle<Scalar>& oracle, const std::string& algorithm,
                                const AscentSchedule<Scalar>& schedule, long max_outer, Scalar warm_dist,
                                Scalar yy_tol, const Vector<Scalar>& x1, const Vector<Scalar>& y0,
                                StepFn step) {
  require(x1.size() == oracle.dim_x && y0.size() == oracle.dim_y, "run: initial point has wrong dimension");
  IterateTrace<Scalar> tr;
  tr.algorithm = algorithm;
  tr.problem = oracle.name;
  Stopwatch clock;
  Vector<Scalar> x = x1;
  Vector<Scalar> y = y0;
  Vector<Scalar> x_prev = x1;
  Vector<Scalar> best_x = x1;
  Vector<Scalar> best_y = y0;
  double best_grad = std::numeric_limits<double>::infinity();
  long hvp = 0;
  bool done = false;
  Termination reason = Termination::max_outer;
  try {
    for (long t = 1; t <= max_outer && !done; ++t) {
      const bool first = t == 1;
      const Scalar warm = first ? warm_dist : (x - x_prev).norm();
      StepResult<Scalar> r = step(t, x, y, warm, first, hvp, reason);
      r.record.t = t;
      hvp = r.record.hvp_cum;
      r.record.wall_ms = clock.ms();
      if (r.record.grad_norm < best_grad) {
        best_grad = r.record.grad_norm;
        best_x = x;
        best_y = r.y;
      }
      tr.records.push_back(std::move(r.record));
      x_prev = x;
      x = std::move(r.x_next);
      y = std::move(r.y);
      done = r.terminal;
    }
  } catch (const Error& e) {
    tr.reason = Termination::aborted;
    tr.error = e.what();
    tr.x_final = x;
    tr.y_final = y;
    detail::accumulate_totals(tr);
    tr.wall_ms = clock.ms();
    throw RunAborted<Scalar>(std::string(algorithm) + " aborted: " + e.what(), std::move(tr));
  }

  if (done) {
    tr.reason = reason;
    tr.certified = true;
    tr.x_final = x;
    // y at the returned point, warm-started from the last inner solution.
    const Scalar warm = (x - x_prev).norm();
    const long N = iteration_count(schedule, false, warm);
    tr.y_final = run_ascent(oracle, x, y, schedule, N, yy_tol).y;
  } else {
    tr.reason = Termination::max_outer;
    tr.certified = false;
    tr.x_final = best_x;
    tr.y_final = best_y;
  }
  detail::accumulate_totals(tr);
  detail::finalize(oracle, tr);
  tr.wall_ms = clock.ms();
  return tr;
}

}  // namespace detail

/// Runs the exact method until the v-threshold test fires or max_outer is
/// reached. In the latter case the iterate with the smallest recorded gradient
/// norm is returned, uncertified.
template <typename Scalar>
IterateTrace<Scalar> hsda_run(const ProblemOracle<Scalar>& oracle, const HsdaConfig<Scalar>& cfg,
                              const NoDeduce<Vector<Scalar>>& x1, const NoDeduce<Vector<Scalar>>& y0) {
  cfg.validate();
  const AscentSchedule<Scalar> schedule = cfg.schedule(oracle.constants);
  const long n = static_cast<long>(oracle.dim_x);
  auto step = [&](long, const Vector<Scalar>& x, const Vector<Scalar>& y, Scalar warm, bool first, long hvp,
                  Termination& reason) {
    StepResult<Scalar> r = hsda_step(oracle, cfg, schedule, x, y, warm, first);
    r.record.hvp_cum = hvp + n;
    reason = Termination::v_threshold;
    return r;
  };
  return detail::outer_loop(oracle, "hsda", schedule, cfg.max_outer, cfg.warm_dist, cfg.yy_tol, x1, y0, step);
}

}  // namespace hsda
