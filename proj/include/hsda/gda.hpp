#pragma once

#include "hsda/trace.hpp"

namespace hsda {

template <typename Scalar>
struct GdaConfig {
  Scalar step_x = 0;
  Scalar step_y = 0;
  long ascent_steps = 1;
  long max_outer = 200;
  bool snapshots = false;

  /// Two-timescale steps: 1/ell1 on y and 1/(kappa^2 ell1) on x.
  static GdaConfig defaults(const SmoothnessConstants<Scalar>& c) {
    GdaConfig g;
    g.step_y = 1 / c.ell1();
    g.step_x = 1 / (c.kappa() * c.kappa() * c.ell1());
    return g;
  }

  void validate() const {
    require(step_x >= 0 && step_y > 0, "GdaConfig: step_x must be >= 0 and step_y > 0");
    require(ascent_steps >= 1, "GdaConfig: ascent_steps must be at least 1");
    require(max_outer >= 1, "GdaConfig: max_outer must be at least 1");
  }
};

/// Alternating gradient descent ascent: `ascent_steps` plain ascent steps on y
/// followed by one descent step on x.
template <typename Scalar>
IterateTrace<Scalar> gda_run(const ProblemOracle<Scalar>& oracle, const GdaConfig<Scalar>& cfg,
                             const NoDeduce<Vector<Scalar>>& x1, const NoDeduce<Vector<Scalar>>& y0) {
  cfg.validate();
  require(x1.size() == oracle.dim_x && y0.size() == oracle.dim_y, "gda_run: initial point has wrong dimension");
  IterateTrace<Scalar> tr;
  tr.algorithm = "gda";
  tr.problem = oracle.name;
  detail::Stopwatch clock;
  Vector<Scalar> x = x1;
  Vector<Scalar> y = y0;
  try {
    for (long t = 1; t <= cfg.max_outer; ++t) {
      StepRecord<Scalar> rec;
      rec.t = t;
      if (cfg.snapshots) rec.x = x;
      detail::fill_closed_form(oracle, x, rec);
      for (long k = 0; k < cfg.ascent_steps; ++k) y += cfg.step_y * oracle.grad_y(x, y);
      if (!(y.norm() <= Scalar(1e12))) {
        throw NumericalOverflow("gda_run: ||y|| exceeded 1e12 at iteration " + std::to_string(t));
      }
      const Vector<Scalar> gx = oracle.grad_x(x, y);
      rec.g_norm = double(gx.norm());
      if (!oracle.closed_form) rec.grad_norm = rec.g_norm;
      const Vector<Scalar> dx = -cfg.step_x * gx;
      x += dx;
      if (!(x.norm() <= Scalar(1e12))) {
        throw NumericalOverflow("gda_run: ||x|| exceeded 1e12 at iteration " + std::to_string(t));
      }
      rec.step_norm = double(dx.norm());
      rec.inner_iters = cfg.ascent_steps;
      if (oracle.closed_form) rec.F_next = double(oracle.closed_form->F(x));
      rec.wall_ms = clock.ms();
      tr.records.push_back(std::move(rec));
    }
  } catch (const Error& e) {
    tr.reason = Termination::aborted;
    tr.error = e.what();
    tr.x_final = x;
    tr.y_final = y;
    detail::accumulate_totals(tr);
    tr.wall_ms = clock.ms();
    throw RunAborted<Scalar>(std::string("gda aborted: ") + e.what(), std::move(tr));
  }
  tr.reason = Termination::max_outer;
  tr.certified = false;
  tr.x_final = x;
  tr.y_final = y;
  detail::accumulate_totals(tr);
  detail::finalize(oracle, tr);
  tr.wall_ms = clock.ms();
  return tr;
}

}  // namespace hsda
