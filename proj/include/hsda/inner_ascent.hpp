#pragma once

#include "hsda/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace hsda {

/// Step sizes and accuracy target of the accelerated ascent on y.
template <typename Scalar>
struct AscentSchedule {
  Scalar eta1 = 0;
  Scalar eta2 = 0;
  Scalar eps1 = 0;
  Scalar eps2 = 0;
  Scalar A = 0;
  Scalar kappa = 1;
  long N_cap = 1;

  AscentSchedule() = default;

  /// N_cap <= 0 selects the default 10 * ceil(2 sqrt(kappa) log(1e8)).
  AscentSchedule(const SmoothnessConstants<Scalar>& c, Scalar eps1_, Scalar eps2_, long N_cap_ = 0)
      : eps1(eps1_), eps2(eps2_), kappa(c.kappa()) {
    require(eps1_ > 0 && eps2_ > 0, "AscentSchedule: accuracies must be positive");
    using std::sqrt;
    const Scalar sk = sqrt(kappa);
    eta1 = 1 / c.ell1();
    eta2 = (sk - 1) / (sk + 1);
    // LH = 0 gives +inf on the right, leaving the gradient bound.
    A = std::min(eps1 / c.ell1(), eps2 / (2 * c.LH()));
    N_cap = N_cap_ > 0 ? N_cap_ : 10 * static_cast<long>(std::ceil(2 * sk * std::log(Scalar(1e8))));
  }
};

/// Number of ascent steps. `warm_dist` is a bound on ||y0 - y*(x1)|| on the
/// first call and ||x_t - x_{t-1}|| afterwards.
template <typename Scalar>
long iteration_count(const AscentSchedule<Scalar>& s, bool is_first, NoDeduce<Scalar> warm_dist) {
  using std::log;
  using std::sqrt;
  const Scalar lead = sqrt(s.kappa + 1);
  const Scalar num = is_first ? lead * warm_dist : lead * (s.A + s.kappa * warm_dist);
  const Scalar arg = num / s.A;
  if (!(arg > 1)) return 1;
  const Scalar raw = std::ceil(2 * sqrt(s.kappa) * log(arg));
  if (!(raw < Scalar(s.N_cap))) return s.N_cap;
  return std::max<long>(1, static_cast<long>(raw));
}

template <typename Scalar>
struct InexactInfo {
  Vector<Scalar> y;
  Vector<Scalar> g;
  SchurOperator<Scalar> H;
  long N_used = 0;
};

/// Runs exactly N momentum steps of accelerated ascent on f(x, .) from y_init.
template <typename Scalar>
InexactInfo<Scalar> run_ascent(const ProblemOracle<Scalar>& oracle, const NoDeduce<Vector<Scalar>>& x,
                               const NoDeduce<Vector<Scalar>>& y_init, const AscentSchedule<Scalar>& s, long N,
                               NoDeduce<Scalar> yy_tol = Scalar(1e-12)) {
  require(N >= 1, "run_ascent: N must be at least 1");
  require(y_init.size() == oracle.dim_y, "run_ascent: y_init has wrong dimension");
  Vector<Scalar> y = y_init;
  Vector<Scalar> y_tilde = y_init;
  for (long i = 0; i < N; ++i) {
    Vector<Scalar> y_next = y_tilde + s.eta1 * oracle.grad_y(x, y_tilde);
    y_tilde = y_next + s.eta2 * (y_next - y);
    y = std::move(y_next);
    const Scalar ny = y.norm();
    if (!(ny <= Scalar(1e12))) {
      throw NumericalOverflow("run_ascent: ||y|| exceeded 1e12 at step " + std::to_string(i + 1) +
                              " (step size too large or f not concave in y)");
    }
  }
  Vector<Scalar> g = oracle.grad_x(x, y);
  return InexactInfo<Scalar>{y, std::move(g), SchurOperator<Scalar>(oracle, x, y, yy_tol), N};
}

}  // namespace hsda
