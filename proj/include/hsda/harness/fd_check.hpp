#pragma once

#include "hsda/oracle.hpp"

#include <cstdint>

namespace hsda::harness {

struct FdReport {
  double max_grad_err = 0;
  double max_hess_err = 0;
  double max_F_err = 0;  // closed-form F against the inner maximization
  int points = 0;
  long ascent_steps = 0;
};

/// F(x) by accelerated ascent on f(x, .) from y = 0, for at most
/// ceil(50 sqrt(kappa) log(1e12)) steps (earlier once grad_y vanishes).
double value_by_ascent(const ProblemOracle<double>& oracle, const VectorXd& x, long* steps_used = nullptr);

/// Compares closed-form grad F and hess F with central differences of the
/// ascent-evaluated F at `points` uniform points of [-box, box]^n.
FdReport fd_check(const ProblemOracle<double>& oracle, int points, double step, std::uint64_t seed,
                  double box = 1.0);

}  // namespace hsda::harness
