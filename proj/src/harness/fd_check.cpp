#include "hsda/harness/fd_check.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace hsda::harness {

double value_by_ascent(const ProblemOracle<double>& o, const VectorXd& x, long* steps_used) {
  const auto& c = o.constants;
  const double sk = std::sqrt(c.kappa());
  const double eta1 = 1 / c.ell1();
  const double eta2 = (sk - 1) / (sk + 1);
  const long cap = static_cast<long>(std::ceil(50 * sk * std::log(1e12)));
  VectorXd y = VectorXd::Zero(o.dim_y);
  VectorXd y_tilde = y;
  long k = 0;
  for (; k < cap; ++k) {
    const VectorXd gy = o.grad_y(x, y_tilde);
    if (gy.norm() == 0) break;
    VectorXd y_next = y_tilde + eta1 * gy;
    y_tilde = y_next + eta2 * (y_next - y);
    if (y_next == y) {
      y = std::move(y_next);
      break;
    }
    y = std::move(y_next);
  }
  if (steps_used) *steps_used = k;
  return o.f(x, y);
}

FdReport fd_check(const ProblemOracle<double>& o, int points, double step, std::uint64_t seed, double box) {
  require(o.has_closed_form(), "fd_check: needs a closed-form value function");
  require(step > 0, "fd_check: step must be positive");
  require(points >= 1, "fd_check: points must be positive");
  const auto& cf = *o.closed_form;
  const Eigen::Index n = o.dim_x;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-box, box);
  FdReport rep;
  rep.points = points;
  const double h = step;
  for (int p = 0; p < points; ++p) {
    VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = unif(rng);
    long used = 0;
    auto F = [&](const VectorXd& z) {
      long s = 0;
      const double v = value_by_ascent(o, z, &s);
      used = std::max(used, s);
      return v;
    };
    const double f0 = F(x);
    rep.max_F_err = std::max(rep.max_F_err, std::abs(f0 - cf.F(x)));
    VectorXd fp(n), fm(n);
    VectorXd g_fd(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      VectorXd e = VectorXd::Zero(n);
      e(i) = h;
      fp(i) = F(x + e);
      fm(i) = F(x - e);
      g_fd(i) = (fp(i) - fm(i)) / (2 * h);
    }
    MatrixXd H_fd(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      H_fd(i, i) = (fp(i) - 2 * f0 + fm(i)) / (h * h);
      for (Eigen::Index j = i + 1; j < n; ++j) {
        VectorXd ei = VectorXd::Zero(n), ej = VectorXd::Zero(n);
        ei(i) = h;
        ej(j) = h;
        const double v = (F(x + ei + ej) - F(x + ei - ej) - F(x - ei + ej) + F(x - ei - ej)) / (4 * h * h);
        H_fd(i, j) = v;
        H_fd(j, i) = v;
      }
    }
    rep.max_grad_err = std::max(rep.max_grad_err, (g_fd - cf.grad_F(x)).cwiseAbs().maxCoeff());
    rep.max_hess_err = std::max(rep.max_hess_err, (H_fd - cf.hess_F(x)).cwiseAbs().maxCoeff());
    rep.ascent_steps = std::max(rep.ascent_steps, used);
  }
  return rep;
}

}  // namespace hsda::harness
