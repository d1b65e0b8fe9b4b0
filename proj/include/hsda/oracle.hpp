#pragma once

#include "hsda/core.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <string>

namespace hsda {

/// Problem constants of a nonconvex-strongly-concave objective: the
/// strong-concavity modulus mu, the joint-gradient Lipschitz constant ell1 and
/// the Hessian-block Lipschitz constant ell2.
template <typename Scalar>
class SmoothnessConstants {
 public:
  SmoothnessConstants(Scalar mu, Scalar ell1, Scalar ell2) : mu_(mu), ell1_(ell1), ell2_(ell2) {
    require(mu > 0, "SmoothnessConstants: mu must be positive");
    require(ell1 >= mu, "SmoothnessConstants: ell1 must be >= mu");
    require(ell2 >= 0, "SmoothnessConstants: ell2 must be nonnegative");
  }

  Scalar mu() const { return mu_; }
  Scalar ell1() const { return ell1_; }
  Scalar ell2() const { return ell2_; }

  Scalar kappa() const { return ell1_ / mu_; }
  /// Lipschitz constant of the value-function gradient.
  Scalar L1() const { return (kappa() + 1) * ell1_; }
  /// Lipschitz constant of the Schur-complement surrogate H(x, y).
  Scalar LH() const { return ell2_ * (1 + kappa()) * (1 + kappa()); }
  /// Lipschitz constant of the value-function Hessian.
  Scalar L2() const { return ell2_ * (1 + kappa()) * (1 + kappa()) * (1 + kappa()); }

 private:
  Scalar mu_;
  Scalar ell1_;
  Scalar ell2_;
};

/// Closed-form value function F(x) = max_y f(x, y), available on test problems.
template <typename Scalar>
struct ValueFunctionOracle {
  std::function<Scalar(const Vector<Scalar>&)> F;
  std::function<Vector<Scalar>(const Vector<Scalar>&)> grad_F;
  std::function<Matrix<Scalar>(const Vector<Scalar>&)> hess_F;
  std::function<Vector<Scalar>(const Vector<Scalar>&)> y_star;
  Scalar F_inf = 0;
  /// Exact Lipschitz constant of hess_F when the problem knows one. Usually
  /// far smaller than SmoothnessConstants::L2(), which is a generic bound.
  std::optional<Scalar> hessian_lipschitz;
};

/// The only way algorithms touch a problem: values, partial gradients and the
/// four Hessian-block actions.
template <typename Scalar>
struct ProblemOracle {
  using Vec = Vector<Scalar>;

  std::string name;
  Eigen::Index dim_x = 0;
  Eigen::Index dim_y = 0;

  std::function<Scalar(const Vec&, const Vec&)> f;
  std::function<Vec(const Vec&, const Vec&)> grad_x;
  std::function<Vec(const Vec&, const Vec&)> grad_y;
  std::function<Vec(const Vec&, const Vec&, const Vec&)> hess_xx_vec;
  std::function<Vec(const Vec&, const Vec&, const Vec&)> hess_xy_vec;  // takes a y-vector
  std::function<Vec(const Vec&, const Vec&, const Vec&)> hess_yx_vec;  // takes an x-vector
  std::function<Vec(const Vec&, const Vec&, const Vec&)> hess_yy_vec;

  SmoothnessConstants<Scalar> constants{1, 1, 0};
  std::optional<ValueFunctionOracle<Scalar>> closed_form;

  bool has_closed_form() const { return closed_form.has_value(); }
};

/// y-block size at or below which the y-Hessian is factorized densely.
inline constexpr Eigen::Index kDirectYySolveMaxDim = 64;
/// Largest x-dimension for which H is materialized densely.
inline constexpr Eigen::Index kDenseThreshold = 512;

/// Solver for hess_yy(x, y) z = w at a fixed point. Small y-blocks are
/// factorized once (Cholesky of the negated block); larger ones use conjugate
/// gradient on the negated operator.
template <typename Scalar>
class YySolver {
 public:
  using Vec = Vector<Scalar>;

  YySolver(const ProblemOracle<Scalar>& oracle, Vec x, Vec y, Scalar tol = Scalar(1e-12))
      : oracle_(&oracle), x_(std::move(x)), y_(std::move(y)), tol_(tol) {
    require(tol > 0, "yy_solve: tol must be positive");
    const Eigen::Index m = oracle.dim_y;
    if (m <= kDirectYySolveMaxDim) {
      Matrix<Scalar> neg(m, m);
      Vec e = Vec::Zero(m);
      for (Eigen::Index j = 0; j < m; ++j) {
        e.setZero();
        e(j) = 1;
        neg.col(j) = -oracle.hess_yy_vec(x_, y_, e);
      }
      neg = ((neg + neg.transpose()) / 2).eval();
      llt_ = std::make_shared<Eigen::LLT<Matrix<Scalar>>>(neg);
      if (llt_->info() != Eigen::Success) {
        throw NonConvergence("yy_solve: y-Hessian is not negative definite at this point");
      }
    }
  }

  bool direct() const { return static_cast<bool>(llt_); }

  /// Returns z with hess_yy z = w.
  Vec solve(const Vec& w) const {
    if (llt_) return -llt_->solve(w);
    return conjugate_gradient(w);
  }

  /// CG iteration cap, 20 * sqrt(ell1 / mu) * log(1 / tol).
  long cg_iteration_cap() const {
    const auto& c = oracle_->constants;
    return static_cast<long>(
        std::ceil(20 * std::sqrt(c.ell1() / c.mu()) * std::log(1 / tol_)));
  }

 private:
  // Solves (-hess_yy) z = -w.
  Vec conjugate_gradient(const Vec& w) const {
    const Scalar wnorm = w.norm();
    Vec z = Vec::Zero(w.size());
    if (wnorm == 0) return z;
    auto apply = [&](const Vec& p) -> Vec { return -oracle_->hess_yy_vec(x_, y_, p); };
    Vec r = -w;  // residual of A z = -w at z = 0
    Vec p = r;
    Scalar rr = r.squaredNorm();
    const Scalar target = tol_ * wnorm;
    const long cap = std::max<long>(1, cg_iteration_cap());
    for (long it = 0; it < cap; ++it) {
      Vec ap = apply(p);
      const Scalar pap = p.dot(ap);
      if (!(pap > 0)) {
        throw NonConvergence("yy_solve: y-Hessian is not negative definite along a CG direction");
      }
      const Scalar step = rr / pap;
      z += step * p;
      r -= step * ap;
      const Scalar rr_next = r.squaredNorm();
      if (std::sqrt(rr_next) <= target) return z;
      p = r + (rr_next / rr) * p;
      rr = rr_next;
    }
    throw NonConvergence("yy_solve: CG did not reach relative residual " + std::to_string(double(tol_)) +
                         " within " + std::to_string(cap) +
                         " iterations (check mu and ell1)");
  }

  const ProblemOracle<Scalar>* oracle_;
  Vec x_;
  Vec y_;
  Scalar tol_;
  std::shared_ptr<Eigen::LLT<Matrix<Scalar>>> llt_;
};

/// The Schur-complement surrogate H(x, y) = hxx - hxy (hyy)^{-1} hyx as a
/// matrix-free operator on x-vectors.
template <typename Scalar>
class SchurOperator {
 public:
  using Vec = Vector<Scalar>;

  SchurOperator(const ProblemOracle<Scalar>& oracle, const Vec& x, const Vec& y,
                Scalar tol = Scalar(1e-12))
      : oracle_(&oracle), x_(x), y_(y), yy_(oracle, x, y, tol) {}

  Eigen::Index dim() const { return oracle_->dim_x; }

  Vec operator()(const Vec& v) const {
    Vec w = oracle_->hess_yx_vec(x_, y_, v);
    Vec z = yy_.solve(w);
    return oracle_->hess_xx_vec(x_, y_, v) - oracle_->hess_xy_vec(x_, y_, z);
  }

  const Vec& x() const { return x_; }
  const Vec& y() const { return y_; }
  const ProblemOracle<Scalar>& oracle() const { return *oracle_; }

 private:
  const ProblemOracle<Scalar>* oracle_;
  Vec x_;
  Vec y_;
  YySolver<Scalar> yy_;
};

template <typename Scalar>
Vector<Scalar> yy_solve(const ProblemOracle<Scalar>& oracle, const NoDeduce<Vector<Scalar>>& x,
                        const NoDeduce<Vector<Scalar>>& y, const NoDeduce<Vector<Scalar>>& w,
                        NoDeduce<Scalar> tol = Scalar(1e-12)) {
  return YySolver<Scalar>(oracle, x, y, tol).solve(w);
}

template <typename Scalar>
Vector<Scalar> H_vec(const ProblemOracle<Scalar>& oracle, const NoDeduce<Vector<Scalar>>& x,
                     const NoDeduce<Vector<Scalar>>& y, const NoDeduce<Vector<Scalar>>& v,
                     NoDeduce<Scalar> tol = Scalar(1e-12)) {
  return SchurOperator<Scalar>(oracle, x, y, tol)(v);
}

/// Materializes H column by column and symmetrizes it.
template <typename Scalar>
Matrix<Scalar> H_dense(const SchurOperator<Scalar>& op, Eigen::Index threshold = kDenseThreshold) {
  const Eigen::Index n = op.dim();
  if (n > threshold) {
    throw DimensionTooLarge("H_dense: n = " + std::to_string(n) + " exceeds dense threshold " +
                            std::to_string(threshold));
  }
  Matrix<Scalar> h(n, n);
  Vector<Scalar> e = Vector<Scalar>::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    e.setZero();
    e(j) = 1;
    h.col(j) = op(e);
  }
  return (h + h.transpose()) / 2;
}

template <typename Scalar>
Matrix<Scalar> H_dense(const ProblemOracle<Scalar>& oracle, const NoDeduce<Vector<Scalar>>& x,
                       const NoDeduce<Vector<Scalar>>& y, NoDeduce<Scalar> tol = Scalar(1e-12),
                       Eigen::Index threshold = kDenseThreshold) {
  if (oracle.dim_x > threshold) {
    throw DimensionTooLarge("H_dense: n = " + std::to_string(oracle.dim_x) +
                            " exceeds dense threshold " + std::to_string(threshold));
  }
  return H_dense(SchurOperator<Scalar>(oracle, x, y, tol), threshold);
}

}  // namespace hsda
