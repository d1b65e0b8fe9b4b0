#pragma once

#include "hsda/homogeneous.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

namespace hsda {

/// Approximate leftmost eigenpair of G(alpha) with its residual split as
/// G [u; v] + zeta [u; v] = [k; rho].
template <typename Scalar>
struct RitzPair {
  Scalar zeta = 0;
  Vector<Scalar> u_hat;
  Scalar v_hat = 0;
  Vector<Scalar> k;
  Scalar rho = 0;
  Scalar e_budget = 0;
  long lanczos_iters = 0;
  Scalar residual_norm = 0;
  Scalar ritz_gap = 0;  // second minus first Ritz value; +inf after one step
  bool breakdown = false;
};

template <typename Scalar>
class MaxItersExceeded : public NonConvergence {
 public:
  MaxItersExceeded(const std::string& what, RitzPair<Scalar> best)
      : NonConvergence(what), best_(std::move(best)) {}
  const RitzPair<Scalar>& best() const { return best_; }

 private:
  RitzPair<Scalar> best_;
};

template <typename Scalar>
struct LanczosOptions {
  Scalar e_budget = Scalar(1e-8);
  long max_iters = 0;  // <= 0 means n + 1
  Scalar gap_floor = 0;
  /// Accept ||r||^2 / max(gap, gap_floor) <= e_budget in addition to ||r|| <= e_budget.
  bool use_gap_certificate = false;
  std::uint64_t seed = 0;
};

/// Mixes a run seed with the outer iteration and retry indices.
inline std::uint64_t derive_seed(std::uint64_t seed, long t, long retry) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(retry)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (std::uint64_t(out[0]) << 32) | out[1];
}

/// min(n + 1, ceil(8 sqrt(kappa_est) log((n + 1) / e))).
template <typename Scalar>
long default_lanczos_max_iters(Eigen::Index n, Scalar e_budget, NoDeduce<Scalar> kappa_est) {
  using std::log;
  using std::sqrt;
  const long hard = static_cast<long>(n) + 1;
  const Scalar k = std::max(kappa_est, Scalar(1));
  const Scalar raw = std::ceil(8 * sqrt(k) * log(Scalar(n + 1) / e_budget));
  if (!(raw < Scalar(hard))) return hard;
  return std::max<long>(1, static_cast<long>(raw));
}

/// Lanczos with full reorthogonalization from the start vector
/// normalize([r; ||r||]), r standard Gaussian.
template <typename Scalar>
RitzPair<Scalar> lanczos_min_eigenpair(const HomogenizedOperator<Scalar>& op,
                                       const LanczosOptions<Scalar>& opt) {
  using std::abs;
  using std::sqrt;
  using Vec = Vector<Scalar>;
  require(opt.e_budget > 0, "lanczos_min_eigenpair: e_budget must be positive");
  const Eigen::Index N = op.dim();
  const Eigen::Index n = N - 1;
  require(n >= 1, "lanczos_min_eigenpair: empty x-space");
  const long hard = static_cast<long>(N);
  const long cap = opt.max_iters > 0 ? std::min(opt.max_iters, hard) : hard;

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec q(N);
  for (Eigen::Index i = 0; i < n; ++i) q(i) = Scalar(normal(rng));
  q(n) = q.head(n).norm();
  q.normalize();

  Matrix<Scalar> V(N, cap);
  Matrix<Scalar> W(N, cap);
  Vec diag(cap);
  Vec sub(cap);

  auto extract = [&](long m, const Vec& y, Scalar gap, bool broke) {
    Vec z = V.leftCols(m) * y;
    const Scalar zn = z.norm();
    z /= zn;
    Vec gz = W.leftCols(m) * y / zn;
    const Scalar theta = z.dot(gz);
    Vec r = gz - theta * z;
    RitzPair<Scalar> p;
    p.zeta = -theta;
    p.u_hat = z.head(n);
    p.v_hat = z(n);
    p.k = r.head(n);
    p.rho = r(n);
    if (normalize_sign(p.u_hat, p.v_hat)) {
      p.k = -p.k;
      p.rho = -p.rho;
    }
    p.e_budget = opt.e_budget;
    p.lanczos_iters = m;
    p.residual_norm = r.norm();
    p.ritz_gap = gap;
    p.breakdown = broke;
    return p;
  };

  Scalar beta_prev = 0;
  for (long j = 0; j < cap; ++j) {
    V.col(j) = q;
    Vec w = op(q);
    W.col(j) = w;
    const Scalar a = q.dot(w);
    diag(j) = a;
    Vec r = w - a * q;
    if (j > 0) r -= beta_prev * V.col(j - 1);
    for (int pass = 0; pass < 2; ++pass) {
      r -= V.leftCols(j + 1) * (V.leftCols(j + 1).transpose() * r);
    }
    const Scalar beta = r.norm();
    sub(j) = beta;

    const long m = j + 1;
    Vec y;
    Scalar gap = infinity<Scalar>();
    Scalar scale = abs(diag(0));
    if (m == 1) {
      y = Vec::Ones(1);
    } else {
      Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es;
      Vec d = diag.head(m);
      Vec e = sub.head(m - 1);
      es.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
      if (es.info() != Eigen::Success) {
        throw EigensolverFailure("lanczos_min_eigenpair: tridiagonal eigensolver failed");
      }
      gap = es.eigenvalues()(1) - es.eigenvalues()(0);
      y = es.eigenvectors().col(0);
      scale = std::max(abs(es.eigenvalues()(0)), abs(es.eigenvalues()(m - 1)));
    }
    const Scalar res = abs(beta * y(m - 1));
    const bool broke = beta <= Scalar(1e-13) * std::max(Scalar(1), scale);
    bool done = broke || res <= opt.e_budget || m == hard;
    if (!done && opt.use_gap_certificate && m > 1) {
      done = res * res / std::max(gap, opt.gap_floor) <= opt.e_budget;
    }
    if (done) return extract(m, y, gap, broke);
    if (m == cap) {
      throw MaxItersExceeded<Scalar>("lanczos_min_eigenpair: no certificate within " + std::to_string(cap) +
                                         " iterations",
                                     extract(m, y, gap, false));
    }
    q = r / beta;
    beta_prev = beta;
  }
  throw NonConvergence("lanczos_min_eigenpair: unreachable");
}

}  // namespace hsda
