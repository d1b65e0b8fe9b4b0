#pragma once

#include "hsda/oracle.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <random>

namespace hsda {

// ---------------------------------------------------------------------------
// W-shaped toy problem
//   f(x, y) = w(x3) - y1^2/40 + x1 y1 - 5 y2^2/2 + x2 y2,  x in R^3, y in R^2.

template <typename Scalar>
struct WToyParams {
  Scalar eps_w = Scalar(0.01);
  Scalar L_w = 5;

  Scalar c_eps() const { return (3 * L_w + 1) / 3 * std::pow(eps_w, Scalar(1.5)); }
};

template <typename Scalar>
struct WValue {
  Scalar w = 0;
  Scalar d1 = 0;
  Scalar d2 = 0;
};

/// The six-branch piecewise cubic and its first two derivatives. Branches use
/// half-open intervals; the shared endpoint L sqrt(eps) goes to the linear piece.
template <typename Scalar>
WValue<Scalar> w_eval(const WToyParams<Scalar>& p, Scalar x) {
  using std::sqrt;
  const Scalar e = p.eps_w;
  const Scalar se = sqrt(e);
  const Scalar L = p.L_w;
  const Scalar c = p.c_eps();
  if (x <= -L * se) {
    const Scalar t = x + (L + 1) * se;
    return {se * t * t - t * t * t / 3 - c, 2 * se * t - t * t, 2 * se - 2 * t};
  }
  if (x <= -se) return {e * x + e * se / 3, e, 0};
  if (x <= 0) return {-se * x * x - x * x * x / 3, -2 * se * x - x * x, -2 * se - 2 * x};
  if (x <= se) return {-se * x * x + x * x * x / 3, -2 * se * x + x * x, -2 * se + 2 * x};
  if (x <= L * se) return {-e * x + e * se / 3, -e, 0};
  const Scalar t = x - (L + 1) * se;
  return {se * t * t + t * t * t / 3 - c, 2 * se * t + t * t, 2 * se + 2 * t};
}

/// Constants of the W problem. The y-block is diag(-1/20, -5), so mu = 1/20.
/// The (x1, y1) and (x2, y2) blocks have spectral norms
/// (1/20 + sqrt(1/400 + 4))/2 and (5 + sqrt(29))/2; |w''| <= 2 (L + 2) sqrt(eps)
/// while |x3| <= 2 (L + 1) sqrt(eps), a box containing both minimizers.
/// w'' is piecewise linear with slopes in {-2, 0, 2}, so ell2 = 2.
template <typename Scalar>
SmoothnessConstants<Scalar> wtoy_constants(const WToyParams<Scalar>& p) {
  using std::sqrt;
  const Scalar b1 = (Scalar(1) / 20 + sqrt(Scalar(1) / 400 + 4)) / 2;
  const Scalar b2 = (5 + sqrt(Scalar(29))) / 2;
  const Scalar b3 = 2 * (p.L_w + 2) * sqrt(p.eps_w);
  return SmoothnessConstants<Scalar>(Scalar(1) / 20, std::max({b1, b2, b3}), Scalar(2));
}

template <typename Scalar>
ProblemOracle<Scalar> make_wtoy(const WToyParams<Scalar>& p) {
  using Vec = Vector<Scalar>;
  require(p.eps_w > 0, "make_wtoy: eps_w must be positive");
  require(p.L_w > 1, "make_wtoy: L_w must exceed 1");
  ProblemOracle<Scalar> o;
  o.name = "wtoy";
  o.dim_x = 3;
  o.dim_y = 2;
  o.f = [p](const Vec& x, const Vec& y) {
    return w_eval(p, x(2)).w - y(0) * y(0) / 40 + x(0) * y(0) - 5 * y(1) * y(1) / 2 + x(1) * y(1);
  };
  o.grad_x = [p](const Vec& x, const Vec& y) -> Vec { return Vec{{y(0), y(1), w_eval(p, x(2)).d1}}; };
  o.grad_y = [](const Vec& x, const Vec& y) -> Vec { return Vec{{-y(0) / 20 + x(0), -5 * y(1) + x(1)}}; };
  o.hess_xx_vec = [p](const Vec& x, const Vec&, const Vec& v) -> Vec {
    return Vec{{Scalar(0), Scalar(0), w_eval(p, x(2)).d2 * v(2)}};
  };
  o.hess_xy_vec = [](const Vec&, const Vec&, const Vec& z) -> Vec { return Vec{{z(0), z(1), Scalar(0)}}; };
  o.hess_yx_vec = [](const Vec&, const Vec&, const Vec& v) -> Vec { return Vec{{v(0), v(1)}}; };
  o.hess_yy_vec = [](const Vec&, const Vec&, const Vec& z) -> Vec { return Vec{{-z(0) / 20, -5 * z(1)}}; };
  o.constants = wtoy_constants(p);

  ValueFunctionOracle<Scalar> cf;
  cf.F = [p](const Vec& x) { return w_eval(p, x(2)).w + 10 * x(0) * x(0) + x(1) * x(1) / 10; };
  cf.grad_F = [p](const Vec& x) -> Vec { return Vec{{20 * x(0), x(1) / 5, w_eval(p, x(2)).d1}}; };
  cf.hess_F = [p](const Vec& x) -> Matrix<Scalar> {
    Matrix<Scalar> h = Matrix<Scalar>::Zero(3, 3);
    h(0, 0) = 20;
    h(1, 1) = Scalar(1) / 5;
    h(2, 2) = w_eval(p, x(2)).d2;
    return h;
  };
  cf.y_star = [](const Vec& x) -> Vec { return Vec{{20 * x(0), x(1) / 5}}; };
  cf.F_inf = -p.c_eps();
  cf.hessian_lipschitz = Scalar(2);
  o.closed_form = std::move(cf);
  return o;
}

// ---------------------------------------------------------------------------
// Quadratic minimax family
//   f(x, y) = x'Qx/2 + x'Cy - mu_y |y|^2/2 + b_x'x + b_y'y.

template <typename Scalar>
struct QuadraticMinimaxParams {
  Matrix<Scalar> Q;
  Matrix<Scalar> C;
  Scalar mu_y = 1;
  Vector<Scalar> b_x;
  Vector<Scalar> b_y;
  /// Reported Hessian-block Lipschitz constant. The true value is 0, which
  /// would make every step length infinite.
  Scalar ell2 = 1;
};

/// Random instance whose value-function Hessian P = Q + C C'/mu_y has
/// eigenvalues in [p_min, p_max]; Q itself is typically indefinite.
template <typename Scalar>
QuadraticMinimaxParams<Scalar> random_quadratic_params(Eigen::Index n, Eigen::Index m, Scalar mu_y,
                                                       Scalar coupling, std::uint64_t seed,
                                                       Scalar p_min = Scalar(0.1), Scalar p_max = Scalar(2),
                                                       Scalar ell2 = 1) {
  require(n >= 1 && m >= 1, "random_quadratic_params: dimensions must be positive");
  require(mu_y > 0, "random_quadratic_params: mu_y must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto gauss = [&](Eigen::Index r, Eigen::Index c) {
    Matrix<Scalar> M(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
      for (Eigen::Index i = 0; i < r; ++i) M(i, j) = Scalar(normal(rng));
    return M;
  };
  Eigen::HouseholderQR<Matrix<Scalar>> qr(gauss(n, n));
  const Matrix<Scalar> U = qr.householderQ();
  Vector<Scalar> p(n);
  for (Eigen::Index i = 0; i < n; ++i) p(i) = p_min + (p_max - p_min) * Scalar(unif(rng));
  const Matrix<Scalar> P = U * p.asDiagonal() * U.transpose();

  QuadraticMinimaxParams<Scalar> q;
  q.mu_y = mu_y;
  q.ell2 = ell2;
  q.C = coupling * gauss(n, m) / std::sqrt(Scalar(m));
  q.Q = P - q.C * q.C.transpose() / mu_y;
  q.Q = ((q.Q + q.Q.transpose()) / 2).eval();
  q.b_x = gauss(n, 1);
  q.b_y = gauss(m, 1);
  return q;
}

template <typename Scalar>
ProblemOracle<Scalar> make_quadratic(const QuadraticMinimaxParams<Scalar>& params) {
  using Vec = Vector<Scalar>;
  using Mat = Matrix<Scalar>;
  const Eigen::Index n = params.Q.rows();
  const Eigen::Index m = params.C.cols();
  require(params.Q.cols() == n && params.C.rows() == n, "make_quadratic: Q and C dimensions disagree");
  require(params.b_x.size() == n && params.b_y.size() == m, "make_quadratic: linear terms have wrong size");
  require(params.mu_y > 0, "make_quadratic: mu_y must be positive");
  require((params.Q - params.Q.transpose()).norm() <= Scalar(1e-12) * std::max(Scalar(1), params.Q.norm()),
          "make_quadratic: Q must be symmetric");
  auto p = std::make_shared<const QuadraticMinimaxParams<Scalar>>(params);
  const Scalar mu = params.mu_y;

  ProblemOracle<Scalar> o;
  o.name = "quadratic";
  o.dim_x = n;
  o.dim_y = m;
  o.f = [p](const Vec& x, const Vec& y) {
    return Scalar(0.5) * x.dot(p->Q * x) + x.dot(p->C * y) - p->mu_y / 2 * y.squaredNorm() + p->b_x.dot(x) +
           p->b_y.dot(y);
  };
  o.grad_x = [p](const Vec& x, const Vec& y) -> Vec { return p->Q * x + p->C * y + p->b_x; };
  o.grad_y = [p](const Vec& x, const Vec& y) -> Vec {
    return p->C.transpose() * x - p->mu_y * y + p->b_y;
  };
  o.hess_xx_vec = [p](const Vec&, const Vec&, const Vec& v) -> Vec { return p->Q * v; };
  o.hess_xy_vec = [p](const Vec&, const Vec&, const Vec& z) -> Vec { return p->C * z; };
  o.hess_yx_vec = [p](const Vec&, const Vec&, const Vec& v) -> Vec { return p->C.transpose() * v; };
  o.hess_yy_vec = [p](const Vec&, const Vec&, const Vec& z) -> Vec { return -p->mu_y * z; };

  Mat full(n + m, n + m);
  full << params.Q, params.C, params.C.transpose(), -mu * Mat::Identity(m, m);
  Eigen::SelfAdjointEigenSolver<Mat> es(full, Eigen::EigenvaluesOnly);
  const Scalar ell1 = std::max(std::abs(es.eigenvalues()(0)), std::abs(es.eigenvalues()(n + m - 1)));
  o.constants = SmoothnessConstants<Scalar>(mu, std::max(ell1, mu), params.ell2);

  const Mat P = params.Q + params.C * params.C.transpose() / mu;
  const Vec c = params.b_x + params.C * params.b_y / mu;
  ValueFunctionOracle<Scalar> cf;
  cf.F = [p](const Vec& x) {
    return Scalar(0.5) * x.dot(p->Q * x) + p->b_x.dot(x) +
           (p->C.transpose() * x + p->b_y).squaredNorm() / (2 * p->mu_y);
  };
  cf.grad_F = [P, c](const Vec& x) -> Vec { return P * x + c; };
  cf.hess_F = [P](const Vec&) -> Mat { return P; };
  cf.y_star = [p](const Vec& x) -> Vec { return (p->C.transpose() * x + p->b_y) / p->mu_y; };
  Eigen::SelfAdjointEigenSolver<Mat> ep(P, Eigen::EigenvaluesOnly);
  if (ep.eigenvalues()(0) > 0) {
    const Vec x_star = -P.ldlt().solve(c);
    cf.F_inf = cf.F(x_star);
  } else {
    cf.F_inf = -infinity<Scalar>();
  }
  o.closed_form = std::move(cf);
  return o;
}

// ---------------------------------------------------------------------------
// Robust regression with adversarial sample perturbations
//   f(x, y) = (1/N) sum_i [ log cosh(r_i) - lam |y_i - a_i|^2 ],
//   r_i = tanh(x)' y_i / sqrt(d) - b_i,
// x in R^d, y = (y_1, ..., y_N) in R^{N d}.

template <typename Scalar>
struct RobustRegressionParams {
  Matrix<Scalar> A;  // N x d, row i is a_i
  Vector<Scalar> b;  // N labels
  Scalar lambda_adv = 1;
};

template <typename Scalar>
RobustRegressionParams<Scalar> random_robust_regression_params(Eigen::Index samples, Eigen::Index features,
                                                               Scalar lambda_adv, std::uint64_t seed,
                                                               Scalar noise = Scalar(0.1)) {
  require(samples >= 1 && features >= 1, "random_robust_regression_params: dimensions must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  RobustRegressionParams<Scalar> p;
  p.lambda_adv = lambda_adv;
  p.A.resize(samples, features);
  for (Eigen::Index j = 0; j < features; ++j)
    for (Eigen::Index i = 0; i < samples; ++i) p.A(i, j) = Scalar(normal(rng));
  Vector<Scalar> x_true(features);
  for (Eigen::Index j = 0; j < features; ++j) x_true(j) = Scalar(normal(rng));
  const Vector<Scalar> s = x_true.array().tanh();
  p.b = p.A * s / std::sqrt(Scalar(features));
  for (Eigen::Index i = 0; i < samples; ++i) p.b(i) += noise * Scalar(normal(rng));
  return p;
}

template <typename Scalar>
ProblemOracle<Scalar> make_robust_regression(const RobustRegressionParams<Scalar>& params) {
  using Vec = Vector<Scalar>;
  using std::sqrt;
  const Eigen::Index N = params.A.rows();
  const Eigen::Index d = params.A.cols();
  require(N >= 1 && d >= 1, "make_robust_regression: empty design");
  require(params.b.size() == N, "make_robust_regression: label count differs from sample count");
  const Scalar lam = params.lambda_adv;
  // y_i-block curvature lies in [(-2 lam) / N, (1 - 2 lam) / N].
  if (!(2 * lam - 1 > 0)) {
    throw ConstructionError("make_robust_regression: lambda_adv must exceed 1/2 for strong concavity in y");
  }
  auto p = std::make_shared<const RobustRegressionParams<Scalar>>(params);
  const Scalar inv_n = Scalar(1) / Scalar(N);
  const Scalar rd = 1 / sqrt(Scalar(d));

  struct Pieces {
    Vec s, s1, s2;  // tanh(x) and its first two derivatives
  };
  auto pieces = [](const Vec& x) {
    Pieces q;
    q.s = x.array().tanh();
    q.s1 = 1 - q.s.array().square();
    q.s2 = -2 * q.s.array() * q.s1.array();
    return q;
  };
  auto block = [d](const Vec& y, Eigen::Index i) { return y.segment(i * d, d); };

  ProblemOracle<Scalar> o;
  o.name = "robust_regression";
  o.dim_x = d;
  o.dim_y = N * d;
  o.f = [=](const Vec& x, const Vec& y) {
    const Vec s = x.array().tanh();
    Scalar total = 0;
    for (Eigen::Index i = 0; i < N; ++i) {
      const Scalar r = s.dot(block(y, i)) * rd - p->b(i);
      // log cosh(r) = |r| + log1p(exp(-2|r|)) - log 2, stable for large |r|
      const Scalar ar = std::abs(r);
      total += ar + std::log1p(std::exp(-2 * ar)) - std::log(Scalar(2));
      total -= lam * (block(y, i) - p->A.row(i).transpose()).squaredNorm();
    }
    return total * inv_n;
  };
  o.grad_x = [=](const Vec& x, const Vec& y) -> Vec {
    const Pieces q = pieces(x);
    Vec g = Vec::Zero(d);
    for (Eigen::Index i = 0; i < N; ++i) {
      const Scalar r = q.s.dot(block(y, i)) * rd - p->b(i);
      g += std::tanh(r) * rd * q.s1.cwiseProduct(block(y, i));
    }
    return g * inv_n;
  };
  o.grad_y = [=](const Vec& x, const Vec& y) -> Vec {
    const Vec s = x.array().tanh();
    Vec g(N * d);
    for (Eigen::Index i = 0; i < N; ++i) {
      const Scalar r = s.dot(block(y, i)) * rd - p->b(i);
      g.segment(i * d, d) = inv_n * (std::tanh(r) * rd * s - 2 * lam * (block(y, i) - p->A.row(i).transpose()));
    }
    return g;
  };
  o.hess_xx_vec = [=](const Vec& x, const Vec& y, const Vec& v) -> Vec {
    const Pieces q = pieces(x);
    Vec out = Vec::Zero(d);
    for (Eigen::Index i = 0; i < N; ++i) {
      const Scalar r = q.s.dot(block(y, i)) * rd - p->b(i);
      const Scalar t = std::tanh(r);
      const Vec pi = rd * q.s1.cwiseProduct(block(y, i));
      out += (1 - t * t) * pi.dot(v) * pi + t * rd * q.s2.cwiseProduct(block(y, i)).cwiseProduct(v);
    }
    return out * inv_n;
  };
  o.hess_xy_vec = [=](const Vec& x, const Vec& y, const Vec& z) -> Vec {
    const Pieces q = pieces(x);
    Vec out = Vec::Zero(d);
    for (Eigen::Index i = 0; i < N; ++i) {
      const Scalar r = q.s.dot(block(y, i)) * rd - p->b(i);
      const Scalar t = std::tanh(r);
      const Vec pi = rd * q.s1.cwiseProduct(block(y, i));
      out += (1 - t * t) * rd * q.s.dot(block(z, i)) * pi + t * rd * q.s1.cwiseProduct(block(z, i));
    }
    return out * inv_n;
  };
  o.hess_yx_vec = [=](const Vec& x, const Vec& y, const Vec& v) -> Vec {
    const Pieces q = pieces(x);
    Vec out(N * d);
    for (Eigen::Index i = 0; i < N; ++i) {
      const Scalar r = q.s.dot(block(y, i)) * rd - p->b(i);
      const Scalar t = std::tanh(r);
      const Vec pi = rd * q.s1.cwiseProduct(block(y, i));
      out.segment(i * d, d) = inv_n * ((1 - t * t) * rd * pi.dot(v) * q.s + t * rd * q.s1.cwiseProduct(v));
    }
    return out;
  };
  o.hess_yy_vec = [=](const Vec& x, const Vec& y, const Vec& z) -> Vec {
    const Vec s = x.array().tanh();
    Vec out(N * d);
    for (Eigen::Index i = 0; i < N; ++i) {
      const Scalar r = s.dot(block(y, i)) * rd - p->b(i);
      const Scalar t = std::tanh(r);
      out.segment(i * d, d) = inv_n * ((1 - t * t) * s.dot(block(z, i)) / Scalar(d) * s - 2 * lam * block(z, i));
    }
    return out;
  };

  // Bounds over the region |y_i| <= R around the maximizer, where
  // |y*_i - a_i| <= 1 / (2 lam) and the slack covers the ascent transient.
  const Scalar R = params.A.rowwise().norm().maxCoeff() + 1 / (2 * lam - 1);
  const Scalar a_xx = R * R / Scalar(d) + Scalar(0.77) * R * rd;
  const Scalar b_xy = (R + 1) / sqrt(Scalar(N) * Scalar(d));
  const Scalar c_yy = 2 * lam * inv_n;
  const Scalar mu = (2 * lam - 1) * inv_n;
  const Scalar ell1 = std::max(a_xx, c_yy) + b_xy;
  const Scalar ell2 = 2 * std::pow(1 + R * rd, Scalar(3));
  o.constants = SmoothnessConstants<Scalar>(mu, std::max(ell1, mu), ell2);
  return o;
}

// ---------------------------------------------------------------------------

/// 2 max ||grad F|| + 1 over a coarse grid: the full 3^n grid when n <= 8,
/// otherwise 512 seeded box vertices, always including x1. The box has
/// half-width 1.5 max(||x1||_inf, 1) around the origin.
template <typename Scalar>
Scalar estimate_gradient_bound(const ProblemOracle<Scalar>& oracle, const NoDeduce<Vector<Scalar>>& x1,
                               std::uint64_t seed = 0) {
  require(oracle.has_closed_form(), "estimate_gradient_bound: needs a closed-form value function");
  const auto& cf = *oracle.closed_form;
  const Eigen::Index n = oracle.dim_x;
  const Scalar h = Scalar(1.5) * std::max(x1.template lpNorm<Eigen::Infinity>(), Scalar(1));
  Scalar best = cf.grad_F(x1).norm();
  Vector<Scalar> pt(n);
  if (n <= 8) {
    long total = 1;
    for (Eigen::Index i = 0; i < n; ++i) total *= 3;
    for (long code = 0; code < total; ++code) {
      long c = code;
      for (Eigen::Index i = 0; i < n; ++i, c /= 3) pt(i) = h * Scalar(c % 3 - 1);
      best = std::max(best, cf.grad_F(pt).norm());
    }
  } else {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(0.5);
    for (int k = 0; k < 512; ++k) {
      for (Eigen::Index i = 0; i < n; ++i) pt(i) = coin(rng) ? h : -h;
      best = std::max(best, cf.grad_F(pt).norm());
    }
  }
  return 2 * best + 1;
}

}  // namespace hsda
