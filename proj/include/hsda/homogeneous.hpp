#pragma once

#include "hsda/core.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace hsda {

/// G(alpha) = [[H, g], [g^T, -alpha]] acting on lifted vectors [u; v].
template <typename Scalar>
class HomogenizedOperator {
 public:
  using Vec = Vector<Scalar>;

  HomogenizedOperator(LinearMap<Scalar> H_action, Vec g, Scalar alpha)
      : H_(std::move(H_action)), g_(std::move(g)), alpha_(alpha) {
    require(static_cast<bool>(H_), "HomogenizedOperator: empty H action");
  }

  Eigen::Index dim() const { return g_.size() + 1; }
  const Vec& g() const { return g_; }
  Scalar alpha() const { return alpha_; }
  const LinearMap<Scalar>& H_action() const { return H_; }

  Vec operator()(const Vec& z) const {
    const Eigen::Index n = g_.size();
    require(z.size() == n + 1, "HomogenizedOperator: dimension mismatch");
    const Scalar v = z(n);
    Vec out(n + 1);
    out.head(n) = H_(Vec(z.head(n))) + v * g_;
    out(n) = g_.dot(z.head(n)) - alpha_ * v;
    return out;
  }

 private:
  LinearMap<Scalar> H_;
  Vec g_;
  Scalar alpha_;
};

template <typename Scalar>
Matrix<Scalar> homogenized_matrix(const Matrix<Scalar>& H, const NoDeduce<Vector<Scalar>>& g,
                                  NoDeduce<Scalar> alpha) {
  const Eigen::Index n = g.size();
  Matrix<Scalar> G(n + 1, n + 1);
  G.topLeftCorner(n, n) = H;
  G.topRightCorner(n, 1) = g;
  G.bottomLeftCorner(1, n) = g.transpose();
  G(n, n) = -alpha;
  return G;
}

/// Flips [u; v] so that v >= 0, or, when v == 0, so that the first nonzero
/// entry of u is positive.
template <typename Scalar>
bool normalize_sign(Vector<Scalar>& u, Scalar& v) {
  bool flip = v < 0;
  if (v == 0) {
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      if (u(i) != 0) {
        flip = u(i) < 0;
        break;
      }
    }
  }
  if (flip) {
    u = -u;
    v = -v;
  }
  return flip;
}

template <typename Scalar>
struct ExactEigenpair {
  Scalar delta = 0;
  Vector<Scalar> u;
  Scalar v = 0;
};

template <typename Scalar>
ExactEigenpair<Scalar> solve_exact(const Matrix<Scalar>& H, const NoDeduce<Vector<Scalar>>& g,
                                   NoDeduce<Scalar> alpha) {
  require(alpha > 0, "solve_exact: alpha must be positive");
  require(H.rows() == H.cols() && H.rows() == g.size(), "solve_exact: dimension mismatch");
  const Eigen::Index n = g.size();
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(homogenized_matrix(H, g, alpha));
  if (es.info() != Eigen::Success) {
    throw EigensolverFailure("solve_exact: dense symmetric eigensolver did not converge");
  }
  Vector<Scalar> z = es.eigenvectors().col(0);
  z.normalize();
  ExactEigenpair<Scalar> out;
  out.delta = -es.eigenvalues()(0);
  out.u = z.head(n);
  out.v = z(n);
  normalize_sign(out.u, out.v);
  return out;
}

struct OptimalityReport {
  double r1 = 0;
  double r2 = 0;
  double r3 = 0;
  bool delta_ge_alpha = false;
  bool delta_gt_alpha = false;  // only meaningful when ||g|| > 0
  bool g_nonzero = false;

  bool ok(double tol) const {
    return r1 <= tol && r2 <= tol && r3 <= tol && delta_ge_alpha && (!g_nonzero || delta_gt_alpha);
  }
};

template <typename Scalar>
OptimalityReport check_optimality(const ExactEigenpair<Scalar>& p, const NoDeduce<LinearMap<Scalar>>& H_action,
                                  const NoDeduce<Vector<Scalar>>& g, NoDeduce<Scalar> alpha,
                                  NoDeduce<Scalar> g_zero_tol = Scalar(0)) {
  using std::abs;
  using std::sqrt;
  OptimalityReport r;
  r.r1 = double((H_action(p.u) + p.delta * p.u + p.v * g).norm());
  r.r2 = double(abs(g.dot(p.u) - p.v * (alpha - p.delta)));
  r.r3 = double(abs(sqrt(p.u.squaredNorm() + p.v * p.v) - 1));
  r.delta_ge_alpha = p.delta >= alpha;
  r.delta_gt_alpha = p.delta > alpha;
  r.g_nonzero = g.norm() > g_zero_tol;
  return r;
}

enum class Branch { ratio, curvature };

inline const char* to_string(Branch b) { return b == Branch::ratio ? "ratio" : "curvature"; }

template <typename Scalar>
struct Direction {
  Vector<Scalar> s;
  Branch branch = Branch::ratio;
};

/// s = u / v when |v| >= omega, otherwise the sign-corrected curvature
/// direction sgn(-<g, u>) u with sgn(0) = +1.
template <typename Scalar>
Direction<Scalar> classify_direction(const Vector<Scalar>& u, NoDeduce<Scalar> v,
                                     const NoDeduce<Vector<Scalar>>& g, NoDeduce<Scalar> omega) {
  using std::abs;
  require(omega > 0 && omega < Scalar(0.5), "classify_direction: omega must lie in (0, 1/2)");
  if (abs(v) >= omega) return {u / v, Branch::ratio};
  const Scalar sign = -g.dot(u) >= 0 ? Scalar(1) : Scalar(-1);
  return {sign * u, Branch::curvature};
}

struct ConditioningReport {
  double kappa_L = 0;
  double kappa_newton = 0;
  double kappa_L_bound = 0;
  double ratio_bound = 0;
  double eps_N = 0;
  double lambda1_G = 0;
  double lambda2_G = 0;
  double lambdamax_G = 0;
  double lambda1_H = 0;
  double lambdamax_H = 0;
  bool degenerate_spectrum = false;
};

/// Dense spectral diagnostics of G(alpha) and of the shifted Newton matrix
/// H + eps_N I. A gap lambda2(G) - lambda1(G) below 1e-14 sets
/// `degenerate_spectrum` and reports kappa_L = +inf.
template <typename Scalar>
ConditioningReport conditioning_report(const Matrix<Scalar>& H, const NoDeduce<Vector<Scalar>>& g,
                                       NoDeduce<Scalar> alpha, NoDeduce<Scalar> eps_N) {
  using std::sqrt;
  require(H.rows() == H.cols() && H.rows() == g.size() && g.size() >= 1,
          "conditioning_report: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> eg(homogenized_matrix(H, g, alpha),
                                                   Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> eh(H, Eigen::EigenvaluesOnly);
  if (eg.info() != Eigen::Success || eh.info() != Eigen::Success) {
    throw EigensolverFailure("conditioning_report: dense symmetric eigensolver did not converge");
  }
  const auto& lg = eg.eigenvalues();
  const auto& lh = eh.eigenvalues();
  const Eigen::Index n = g.size();

  ConditioningReport r;
  r.eps_N = double(eps_N);
  r.lambda1_G = double(lg(0));
  r.lambda2_G = double(lg(1));
  r.lambdamax_G = double(lg(n));
  r.lambda1_H = double(lh(0));
  r.lambdamax_H = double(lh(n - 1));

  const Scalar gap = lg(1) - lg(0);
  if (gap < Scalar(1e-14)) {
    r.degenerate_spectrum = true;
    r.kappa_L = double(infinity<Scalar>());
  } else {
    r.kappa_L = double((lg(n) - lg(0)) / gap);
  }

  const Scalar den_newton = lh(0) + eps_N;
  r.kappa_newton = den_newton > 0 ? double((lh(n - 1) + eps_N) / den_newton) : double(infinity<Scalar>());

  const Scalar lmax = lh(n - 1);
  const Scalar g2 = g.squaredNorm();
  const Scalar bound_den = -lmax + alpha + sqrt((lmax + alpha) * (lmax + alpha) + g2 / Scalar(n));
  r.kappa_L_bound = bound_den > 0 ? double(2 * (lmax - alpha - lg(0)) / bound_den) : double(infinity<Scalar>());
  r.ratio_bound = double(eps_N / (g2 / (lmax + alpha) + alpha));
  return r;
}

}  // namespace hsda
