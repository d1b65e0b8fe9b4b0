#include "hsda/lanczos.hpp"

#include <gtest/gtest.h>

#include <random>

namespace hsda {
namespace {

struct Instance {
  MatrixXd H;
  VectorXd g;
  double alpha;
};

Instance random_instance(Eigen::Index n, std::uint64_t seed, double alpha = 0.3) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  MatrixXd M(n, n);
  for (auto& v : M.reshaped()) v = normal(rng);
  Instance in{(M + M.transpose()) / (2 * std::sqrt(double(n))), VectorXd(n), alpha};
  for (auto& v : in.g) v = normal(rng);
  return in;
}

HomogenizedOperator<double> make_op(const Instance& in) {
  MatrixXd H = in.H;
  return HomogenizedOperator<double>([H](const VectorXd& v) -> VectorXd { return H * v; }, in.g, in.alpha);
}

TEST(Lanczos, IdentityWithZeroGradient) {
  const Instance in{MatrixXd::Identity(5, 5), VectorXd::Zero(5), 1.0};
  LanczosOptions<double> opt;
  opt.e_budget = 1e-12;
  const auto p = lanczos_min_eigenpair(make_op(in), opt);
  EXPECT_NEAR(p.zeta, 1.0, 1e-12);
  EXPECT_NEAR(p.v_hat, 1.0, 1e-12);
  EXPECT_NEAR(p.u_hat.norm(), 0.0, 1e-12);
  EXPECT_LE(p.lanczos_iters, 2);
}

TEST(Lanczos, AgreesWithDenseSolver) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Instance in = random_instance(20, seed);
    LanczosOptions<double> opt;
    opt.e_budget = 1e-10;
    opt.seed = seed;
    const auto p = lanczos_min_eigenpair(make_op(in), opt);
    const auto ex = solve_exact(in.H, in.g, in.alpha);
    EXPECT_NEAR(p.zeta, ex.delta, 1e-9) << "seed " << seed;
    VectorXd z(21), ze(21);
    z << p.u_hat, p.v_hat;
    ze << ex.u, ex.v;
    EXPECT_GE(std::abs(z.dot(ze)), 1 - 1e-8) << "seed " << seed;
    EXPECT_LE(p.residual_norm, 1e-10);
  }
}

TEST(Lanczos, RitzResidualIdentityAndOrthogonality) {
  const Instance in = random_instance(30, 4);
  LanczosOptions<double> opt;
  opt.e_budget = 1e-3;
  const auto p = lanczos_min_eigenpair(make_op(in), opt);
  const MatrixXd G = homogenized_matrix(in.H, in.g, in.alpha);
  VectorXd z(31), r(31);
  z << p.u_hat, p.v_hat;
  r << p.k, p.rho;
  EXPECT_NEAR(z.norm(), 1.0, 1e-12);
  EXPECT_LE((G * z + p.zeta * z - r).norm(), 1e-12);
  EXPECT_NEAR(z.dot(r), 0.0, 1e-12);
  EXPECT_NEAR(r.norm(), p.residual_norm, 1e-12);
  EXPECT_GE(p.v_hat, 0);
}

TEST(Lanczos, ResidualEstimateMatchesTrueResidual) {
  const Instance in = random_instance(40, 5);
  for (double e : {1e-2, 1e-4, 1e-6}) {
    LanczosOptions<double> opt;
    opt.e_budget = e;
    const auto p = lanczos_min_eigenpair(make_op(in), opt);
    EXPECT_LE(p.residual_norm, e * (1 + 1e-6));
  }
}

TEST(Lanczos, MaxItersExceededCarriesBestPair) {
  const Instance in = random_instance(30, 6);
  LanczosOptions<double> opt;
  opt.e_budget = 1e-14;
  opt.max_iters = 3;
  try {
    lanczos_min_eigenpair(make_op(in), opt);
    FAIL() << "expected MaxItersExceeded";
  } catch (const MaxItersExceeded<double>& e) {
    EXPECT_EQ(e.best().lanczos_iters, 3);
    EXPECT_GT(e.best().residual_norm, 1e-14);
  }
}

TEST(Lanczos, ExhaustiveRunAlwaysReturns) {
  const Instance in = random_instance(8, 7);
  LanczosOptions<double> opt;
  opt.e_budget = 1e-300;
  const auto p = lanczos_min_eigenpair(make_op(in), opt);
  EXPECT_LE(p.lanczos_iters, 9);
  EXPECT_NEAR(p.zeta, solve_exact(in.H, in.g, in.alpha).delta, 1e-10);
}

TEST(Lanczos, GapCertificateStopsEarlier) {
  const Instance in = random_instance(60, 8);
  LanczosOptions<double> plain;
  plain.e_budget = 1e-8;
  LanczosOptions<double> gap = plain;
  gap.use_gap_certificate = true;
  gap.gap_floor = 0.1;
  const auto a = lanczos_min_eigenpair(make_op(in), plain);
  const auto b = lanczos_min_eigenpair(make_op(in), gap);
  EXPECT_LE(b.lanczos_iters, a.lanczos_iters);
  EXPECT_LE(b.residual_norm * b.residual_norm / std::max(b.ritz_gap, 0.1), 1e-8 * (1 + 1e-6));
}

TEST(Lanczos, GapCertificateNeedsTwoRitzValues) {
  // a single Ritz value has no gap; the certificate must not fire on it
  const Instance in = random_instance(20, 9);
  LanczosOptions<double> opt;
  opt.e_budget = 1e-8;
  opt.use_gap_certificate = true;
  const auto p = lanczos_min_eigenpair(make_op(in), opt);
  EXPECT_GT(p.lanczos_iters, 1);
  EXPECT_NEAR(p.zeta, solve_exact(in.H, in.g, in.alpha).delta, 1e-7);
}

TEST(Lanczos, SeedDeterminism) {
  const Instance in = random_instance(25, 9);
  LanczosOptions<double> opt;
  opt.e_budget = 1e-4;
  opt.seed = 11;
  const auto a = lanczos_min_eigenpair(make_op(in), opt);
  const auto b = lanczos_min_eigenpair(make_op(in), opt);
  EXPECT_EQ(a.zeta, b.zeta);
  EXPECT_EQ(a.lanczos_iters, b.lanczos_iters);
  EXPECT_TRUE(a.u_hat == b.u_hat);
}

TEST(DeriveSeed, DistinctStreams) {
  EXPECT_EQ(derive_seed(1, 2, 0), derive_seed(1, 2, 0));
  EXPECT_NE(derive_seed(1, 2, 0), derive_seed(1, 2, 1));
  EXPECT_NE(derive_seed(1, 2, 0), derive_seed(1, 3, 0));
  EXPECT_NE(derive_seed(1, 2, 0), derive_seed(2, 2, 0));
}

TEST(DefaultLanczosMaxIters, Formula) {
  EXPECT_EQ(default_lanczos_max_iters(1000, 1e-2, 1.0), static_cast<long>(std::ceil(8 * std::log(1001 / 1e-2))));
  EXPECT_EQ(default_lanczos_max_iters(3, 1e-8, 100.0), 4);
}

TEST(Lanczos, RejectsBadBudget) {
  const Instance in = random_instance(3, 1);
  LanczosOptions<double> opt;
  opt.e_budget = 0;
  EXPECT_THROW(lanczos_min_eigenpair(make_op(in), opt), PreconditionViolation);
}

}  // namespace
}  // namespace hsda
