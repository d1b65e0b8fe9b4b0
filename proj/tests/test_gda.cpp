#include "hsda/gda.hpp"
#include "hsda/problems.hpp"

#include <gtest/gtest.h>

namespace hsda {
namespace {

// f = x^2/2 + x y - y^2/2, saddle at the origin
ProblemOracle<double> scsc() {
  QuadraticMinimaxParams<double> p;
  p.Q = MatrixXd::Identity(1, 1);
  p.C = MatrixXd::Identity(1, 1);
  p.mu_y = 1;
  p.b_x = VectorXd::Zero(1);
  p.b_y = VectorXd::Zero(1);
  return make_quadratic(p);
}

TEST(Gda, ConvergesOnStronglyConvexStronglyConcave) {
  const auto o = scsc();
  auto cfg = GdaConfig<double>::defaults(o.constants);
  cfg.max_outer = 500;
  const auto tr = gda_run(o, cfg, VectorXd::Constant(1, 1.0), VectorXd::Constant(1, -1.0));
  EXPECT_LE(std::abs(tr.x_final(0)), 1e-6);
  EXPECT_LE(std::abs(tr.y_final(0)), 1e-6);
  EXPECT_EQ(tr.reason, Termination::max_outer);
  EXPECT_FALSE(tr.certified);
  EXPECT_EQ(tr.outer_iters, 500);
}

TEST(Gda, DefaultStepsAreTwoTimescale) {
  SmoothnessConstants<double> c(0.5, 2.0, 1.0);
  const auto g = GdaConfig<double>::defaults(c);
  EXPECT_DOUBLE_EQ(g.step_y, 0.5);
  EXPECT_DOUBLE_EQ(g.step_x, 1.0 / 32);
}

TEST(Gda, ZeroStepKeepsX) {
  const auto o = make_wtoy(WToyParams<double>{});
  GdaConfig<double> cfg = GdaConfig<double>::defaults(o.constants);
  cfg.step_x = 0;
  cfg.max_outer = 20;
  const VectorXd x1{{1.0, 0.1, 0.1}};
  const auto tr = gda_run(o, cfg, x1, VectorXd::Zero(2));
  EXPECT_TRUE(tr.x_final == x1);
  for (const auto& r : tr.records) EXPECT_EQ(*r.f_gap, tr.records.front().f_gap.value());
}

TEST(Gda, OverflowAbortsWithPartialTrace) {
  const auto o = scsc();
  GdaConfig<double> cfg = GdaConfig<double>::defaults(o.constants);
  cfg.step_y = 10;  // |1 - 10| per step on y
  try {
    gda_run(o, cfg, VectorXd::Constant(1, 1.0), VectorXd::Constant(1, 1.0));
    FAIL() << "expected RunAborted";
  } catch (const RunAborted<double>& e) {
    EXPECT_EQ(e.trace().reason, Termination::aborted);
    EXPECT_FALSE(e.trace().error.empty());
    EXPECT_GT(e.trace().records.size(), 0u);
  }
}

TEST(Gda, RejectsBadConfig) {
  const auto o = scsc();
  GdaConfig<double> cfg;
  cfg.step_y = 0;
  EXPECT_THROW(gda_run(o, cfg, VectorXd::Zero(1), VectorXd::Zero(1)), PreconditionViolation);
}

}  // namespace
}  // namespace hsda
