#include "bipedmpc/qp_solver.h"

#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "oracles.h"

namespace bipedmpc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

QpProblem unconstrained(const MatX& h, const VecX& f) {
  QpProblem p;
  p.h = h;
  p.f = f;
  p.c = MatX::Zero(0, f.size());
  p.c_lower = VecX::Zero(0);
  p.c_upper = VecX::Zero(0);
  p.a_eq = MatX::Zero(0, f.size());
  p.b_eq = VecX::Zero(0);
  return p;
}

// Small problem whose feasible region is nonempty by construction: bounds
// are placed around C u0 for a random u0 (which also satisfies A_eq).
QpProblem random_small(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nd(2, 6), md(1, 6), pd(0, 1), kind(0, 2);
  std::uniform_real_distribution<double> slack(0.05, 1.0);
  const int n = nd(rng), m = md(rng);
  const int p = std::min(pd(rng), n - 1);
  QpProblem q = unconstrained(testing::random_spd(rng, n), testing::random_vector(rng, n, 5.0));
  const VecX u0 = testing::random_vector(rng, n);
  q.c = testing::random_matrix(rng, m, n);
  q.c_lower = VecX::Constant(m, -kInf);
  q.c_upper = VecX::Constant(m, kInf);
  int two_sided = 0;
  for (int i = 0; i < m; ++i) {
    const double ci = q.c.row(i).dot(u0);
    int k = kind(rng);
    if (k == 2 && two_sided >= 2) k = 0;
    if (k == 0 || k == 2) q.c_upper(i) = ci + slack(rng);
    if (k == 1 || k == 2) q.c_lower(i) = ci - slack(rng);
    if (k == 2) ++two_sided;
  }
  q.a_eq = testing::random_matrix(rng, p, n);
  q.b_eq = q.a_eq * u0;
  return q;
}

// Larger problem with a planted optimum having at most `active` binding
// rows; the oracle does not see the planted point.
QpProblem random_planted(std::mt19937_64& rng, int n, int m, int active) {
  std::uniform_real_distribution<double> slack(0.1, 1.0), mult(0.5, 2.0);
  QpProblem q = unconstrained(testing::random_spd(rng, n), VecX::Zero(n));
  const VecX u_star = testing::random_vector(rng, n);
  q.c = testing::random_matrix(rng, m, n);
  q.c_lower = VecX::Constant(m, -kInf);
  q.c_upper = VecX::Constant(m, kInf);
  VecX gradient_terms = VecX::Zero(n);
  for (int i = 0; i < m; ++i) {
    const double ci = q.c.row(i).dot(u_star);
    const bool upper = i % 2 == 0;
    const bool binding = i < active;
    const double gap = binding ? 0.0 : slack(rng);
    if (upper) {
      q.c_upper(i) = ci + gap;
      if (binding) gradient_terms += mult(rng) * q.c.row(i).transpose();
    } else {
      q.c_lower(i) = ci - gap;
      if (binding) gradient_terms -= mult(rng) * q.c.row(i).transpose();
    }
  }
  const int p = 1;
  q.a_eq = testing::random_matrix(rng, p, n);
  q.b_eq = q.a_eq * u_star;
  const VecX nu = testing::random_vector(rng, p);
  q.f = -q.h * u_star - gradient_terms - q.a_eq.transpose() * nu;
  return q;
}

TEST(SolveQp, ClippedScalar) {
  // min (u - 1)^2 s.t. u <= 0.5.
  QpProblem p = unconstrained(MatX::Constant(1, 1, 2.0), VecX::Constant(1, -2.0));
  p.c = MatX::Ones(1, 1);
  p.c_lower = VecX::Constant(1, -kInf);
  p.c_upper = VecX::Constant(1, 0.5);
  const QpSolution s = solve_qp(p);
  ASSERT_EQ(s.status, QpStatus::kOptimal);
  EXPECT_NEAR(s.u(0), 0.5, 1e-8);
  EXPECT_NEAR(s.upper_dual(0), 1.0, 1e-6);
}

TEST(SolveQp, EqualityProjection) {
  QpProblem p = unconstrained(MatX::Identity(3, 3), VecX::Zero(3));
  p.a_eq = MatX::Ones(1, 3);
  p.b_eq = VecX::Ones(1);
  const QpSolution s = solve_qp(p);
  ASSERT_EQ(s.status, QpStatus::kOptimal);
  EXPECT_LT((s.u - VecX::Constant(3, 1.0 / 3.0)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(SolveQp, UnconstrainedMatchesLinearSolve) {
  std::mt19937_64 rng(31);
  const MatX h = testing::random_spd(rng, 8);
  const VecX f = testing::random_vector(rng, 8);
  const QpSolution s = solve_qp(unconstrained(h, f));
  ASSERT_EQ(s.status, QpStatus::kOptimal);
  EXPECT_LT((s.u + h.ldlt().solve(f)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(SolveQp, SingleVariableEqualityIsFixed) {
  QpProblem p = unconstrained(MatX::Identity(2, 2), VecX(Eigen::Vector2d(-1.0, -1.0)));
  p.a_eq = MatX::Zero(1, 2);
  p.a_eq(0, 1) = 1.0;
  p.b_eq = VecX::Zero(1);
  const QpSolution s = solve_qp(p);
  ASSERT_EQ(s.status, QpStatus::kOptimal);
  EXPECT_NEAR(s.u(0), 1.0, 1e-9);
  EXPECT_EQ(s.u(1), 0.0);
  // Stationarity in the fixed coordinate: u_1 + f_1 + A^T y = 0.
  EXPECT_NEAR(s.u(1) - 1.0 + s.eq_dual(0), 0.0, 1e-8);
}

TEST(SolveQp, MatchesEnumerationOnSmallProblems) {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 35; ++trial) {
    const QpProblem p = random_small(rng);
    const auto oracle = testing::enumerate_qp(p, 100);
    ASSERT_TRUE(oracle.has_value()) << "trial " << trial;
    const QpSolution s = solve_qp(p);
    ASSERT_EQ(s.status, QpStatus::kOptimal) << "trial " << trial;
    EXPECT_LT((s.u - *oracle).cwiseAbs().maxCoeff(), 1e-6) << "trial " << trial;
  }
}

TEST(SolveQp, MatchesEnumerationOnPlantedProblems) {
  std::mt19937_64 rng(33);
  std::uniform_int_distribution<int> nd(8, 20), act(0, 2);
  for (int trial = 0; trial < 15; ++trial) {
    const int n = nd(rng);
    const int m = std::min(40, 2 * n);
    const QpProblem p = random_planted(rng, n, m, act(rng));
    const auto oracle = testing::enumerate_qp(p, 3);
    ASSERT_TRUE(oracle.has_value()) << "trial " << trial;
    const QpSolution s = solve_qp(p);
    ASSERT_EQ(s.status, QpStatus::kOptimal) << "trial " << trial;
    EXPECT_LT((s.u - *oracle).cwiseAbs().maxCoeff(), 1e-6) << "trial " << trial;
  }
}

TEST(SolveQp, DualityGapAndResidualsAtOptimum) {
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 30; ++trial) {
    const QpProblem p = random_small(rng);
    const QpSolution s = solve_qp(p);
    ASSERT_EQ(s.status, QpStatus::kOptimal);
    EXPECT_LE(s.duality_gap, 1e-5 * (1.0 + std::abs(s.objective)));
    EXPECT_LE(s.primal_residual, 1e-6);
    EXPECT_LE(s.dual_residual, 1e-6);
    EXPECT_NEAR(s.objective, p.objective(s.u), 1e-9 * (1.0 + std::abs(s.objective)));
    EXPECT_TRUE((s.lower_dual.array() >= 0.0).all());
    EXPECT_TRUE((s.upper_dual.array() >= 0.0).all());
  }
}

TEST(SolveQp, ScalingInvariance) {
  std::mt19937_64 rng(35);
  for (int trial = 0; trial < 20; ++trial) {
    const QpProblem p = random_small(rng);
    QpProblem scaled = p;
    scaled.h *= 37.0;
    scaled.f *= 37.0;
    const QpSolution a = solve_qp(p), b = solve_qp(scaled);
    ASSERT_EQ(a.status, QpStatus::kOptimal);
    ASSERT_EQ(b.status, QpStatus::kOptimal);
    EXPECT_LT((a.u - b.u).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(SolveQp, WarmStartOnIdenticalProblem) {
  std::mt19937_64 rng(36);
  for (int trial = 0; trial < 20; ++trial) {
    const QpProblem p = random_planted(rng, 12, 24, 2);
    const QpSolution cold = solve_qp(p);
    ASSERT_EQ(cold.status, QpStatus::kOptimal);
    const QpSolution warm = solve_qp(p, &cold);
    ASSERT_EQ(warm.status, QpStatus::kOptimal);
    EXPECT_LE(warm.iterations, 3);
    EXPECT_LT((warm.u - cold.u).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(SolveQp, ResidualHistoryIsMonotone) {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 20; ++trial) {
    const QpSolution s = solve_qp(random_planted(rng, 15, 30, 2));
    ASSERT_EQ(s.status, QpStatus::kOptimal);
    for (size_t i = 1; i < s.residual_history.size(); ++i) {
      EXPECT_LE(s.residual_history[i], s.residual_history[i - 1] * (1.0 + 1e-9) + 1e-14);
    }
  }
}

TEST(SolveQp, DetectsInfeasibility) {
  QpProblem p = unconstrained(MatX::Identity(2, 2), VecX::Zero(2));
  p.c = MatX::Zero(2, 2);
  p.c << 1, 0, -1, 0;
  p.c_lower = VecX::Constant(2, -kInf);
  p.c_upper = VecX(Eigen::Vector2d(-1.0, -1.0));  // u0 <= -1 and u0 >= 1
  EXPECT_EQ(solve_qp(p).status, QpStatus::kInfeasible);

  QpProblem e = unconstrained(MatX::Identity(2, 2), VecX::Zero(2));
  e.a_eq = MatX::Zero(2, 2);
  e.a_eq << 1, 1, 2, 2;
  e.b_eq = VecX(Eigen::Vector2d(1.0, 3.0));
  EXPECT_EQ(solve_qp(e).status, QpStatus::kInfeasible);
}

TEST(SolveQp, IterationLimit) {
  std::mt19937_64 rng(38);
  const QpProblem p = random_planted(rng, 12, 24, 2);
  const QpSolution s = solve_qp(p, nullptr, 1e-6, 1);
  EXPECT_EQ(s.status, QpStatus::kMaxIterations);
}

TEST(QpProblem, ValidateRejectsMalformed) {
  QpProblem p = unconstrained(MatX::Identity(2, 2), VecX::Zero(2));
  EXPECT_NO_THROW(p.validate());
  QpProblem bad = p;
  bad.h(0, 1) = 1.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = p;
  bad.h = MatX::Identity(3, 3);
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = p;
  bad.c = MatX::Ones(1, 2);
  bad.c_lower = VecX::Constant(1, 1.0);
  bad.c_upper = VecX::Constant(1, 0.0);
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = p;
  bad.a_eq = MatX::Identity(3, 2);
  bad.b_eq = VecX::Zero(3);
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  EXPECT_THROW(solve_qp(bad), std::invalid_argument);
}

}  // namespace
}  // namespace bipedmpc
