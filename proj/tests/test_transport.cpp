#include <gtest/gtest.h>

#include "kernelbayes/transport.hpp"
#include "support/oracles.hpp"
#include "support/random.hpp"

namespace kb {
namespace {

using testing::Random;

TransportProblem problem(const MeasurableSpace& x, const MeasurableSpace& y, std::vector<Rational> s,
                         std::vector<Rational> d, std::vector<Rational> c) {
  return {Probability(x, std::move(s)), Probability(y, std::move(d)), std::move(c)};
}

Rational oracle_min(const TransportProblem& p) {
  return oracle::transport_vertex_minimum(p.supply.weights(), p.demand.weights(), oracle::to_mat(p.cost, p.cols()));
}

TransportProblem random_problem(Random& rnd, std::size_t m, std::size_t n) {
  auto x = rnd.space(m, "x"), y = rnd.space(n, "y");
  std::vector<Rational> cost;
  for (std::size_t i = 0; i < m * n; ++i) cost.push_back(rnd.small_rational(4, 12));
  return {rnd.probability(x), rnd.probability(y), cost};
}

TEST(SolveTransport, ZeroCost) {
  auto two = two_point();
  auto prob = problem(two, two, {Rational(1, 3), Rational(2, 3)}, {Rational(1, 2), Rational(1, 2)}, {0, 0, 0, 0});
  auto plan = solve_transport(prob);
  EXPECT_EQ(plan.objective, 0);
  EXPECT_TRUE(verify_plan(prob, plan));
  TransportPlan product{joint_from_prior(prob.supply, constant_kernel(two, prob.demand)), 0, {}};
  EXPECT_TRUE(verify_plan(prob, product));
}

TEST(SolveTransport, PermutationCostGivesDiagonal) {
  auto two = two_point();
  auto prob = problem(two, two, {Rational(1, 2), Rational(1, 2)}, {Rational(1, 2), Rational(1, 2)}, {0, 1, 1, 0});
  auto plan = solve_transport(prob);
  EXPECT_EQ(plan.objective, 0);
  EXPECT_EQ(plan.joint.joint().weights(), (std::vector<Rational>{Rational(1, 2), 0, 0, Rational(1, 2)}));
  EXPECT_TRUE(verify_plan(prob, plan));
}

TEST(VerifyPlan, RejectsProductMeasureUnderPermutationCost) {
  auto two = two_point();
  auto prob = problem(two, two, {Rational(1, 2), Rational(1, 2)}, {Rational(1, 2), Rational(1, 2)}, {0, 1, 1, 0});
  auto j = joint_from_prior(prob.supply, constant_kernel(two, prob.demand));
  TransportPlan product{j, plan_cost(prob, j), {}};
  EXPECT_EQ(product.objective, Rational(1, 2));
  EXPECT_FALSE(verify_plan(prob, product));
}

TEST(VerifyPlan, WrongMarginalsAreInfeasible) {
  auto two = two_point();
  auto prob = problem(two, two, {Rational(1, 2), Rational(1, 2)}, {Rational(1, 4), Rational(3, 4)}, {0, 1, 1, 0});
  TransportPlan bad{JointDistribution::from_matrix(two, two, {Rational(1, 2), 0, 0, Rational(1, 2)}), 0, {}};
  try {
    verify_plan(prob, bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InfeasiblePlan);
  }
}

TEST(VerifyPlan, RejectsMisstatedObjective) {
  Random rnd(81);
  auto prob = random_problem(rnd, 3, 3);
  auto plan = solve_transport(prob);
  plan.objective += 1;
  EXPECT_FALSE(verify_plan(prob, plan));
}

TEST(SolveTransport, RejectsBadCostShape) {
  auto two = two_point();
  auto prob = problem(two, two, {Rational(1, 2), Rational(1, 2)}, {Rational(1, 2), Rational(1, 2)}, {0, 1, 1});
  EXPECT_THROW(solve_transport(prob), Error);
}

TEST(SolveTransport, MatchesVertexEnumeration) {
  Random rnd(82);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t m = rnd.between(1, 4), n = rnd.between(1, 4);
    auto prob = random_problem(rnd, m, n);
    auto plan = solve_transport(prob);
    EXPECT_EQ(plan.objective, oracle_min(prob)) << "trial " << trial;
    EXPECT_EQ(plan.objective, plan_cost(prob, plan.joint));
    EXPECT_EQ(marginal(plan.joint, Side::X), prob.supply);
    EXPECT_EQ(marginal(plan.joint, Side::Y), prob.demand);
    EXPECT_EQ(plan.basis.size(), m + n - 1);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (plan.joint.at(i, j) != 0)
          EXPECT_NE(std::find(plan.basis.begin(), plan.basis.end(), std::pair{i, j}), plan.basis.end());
    EXPECT_TRUE(verify_plan(prob, plan));
  }
}

TEST(SolveTransport, DegenerateMarginals) {
  // Equal partial sums force degenerate pivots.
  auto x = MeasurableSpace::discrete({"a", "b", "c"});
  auto prob = problem(x, x, {Rational(1, 3), Rational(1, 3), Rational(1, 3)}, {Rational(1, 3), Rational(1, 3), Rational(1, 3)},
                      {3, 1, 2, 2, 3, 1, 1, 2, 3});
  auto plan = solve_transport(prob);
  EXPECT_EQ(plan.objective, 1);
  EXPECT_EQ(plan.objective, oracle_min(prob));
  EXPECT_TRUE(verify_plan(prob, plan));
}

TEST(SolveTransport, ShiftInvariance) {
  Random rnd(83);
  for (int trial = 0; trial < 30; ++trial) {
    auto prob = random_problem(rnd, rnd.between(2, 4), rnd.between(2, 4));
    auto plan = solve_transport(prob);
    const Rational c = rnd.small_rational(3, 7) - 1;
    auto shifted = prob;
    for (auto& v : shifted.cost) v += c;
    EXPECT_EQ(solve_transport(shifted).objective, plan.objective + c);
    TransportPlan moved{plan.joint, plan.objective + c, {}};
    EXPECT_TRUE(verify_plan(shifted, moved));
  }
}

TEST(SolveTransport, TonelliConsistencyWithRescaledCost) {
  Random rnd(84);
  for (int trial = 0; trial < 30; ++trial) {
    auto prob = random_problem(rnd, rnd.between(1, 4), rnd.between(1, 4));
    auto plan = solve_transport(prob);
    Rational top = 1;
    for (const auto& v : prob.cost) top = std::max(top, v);
    std::vector<Rational> scaled;
    for (const auto& v : prob.cost) scaled.push_back(v / top);
    auto r = tonelli_check(plan.joint, SimpleFunction::from_atom_values(plan.joint.product().space(), scaled));
    EXPECT_EQ(r.via_x, plan.objective / top);
    EXPECT_EQ(r.via_joint, plan.objective / top);
    EXPECT_EQ(r.via_y, plan.objective / top);
  }
}

TEST(SolveTransport, Deterministic) {
  Random rnd(85);
  auto prob = random_problem(rnd, 4, 3);
  auto a = solve_transport(prob), b = solve_transport(prob);
  EXPECT_EQ(a.joint, b.joint);
  EXPECT_EQ(a.basis, b.basis);
}

TEST(CertifyPlan, PotentialsAreDualFeasible) {
  Random rnd(86);
  for (int trial = 0; trial < 30; ++trial) {
    auto prob = random_problem(rnd, rnd.between(1, 4), rnd.between(1, 4));
    auto cert = certify_plan(prob, solve_transport(prob));
    ASSERT_TRUE(cert.optimal);
    for (std::size_t i = 0; i < prob.rows(); ++i)
      for (std::size_t j = 0; j < prob.cols(); ++j)
        EXPECT_GE(prob.cost_at(i, j), cert.row_potentials[i] + cert.column_potentials[j]);
    EXPECT_EQ(cert.dual_objective, oracle_min(prob));
  }
}

}  // namespace
}  // namespace kb
