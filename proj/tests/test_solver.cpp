#include <gtest/gtest.h>

#include <sstream>

#include "mqgcs/conic_program.hpp"
#include "mqgcs/oracle.hpp"
#include "mqgcs/path_program.hpp"
#include "mqgcs/scenarios.hpp"
#include "mqgcs/solver.hpp"

namespace mqgcs {
namespace {

Vector V2(double a, double b) { return Vector{{a, b}}; }

TEST(SolveSdpTest, TwoByTwoPsdBoundary) {
  ConicProgram p;
  const int t = p.AddVariable();
  p.AddObjective(t, 1.0);
  AffineMatrix F(2);
  F.AddConstant(0, 0, 1.0);
  F.AddConstant(1, 1, 1.0);
  F.AddTerm(t, 0, 1, 1.0);
  p.AddLmi(F);
  const SolveResult r = SolveSdp(p);
  ASSERT_TRUE(r.optimal());
  EXPECT_NEAR(r.objective_value, 1.0, 1e-6);
  EXPECT_GE(MinLmiEigenvalue(p, r.primal), -1e-7);
}

TEST(SolveSdpTest, ScalarLp) {
  ConicProgram p;
  const int j = p.AddVariable();
  p.AddObjective(j, 1.0);
  p.AddInequality({{j, 1.0}}, 5.0);
  const SolveResult r = SolveSdp(p);
  ASSERT_TRUE(r.optimal());
  EXPECT_NEAR(r.objective_value, 5.0, 1e-6);
}

TEST(SolveSdpTest, DiscreteChainLp) {
  // J_s <= 2 + J_a, J_a <= 3 + J_t, J_t = 0.
  ConicProgram p;
  const int s = p.AddVariable(), a = p.AddVariable(), t = p.AddVariable();
  p.AddObjective(s, 1.0);
  p.AddInequality({{s, 1.0}, {a, -1.0}}, 2.0);
  p.AddInequality({{a, 1.0}, {t, -1.0}}, 3.0);
  p.AddEquality({{t, 1.0}}, 0.0);
  const SolveResult r = SolveSdp(p);
  ASSERT_TRUE(r.optimal());
  EXPECT_NEAR(r.objective_value, 5.0, 1e-6);
}

TEST(SolveSdpTest, UnboundedAndInfeasible) {
  {
    ConicProgram p;
    const int t = p.AddVariable();
    p.AddObjective(t, 1.0);
    p.AddInequality({{t, -1.0}}, 5.0);
    EXPECT_EQ(SolveSdp(p).status, SolveStatus::kUnbounded);
  }
  {
    ConicProgram p;
    const int t = p.AddVariable();
    p.AddObjective(t, 1.0);
    p.AddInequality({{t, 1.0}}, -1.0);
    p.AddInequality({{t, -1.0}}, -1.0);
    EXPECT_EQ(SolveSdp(p).status, SolveStatus::kInfeasible);
  }
}

TEST(SolveSdpTest, SdpaExportHasHeader) {
  ConicProgram p;
  const int t = p.AddVariable();
  p.AddObjective(t, 1.0);
  p.AddInequality({{t, 1.0}}, 1.0);
  std::ostringstream out;
  WriteSdpa(p, out);
  EXPECT_FALSE(out.str().empty());
}

TEST(SolveConvexQpTest, ProjectionOntoBox) {
  const ConvexSet box = ConvexSet::Box(V2(0.0, 0.0), V2(1.0, 1.0));
  const SolveResult r = SolveConvexQp(QuadraticForm::SquaredDistanceTo(V2(3.0, 4.0)), box);
  ASSERT_TRUE(r.optimal());
  EXPECT_NEAR(r.objective_value, 13.0, 1e-6);
  EXPECT_NEAR(r.primal(0), 1.0, 1e-5);
  EXPECT_NEAR(r.primal(1), 1.0, 1e-5);
}

TEST(SolveConvexQpTest, EqualityAndBox) {
  ConvexSet set = ConvexSet::Box(V2(0.0, 0.0), V2(2.0, 2.0));
  set.AddEquality(V2(1.0, 0.0), 1.0);
  const SolveResult r = SolveConvexQp(QuadraticForm::SquaredDistanceTo(V2(0.0, 0.0)), set);
  ASSERT_TRUE(r.optimal());
  EXPECT_NEAR(r.objective_value, 1.0, 1e-6);
  EXPECT_NEAR(r.primal(0), 1.0, 1e-6);
  EXPECT_NEAR(r.primal(1), 0.0, 1e-5);
}

TEST(SolveConvexQpTest, InfeasibleIsReported) {
  ConvexSet set = ConvexSet::Box(V2(0.0, 0.0), V2(1.0, 1.0));
  set.AddEquality(V2(1.0, 0.0), 3.0);
  EXPECT_EQ(SolveConvexQp(QuadraticForm::Zero(2), set).status, SolveStatus::kInfeasible);
}

TEST(PathProgramTest, TwoEdgesThroughSegmentMatchesOracle) {
  const Scenario sc = BuildTwoSegmentScenario();
  GcsGraph sub;
  for (const char* id : {"s", "w", "t"}) sub.AddVertex(id, sc.graph.vertex(id).set);
  sub.AddEdge("s", "w", sc.graph.FindEdge("s", "w")->length);
  sub.AddEdge("w", "t", sc.graph.FindEdge("w", "t")->length);
  const Vector xs = V2(0.0, 2.0), xt = V2(10.0, -1.0);
  PathProgram prog{{"s", "w", "t"}, xs, xt, std::nullopt};
  const PathSolution sol = SolvePathProgram(sc.graph, prog);
  ASSERT_TRUE(sol.optimal());
  const OracleSolution oracle = ExactSppGcs(sub, "s", xs, "t", xt);
  EXPECT_NEAR(sol.length, oracle.cost, 1e-6);
}

}  // namespace
}  // namespace mqgcs
