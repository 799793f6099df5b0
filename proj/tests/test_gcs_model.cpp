#include <gtest/gtest.h>

#include <stdexcept>

#include "mqgcs/convex_set.hpp"
#include "mqgcs/graph.hpp"
#include "mqgcs/quadratic_form.hpp"
#include "mqgcs/scenario_io.hpp"
#include "mqgcs/scenarios.hpp"

namespace mqgcs {
namespace {

Vector V2(double a, double b) { return Vector{{a, b}}; }

TEST(QuadraticFormTest, ZeroFormIsZeroEverywhere) {
  const QuadraticForm q = QuadraticForm::Zero(2);
  EXPECT_DOUBLE_EQ(q.Evaluate(V2(3.0, -7.0)), 0.0);
}

TEST(QuadraticFormTest, SquaredNormAtThreeFour) {
  const QuadraticForm q = QuadraticForm::SquaredDistanceTo(V2(0.0, 0.0));
  EXPECT_DOUBLE_EQ(q.Evaluate(V2(3.0, 4.0)), 25.0);
}

TEST(QuadraticFormTest, SquaredDistanceOnJointVariable) {
  const QuadraticForm q = QuadraticForm::SquaredDistance(2);
  EXPECT_DOUBLE_EQ(q.Evaluate(Vector{{0.0, 0.0, 1.0, 1.0}}), 2.0);
}

TEST(QuadraticFormTest, PartsRoundTripAndConvexity) {
  const Matrix P{{2.0, 0.5}, {0.5, 1.0}};
  const Vector q{{1.0, -2.0}};
  const QuadraticForm f = QuadraticForm::FromParts(P, q, 3.0);
  const Vector x = V2(0.3, -1.1);
  EXPECT_NEAR(f.Evaluate(x), x.dot(P * x) + q.dot(x) + 3.0, 1e-12);
  EXPECT_TRUE(f.IsConvex());
  EXPECT_FALSE(QuadraticForm::FromParts(-P, q, 0.0).IsConvex());
}

TEST(QuadraticFormTest, RestrictPinsTrailingBlock) {
  const QuadraticForm d = QuadraticForm::SquaredDistance(2);
  const QuadraticForm r = d.Restrict(2, V2(1.0, 1.0));
  EXPECT_EQ(r.dimension(), 2);
  EXPECT_NEAR(r.Evaluate(V2(0.0, 0.0)), 2.0, 1e-12);
}

TEST(ConvexSetTest, BoxMembership) {
  const ConvexSet box = ConvexSet::Box(V2(0.0, 0.0), V2(1.0, 1.0));
  EXPECT_TRUE(box.Contains(V2(0.5, 0.5), 1e-9));
  EXPECT_FALSE(box.Contains(V2(1.0 + 1e-3, 0.0), 1e-9));
}

TEST(ConvexSetTest, BallBoundaryIsInside) {
  const ConvexSet ball = ConvexSet::Ball(V2(0.0, 0.0), 1.0);
  EXPECT_TRUE(ball.Contains(V2(1.0, 0.0), 1e-9));
}

TEST(ConvexSetTest, BoundingBoxOfBox) {
  const AxisBox b = ConvexSet::Box(V2(0.0, 2.0), V2(1.0, 5.0)).BoundingBox();
  EXPECT_NEAR(b.lower(0), 0.0, 1e-7);
  EXPECT_NEAR(b.lower(1), 2.0, 1e-7);
  EXPECT_NEAR(b.upper(0), 1.0, 1e-7);
  EXPECT_NEAR(b.upper(1), 5.0, 1e-7);
}

TEST(ConvexSetTest, BoundingBoxOfBall) {
  const AxisBox b = ConvexSet::Ball(V2(0.0, 0.0), 1.0).BoundingBox();
  EXPECT_NEAR(b.lower(0), -1.0, 1e-6);
  EXPECT_NEAR(b.upper(1), 1.0, 1e-6);
}

TEST(ConvexSetTest, HalfSpaceIsUnbounded) {
  ConvexSet half(2);
  half.AddInequality(V2(1.0, 0.0), 0.0);
  try {
    half.BoundingBox();
    FAIL() << "expected UnboundedSetError";
  } catch (const UnboundedSetError& e) {
    EXPECT_NE(std::string(e.what()).find("unbounded set"), std::string::npos);
  }
}

TEST(ConvexSetTest, SingletonDetection) {
  EXPECT_TRUE(ConvexSet::Point(V2(1.0, 2.0)).SingletonPoint().has_value());
  EXPECT_FALSE(ConvexSet::Segment(V2(0.0, 0.0), V2(1.0, 0.0)).SingletonPoint().has_value());
}

GcsGraph TwoPoints() {
  GcsGraph g;
  g.AddVertex("s", ConvexSet::Point(V2(0.0, 0.0)));
  g.AddVertex("t", ConvexSet::Point(V2(3.0, 4.0)));
  g.AddEdge("s", "t", QuadraticForm::SquaredDistance(2));
  g.AddSource("s");
  g.AddTarget("t");
  return g;
}

TEST(ValidateGraphTest, MinimalGraphIsValid) { EXPECT_TRUE(ValidateGraph(TwoPoints()).ok()); }

TEST(ValidateGraphTest, DanglingEdge) {
  GcsGraph g = TwoPoints();
  g.AddEdge("s", "z", QuadraticForm::SquaredDistance(2));
  EXPECT_TRUE(ValidateGraph(g).Mentions("dangling edge"));
}

TEST(ValidateGraphTest, NegativeLength) {
  GcsGraph g;
  g.AddVertex("s", ConvexSet::Point(V2(0.0, 0.0)));
  g.AddVertex("t", ConvexSet::Point(V2(1.0, 0.0)));
  g.AddEdge("s", "t", QuadraticForm::Constant(4, -1.0));
  g.AddSource("s");
  g.AddTarget("t");
  EXPECT_TRUE(ValidateGraph(g).Mentions("negative edge length"));
}

GcsGraph Complete(const std::vector<std::string>& ids) {
  GcsGraph g;
  double x = 0.0;
  for (const auto& id : ids) g.AddVertex(id, ConvexSet::Point(V2(x++, 0.0)));
  for (const auto& a : ids) {
    for (const auto& b : ids) {
      if (a != b) g.AddEdge(a, b, QuadraticForm::SquaredDistance(2));
    }
  }
  return g;
}

TEST(EnumeratePathsTest, Chain) {
  GcsGraph g;
  g.AddVertex("s", ConvexSet::Point(V2(0.0, 0.0)));
  g.AddVertex("a", ConvexSet::Point(V2(1.0, 0.0)));
  g.AddVertex("t", ConvexSet::Point(V2(2.0, 0.0)));
  g.AddEdge("s", "a", QuadraticForm::SquaredDistance(2));
  g.AddEdge("a", "t", QuadraticForm::SquaredDistance(2));
  const auto paths = EnumeratePaths(g, "s", "t", 3);
  ASSERT_EQ(paths.size(), 1u);
  EXPECT_EQ(paths[0], (PathSeq{"s", "a", "t"}));
}

TEST(EnumeratePathsTest, CompleteFourVertexGraphHasFivePaths) {
  const GcsGraph g = Complete({"s", "v", "w", "t"});
  const auto paths = EnumeratePaths(g, "s", "t", 3);
  const std::vector<PathSeq> expected{
      {"s", "t"}, {"s", "v", "t"}, {"s", "v", "w", "t"}, {"s", "w", "t"}, {"s", "w", "v", "t"}};
  EXPECT_EQ(paths, expected);
}

TEST(EnumeratePathsTest, Disconnected) {
  GcsGraph g;
  g.AddVertex("s", ConvexSet::Point(V2(0.0, 0.0)));
  g.AddVertex("t", ConvexSet::Point(V2(1.0, 0.0)));
  EXPECT_TRUE(EnumeratePaths(g, "s", "t", 3).empty());
}

TEST(TrajectoryTest, CostAndValidation) {
  const GcsGraph g = TwoPoints();
  Trajectory traj{{"s", "t"}, {V2(0.0, 0.0), V2(3.0, 4.0)}};
  EXPECT_DOUBLE_EQ(TrajectoryCost(g, traj), 25.0);
  EXPECT_TRUE(ValidateTrajectory(g, traj).ok());
  traj.points[1] = V2(3.0, 4.1);
  EXPECT_FALSE(ValidateTrajectory(g, traj).ok());
}

TEST(ScenarioIoTest, RoundTripKeepsFingerprint) {
  const Scenario s = BuildNineVertexScenario();
  const std::string text = SerializeScenario(s);
  const Scenario back = ParseScenario(text);
  EXPECT_EQ(SerializeScenario(back), text);
  EXPECT_EQ(Fingerprint(back), Fingerprint(s));
}

TEST(ScenarioIoTest, MalformedInputThrows) {
  EXPECT_THROW(ParseScenario("{\"vertices\": 3}"), ScenarioError);
}

}  // namespace
}  // namespace mqgcs
