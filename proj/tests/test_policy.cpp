#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mqgcs/oracle.hpp"
#include "mqgcs/policy.hpp"
#include "mqgcs/scenarios.hpp"
#include "mqgcs/synthesis.hpp"

namespace mqgcs {
namespace {

Vector V1(double a) { return Vector{{a}}; }
Vector V2(double a, double b) { return Vector{{a, b}}; }

// Hand-written certificate over singleton or 2D vertices: fixed target mode,
// no penalties.
LowerBoundCertificate HandCertificate(const std::string& target, const Vector& target_point,
                                      const std::map<std::string, QuadraticForm>& bounds) {
  LowerBoundCertificate cert;
  cert.target = target;
  cert.target_point = target_point;
  cert.penalties_enabled = false;
  cert.bounds = bounds;
  return cert;
}

GcsGraph PointGraph(const std::vector<std::string>& ids) {
  GcsGraph g;
  double x = 0.0;
  for (const auto& id : ids) g.AddVertex(id, ConvexSet::Point(V1(x++)));
  return g;
}

TEST(LookaheadCandidatesTest, ChainOneStep) {
  GcsGraph g = PointGraph({"a", "b", "t"});
  g.AddEdge("a", "b", QuadraticForm::Constant(2, 1.0));
  g.AddEdge("b", "t", QuadraticForm::Constant(2, 1.0));
  RolloutState st{"a", V1(0.0), {}, {}, 0};
  EXPECT_EQ(LookaheadCandidates(g, st, 1, "t"), (std::vector<PathSeq>{{"b"}}));
}

TEST(LookaheadCandidatesTest, VisitedVerticesAreSkipped) {
  const std::vector<std::string> ids{"s", "v", "w", "t"};
  GcsGraph g = PointGraph(ids);
  for (const auto& a : ids) {
    for (const auto& b : ids) {
      if (a != b) g.AddEdge(a, b, QuadraticForm::Constant(2, 1.0));
    }
  }
  RolloutState st{"v", V1(1.0), {"s", "w"}, {}, 0};
  EXPECT_EQ(LookaheadCandidates(g, st, 2, "t"), (std::vector<PathSeq>{{"t"}}));
}

TEST(LookaheadCandidatesTest, NineVertexSourceOneStepIsOutNeighbors) {
  const Scenario sc = BuildNineVertexScenario();
  std::mt19937_64 rng(1);
  RolloutState st{"s", SampleSet(sc.graph.vertex("s").set, 1, rng).front(), {}, {}, 0};
  std::vector<PathSeq> expected;
  for (int e : sc.graph.OutEdges("s")) expected.push_back({sc.graph.edges()[e].head});
  EXPECT_EQ(LookaheadCandidates(sc.graph, st, 1, "t"), expected);
}

TEST(EvaluateCandidateTest, DirectToTarget) {
  GcsGraph g;
  g.AddVertex("s", ConvexSet::Box(V2(-1, -1), V2(1, 1)));
  g.AddVertex("t", ConvexSet::Point(V2(3.0, 4.0)));
  g.AddEdge("s", "t", QuadraticForm::SquaredDistance(2));
  const LowerBoundCertificate cert = HandCertificate("t", V2(3.0, 4.0), {});
  RolloutState st{"s", V2(0.0, 0.0), {}, {}, 0};
  const auto c = EvaluateCandidate(g, cert, st, {"t"}, V2(3.0, 4.0));
  ASSERT_TRUE(c.has_value());
  EXPECT_NEAR(c->value, 25.0, 1e-6);
  EXPECT_NEAR((c->first_step_point - V2(3.0, 4.0)).norm(), 0.0, 1e-6);
}

TEST(EvaluateCandidateTest, ZeroBoundGivesDistanceToSegment) {
  GcsGraph g;
  g.AddVertex("s", ConvexSet::Box(V2(-1, -1), V2(1, 1)));
  g.AddVertex("w", ConvexSet::Segment(V2(2.0, 0.0), V2(12.0, 0.0)));
  g.AddVertex("t", ConvexSet::Point(V2(20.0, 0.0)));
  g.AddEdge("s", "w", QuadraticForm::SquaredDistance(2));
  const LowerBoundCertificate cert =
      HandCertificate("t", V2(20.0, 0.0), {{"w", QuadraticForm::Zero(2)}});
  RolloutState st{"s", V2(0.0, 1.0), {}, {}, 0};
  const auto c = EvaluateCandidate(g, cert, st, {"w"}, V2(20.0, 0.0));
  ASSERT_TRUE(c.has_value());
  EXPECT_NEAR(c->value, 4.0 + 1.0, 1e-6);
}

// s has two neighbors: a (a dead end the bounds favour) and b, which leads
// to t through c.
Scenario DeadEndScenario() {
  Scenario sc;
  sc.graph = PointGraph({"s", "a", "b", "c", "t"});
  for (auto [u, v] : std::vector<std::pair<const char*, const char*>>{
           {"s", "a"}, {"s", "b"}, {"b", "c"}, {"c", "t"}}) {
    sc.graph.AddEdge(u, v, QuadraticForm::Constant(2, 1.0));
  }
  sc.graph.AddSource("s");
  sc.graph.AddTarget("t");
  return sc;
}

TEST(RolloutTest, BacktracksOnceOutOfDeadEnd) {
  const Scenario sc = DeadEndScenario();
  const Vector xt = V1(4.0);
  const LowerBoundCertificate cert =
      HandCertificate("t", xt,
                      {{"s", QuadraticForm::Constant(1, 0.0)},
                       {"a", QuadraticForm::Constant(1, 0.0)},
                       {"b", QuadraticForm::Constant(1, 2.0)},
                       {"c", QuadraticForm::Constant(1, 1.0)},
                       {"t", QuadraticForm::Constant(1, 0.0)}});
  const RolloutResult r = Rollout(sc.graph, cert, "s", V1(0.0), "t", xt);
  ASSERT_TRUE(r.success());
  EXPECT_EQ(r.diagnostics.backtracks, 1);
  EXPECT_EQ(r.path, (PathSeq{"s", "b", "c", "t"}));
  EXPECT_NEAR(r.cost, 3.0, 1e-9);
}

TEST(RolloutTest, SingleEdge) {
  GcsGraph g;
  g.AddVertex("s", ConvexSet::Box(V2(-1, -1), V2(1, 1)));
  g.AddVertex("t", ConvexSet::Point(V2(3.0, 4.0)));
  g.AddEdge("s", "t", QuadraticForm::SquaredDistance(2));
  const LowerBoundCertificate cert = HandCertificate("t", V2(3.0, 4.0), {});
  const RolloutResult r = Rollout(g, cert, "s", V2(0.0, 0.0), "t", V2(3.0, 4.0));
  ASSERT_TRUE(r.success());
  EXPECT_EQ(r.path, (PathSeq{"s", "t"}));
  EXPECT_NEAR(r.cost, 25.0, 1e-6);
}

TEST(RolloutTest, DisconnectedIsExhausted) {
  GcsGraph g = PointGraph({"s", "t"});
  const LowerBoundCertificate cert = HandCertificate("t", V1(1.0), {});
  const RolloutResult r = Rollout(g, cert, "s", V1(0.0), "t", V1(1.0));
  EXPECT_EQ(r.status, RolloutStatus::kExhausted);
}

TEST(RolloutTest, WrongTargetThrows) {
  GcsGraph g = PointGraph({"s", "t"});
  const LowerBoundCertificate cert = HandCertificate("s", V1(0.0), {});
  EXPECT_THROW(Rollout(g, cert, "s", V1(0.0), "t", V1(1.0)), std::invalid_argument);
}

TEST(RolloutTest, DeterministicAndFeasibleOnNineVertexInstance) {
  const Scenario sc = BuildNineVertexScenario();
  SynthesisOptions opts;
  opts.penalties = false;
  opts.pairwise_products = true;
  const LowerBoundCertificate cert = SynthesizeBounds(sc, "t", opts);
  const Vector xt = *sc.graph.vertex("t").set.SingletonPoint();
  std::mt19937_64 rng(11);
  const Vector xs = SampleSet(sc.graph.vertex("s").set, 1, rng).front();
  PolicyOptions po;
  po.horizon = 2;
  const RolloutResult a = Rollout(sc.graph, cert, "s", xs, "t", xt, po);
  po.threads = 3;
  const RolloutResult b = Rollout(sc.graph, cert, "s", xs, "t", xt, po);
  ASSERT_TRUE(a.success());
  EXPECT_EQ(a.path, b.path);
  EXPECT_EQ(a.cost, b.cost);
  EXPECT_TRUE(ValidateTrajectory(sc.graph, a.trajectory).ok());
  EXPECT_LE(a.cost, a.incremental_cost + 1e-8);
}

TEST(LookaheadValueTest, FullHorizonWithZeroBoundsIsExact) {
  const Scenario sc = BuildTwoSegmentScenario();
  const Vector xs = V2(0.0, 2.0), xt = V2(10.0, -1.0);
  std::map<std::string, QuadraticForm> zero;
  for (const auto& v : sc.graph.vertices()) zero[v.id] = QuadraticForm::Zero(2);
  const LowerBoundCertificate cert = HandCertificate("t", xt, zero);
  const double value = LookaheadValue(sc.graph, cert, "s", xs, 3, "t", xt);
  EXPECT_NEAR(value, ExactSppGcs(sc.graph, "s", xs, "t", xt).cost, 1e-6);
}

}  // namespace
}  // namespace mqgcs
