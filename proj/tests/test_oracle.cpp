#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "mqgcs/oracle.hpp"
#include "mqgcs/scenarios.hpp"

namespace mqgcs {
namespace {

Vector V2(double a, double b) { return Vector{{a, b}}; }

TEST(FloydWarshallTest, ThreeCycle) {
  DiscreteGraph g{3, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 0, 1.0}}};
  const DiscreteApspTables fw = FloydWarshall(g);
  const double expected[3][3] = {{0, 1, 2}, {2, 0, 1}, {1, 2, 0}};
  for (int v = 0; v < 3; ++v) {
    for (int t = 0; t < 3; ++t) EXPECT_DOUBLE_EQ(fw.cost[v][t], expected[v][t]);
  }
  EXPECT_EQ(fw.Walk(0, 2), (std::vector<int>{0, 1, 2}));
}

TEST(FloydWarshallTest, DisconnectedPairIsInfinite) {
  DiscreteGraph g{2, {}};
  const DiscreteApspTables fw = FloydWarshall(g);
  EXPECT_TRUE(std::isinf(fw.cost[0][1]));
  EXPECT_EQ(fw.successor[0][1], -1);
  EXPECT_TRUE(fw.Walk(0, 1).empty());
}

TEST(FloydWarshallTest, RejectsNegativeCosts) {
  DiscreteGraph g{2, {{0, 1, -1.0}}};
  EXPECT_THROW(FloydWarshall(g), std::invalid_argument);
}

TEST(ExactSppGcsTest, SingleEdge) {
  GcsGraph g;
  g.AddVertex("s", ConvexSet::Box(V2(-1, -1), V2(1, 1)));
  g.AddVertex("t", ConvexSet::Box(V2(2, 3), V2(4, 5)));
  g.AddEdge("s", "t", QuadraticForm::SquaredDistance(2));
  const OracleSolution sol = ExactSppGcs(g, "s", V2(0, 0), "t", V2(3, 4));
  EXPECT_NEAR(sol.cost, 25.0, 1e-6);
}

TEST(ExactSppGcsTest, ParallelRoutesPickCheaperWaypoint) {
  GcsGraph g;
  g.AddVertex("s", ConvexSet::Point(V2(0, 0)));
  g.AddVertex("a", ConvexSet::Point(V2(1, 0)));
  g.AddVertex("b", ConvexSet::Point(V2(0, 5)));
  g.AddVertex("t", ConvexSet::Point(V2(2, 0)));
  for (auto [u, v] : std::vector<std::pair<const char*, const char*>>{
           {"s", "a"}, {"a", "t"}, {"s", "b"}, {"b", "t"}}) {
    g.AddEdge(u, v, QuadraticForm::SquaredDistance(2));
  }
  const OracleSolution sol = ExactSppGcs(g, "s", V2(0, 0), "t", V2(2, 0));
  EXPECT_NEAR(sol.cost, 2.0, 1e-6);
  EXPECT_EQ(sol.path, (PathSeq{"s", "a", "t"}));
}

TEST(ExactSppGcsTest, TwoSegmentOptimumVisitsSegmentOnce) {
  const Scenario sc = BuildTwoSegmentScenario();
  const OracleSolution sol = ExactSppGcs(sc.graph, "s", V2(0, 2), "t", V2(10, -1));
  ASSERT_TRUE(sol.feasible());
  EXPECT_EQ(std::count(sol.path.begin(), sol.path.end(), "w"), 1);
  EXPECT_TRUE(ValidateTrajectory(sc.graph, sol.trajectory).ok());
}

TEST(RelaxedWalkOracleTest, RevisitHelpsOnTwoSegmentInstance) {
  const Scenario sc = BuildTwoSegmentScenario();
  const double path = ExactSppGcs(sc.graph, "s", V2(0, 2), "t", V2(10, -1)).cost;
  const OracleSolution walk = RelaxedWalkOracle(sc.graph, "s", V2(0, 2), "t", V2(10, -1));
  EXPECT_LT(walk.cost, path - 1e-3);
  EXPECT_EQ(std::count(walk.path.begin(), walk.path.end(), "w"), 2);
}

TEST(RelaxedWalkOracleTest, OneEdgeWalkIsDirectEdge) {
  GcsGraph g;
  g.AddVertex("s", ConvexSet::Point(V2(0, 0)));
  g.AddVertex("t", ConvexSet::Point(V2(3, 4)));
  g.AddEdge("s", "t", QuadraticForm::SquaredDistance(2));
  OracleOptions o;
  o.max_edges = 1;
  EXPECT_NEAR(RelaxedWalkOracle(g, "s", V2(0, 0), "t", V2(3, 4), o).cost, 25.0, 1e-6);
}

TEST(RelaxedWalkOracleTest, EqualsPathOracleOnAChain) {
  GcsGraph g;
  g.AddVertex("s", ConvexSet::Point(V2(0, 0)));
  g.AddVertex("a", ConvexSet::Box(V2(0, -1), V2(2, 1)));
  g.AddVertex("t", ConvexSet::Point(V2(3, 0)));
  g.AddEdge("s", "a", QuadraticForm::SquaredDistance(2));
  g.AddEdge("a", "t", QuadraticForm::SquaredDistance(2));
  const double path = ExactSppGcs(g, "s", V2(0, 0), "t", V2(3, 0)).cost;
  EXPECT_NEAR(RelaxedWalkOracle(g, "s", V2(0, 0), "t", V2(3, 0)).cost, path, 1e-9);
  EXPECT_NEAR(path, 4.5, 1e-6);
}

// Random singleton digraph with constant edge costs.
GcsGraph RandomSingletonGraph(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(0.0, 10.0), cost(1.0, 10.0), coin(0.0, 1.0);
  GcsGraph g;
  for (int i = 0; i < n; ++i) {
    g.AddVertex("v" + std::to_string(i), ConvexSet::Point(V2(coord(rng), coord(rng))));
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j && coin(rng) < 0.3) {
        g.AddEdge("v" + std::to_string(i), "v" + std::to_string(j),
                  QuadraticForm::Constant(4, cost(rng)));
      }
    }
  }
  return g;
}

TEST(ExactSppGcsTest, EqualsFloydWarshallOnSingletonGraphs) {
  const GcsGraph g = RandomSingletonGraph(7, 5);
  const DiscreteApspTables fw = FloydWarshall(ToDiscreteGraph(g));
  for (int s = 0; s < 7; ++s) {
    for (int t = 0; t < 7; ++t) {
      if (s == t) continue;
      const auto& vs = g.vertices()[s];
      const auto& vt = g.vertices()[t];
      const OracleSolution sol =
          ExactSppGcs(g, vs.id, *vs.set.SingletonPoint(), vt.id, *vt.set.SingletonPoint());
      if (std::isinf(fw.cost[s][t])) {
        EXPECT_FALSE(sol.feasible());
      } else {
        EXPECT_NEAR(sol.cost, fw.cost[s][t], 1e-9);
      }
    }
  }
}

TEST(ExactSppGcsTest, BranchAndBoundMatchesEnumeration) {
  const Scenario sc = BuildNineVertexScenario();
  const Vector xs = V2(0.0, 8.5);
  const Vector xt = V2(0.0, -4.0);
  const OracleSolution plain = ExactSppGcs(sc.graph, "s", xs, "t", xt);
  OracleOptions oo;
  // Lengths are nonnegative, so zero is an admissible bound everywhere.
  oo.prune_bound = [](const std::string&) { return QuadraticForm::Constant(2, 0.0); };
  const OracleSolution bnb = ExactSppGcs(sc.graph, "s", xs, "t", xt, oo);
  EXPECT_NEAR(bnb.cost, plain.cost, 1e-7);
  // Seeds that are suboptimal, malformed or not simple leave the optimum alone.
  oo.incumbents = {{"s", "c", "f", "t"}, {"s", "a"}, {"s", "b", "a", "b", "e", "g", "t"}};
  const OracleSolution seeded = ExactSppGcs(sc.graph, "s", xs, "t", xt, oo);
  EXPECT_NEAR(seeded.cost, plain.cost, 1e-7);
  EXPECT_EQ(seeded.path, plain.path);
}

TEST(ToDiscreteGraphTest, RejectsNonSingletonSets) {
  GcsGraph g;
  g.AddVertex("s", ConvexSet::Box(V2(0, 0), V2(1, 1)));
  EXPECT_THROW(ToDiscreteGraph(g), std::invalid_argument);
}

}  // namespace
}  // namespace mqgcs
