#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "mqgcs/benchmark.hpp"
#include "mqgcs/graph.hpp"
#include "mqgcs/oracle.hpp"
#include "mqgcs/scenario_io.hpp"
#include "mqgcs/scenarios.hpp"
#include "mqgcs/svg.hpp"
#include "mqgcs/synthesis.hpp"

namespace mqgcs {
namespace {

Vector V2(double a, double b) { return Vector{{a, b}}; }

TEST(EnvGenTest, SeedDeterministic) {
  EnvGenParams p;
  p.seed = 42;
  EXPECT_EQ(SerializeScenario(GenerateRandomEnv(p)), SerializeScenario(GenerateRandomEnv(p)));
  p.seed = 43;
  EnvGenParams q;
  q.seed = 42;
  EXPECT_NE(SerializeScenario(GenerateRandomEnv(p)), SerializeScenario(GenerateRandomEnv(q)));
}

TEST(EnvGenTest, GeneratedGraphsAreValid) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    EnvGenParams p;
    p.seed = seed;
    p.num_sources = 2;
    p.num_targets = 2;
    EXPECT_TRUE(ValidateGraph(GenerateRandomEnv(p).graph).ok()) << "seed " << seed;
    p.cost = CostKind::kBezier;
    p.num_boxes = 4;
    EXPECT_TRUE(ValidateGraph(GenerateRandomEnv(p).graph).ok()) << "bezier seed " << seed;
  }
}

TEST(EnvGenTest, TouchingLimitIsHonoured) {
  EnvGenParams p;
  p.seed = 7;
  p.num_boxes = 20;
  p.workspace = 14.0;
  p.max_touching = 2;
  const std::vector<AxisBox> boxes = GenerateBoxes(p);
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    int touching = 0;
    for (std::size_t j = 0; j < i; ++j) {
      const Vector lo = boxes[i].lower.cwiseMax(boxes[j].lower);
      const Vector hi = boxes[i].upper.cwiseMin(boxes[j].upper);
      if ((hi - lo).minCoeff() > 0.0) ++touching;
    }
    EXPECT_LE(touching, 2) << "box " << i;
  }
}

TEST(EnvGenTest, EdgeCostIsAddedToEveryLength) {
  EnvGenParams p;
  p.seed = 4;
  p.edge_cost = 0.5;
  const Scenario sc = GenerateRandomEnv(p);
  ASSERT_FALSE(sc.graph.edges().empty());
  const Vector x = Vector::Constant(4, 1.0);
  for (const GcsEdge& e : sc.graph.edges()) EXPECT_NEAR(e.length.Evaluate(x), 0.5, 1e-12);
}

TEST(EnvGenTest, FiftyVertexEnvironmentIsMostlyConnected) {
  EnvGenParams p;
  p.seed = 1;
  p.num_boxes = 46;
  p.workspace = 14.0;
  p.max_touching = 3;
  p.num_sources = 2;
  p.num_targets = 2;
  const Scenario sc = GenerateRandomEnv(p);
  std::map<std::string, Vector> pinned;
  for (const auto& t : sc.graph.targets()) pinned[t] = *sc.graph.vertex(t).set.SingletonPoint();
  const std::vector<Query> queries = SampleQueries(sc.graph, 20, 3, pinned);
  int feasible = 0;
  for (const auto& q : queries) {
    std::set<std::string> seen{q.source};
    std::vector<std::string> stack{q.source};
    while (!stack.empty()) {
      const std::string v = stack.back();
      stack.pop_back();
      for (int e : sc.graph.OutEdges(v)) {
        const std::string& w = sc.graph.edges()[e].head;
        if (seen.insert(w).second) stack.push_back(w);
      }
    }
    if (seen.count(q.target) > 0) ++feasible;
  }
  EXPECT_GE(feasible, 19);
}

Scenario OneBoxBezier() {
  const std::vector<AxisBox> boxes{{V2(0, 0), V2(3, 3)}};
  const std::vector<BezierTerminal> terminals{{"s", ConvexSet::Point(V2(0, 0)), true},
                                              {"t", ConvexSet::Point(V2(3, 3)), false}};
  return BuildBezierScenario(boxes, terminals, 3, 1);
}

TEST(BezierTest, StraightControlPolygonInOneBox) {
  const Scenario sc = OneBoxBezier();
  const OracleSolution sol = ExactSppGcs(sc.graph, "s", V2(0, 0), "t", V2(3, 3));
  ASSERT_TRUE(sol.feasible());
  // Three equal control-point steps of (1, 1).
  EXPECT_NEAR(sol.cost, 3.0 * 2.0, 1e-6);
}

TEST(BezierTest, ZeroLengthQuery) {
  const std::vector<AxisBox> boxes{{V2(0, 0), V2(3, 3)}};
  const std::vector<BezierTerminal> terminals{{"s", ConvexSet::Point(V2(1, 1)), true},
                                              {"t", ConvexSet::Point(V2(1, 1)), false}};
  const Scenario sc = BuildBezierScenario(boxes, terminals, 3, 1);
  EXPECT_NEAR(ExactSppGcs(sc.graph, "s", V2(1, 1), "t", V2(1, 1)).cost, 0.0, 1e-6);
}

TEST(BezierTest, ContinuityHoldsAcrossBoxes) {
  const std::vector<AxisBox> boxes{{V2(0, 0), V2(3, 3)}, {V2(2, 0), V2(5, 3)}};
  const std::vector<BezierTerminal> terminals{{"s", ConvexSet::Point(V2(0.5, 0.5)), true},
                                              {"t", ConvexSet::Point(V2(4.5, 2.5)), false}};
  const Scenario sc = BuildBezierScenario(boxes, terminals, 3, 1);
  const OracleSolution sol = ExactSppGcs(sc.graph, "s", V2(0.5, 0.5), "t", V2(4.5, 2.5));
  ASSERT_TRUE(sol.feasible());
  EXPECT_TRUE(ValidateTrajectory(sc.graph, sol.trajectory, 1e-7).ok());
  // Stacked control points: last of the first curve equals first of the second.
  const auto& p = sol.trajectory.points;
  for (std::size_t i = 1; i + 2 < p.size(); ++i) {
    const Vector& a = p[i];
    const Vector& b = p[i + 1];
    EXPECT_LE((a.tail(2) - b.head(2)).norm(), 1e-7);
    EXPECT_LE(((a.tail(2) - a.segment(a.size() - 4, 2)) - (b.segment(2, 2) - b.head(2))).norm(),
              1e-7);
  }
}

TEST(BenchmarkTest, PercentileInterpolates) {
  EXPECT_DOUBLE_EQ(Percentile({1.0, 2.0, 3.0, 4.0}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(Percentile({4.0, 1.0, 3.0}, 0.75), 3.5);
  EXPECT_THROW(Percentile({}, 0.5), std::invalid_argument);
}

TEST(BenchmarkTest, SummaryExcludesFailuresFromGaps) {
  std::vector<BenchmarkRecord> records(3);
  records[0] = {0, "m", 1, "quadratic", "success", 2.0, 1.0, 1.0, 0.1, 0};
  records[1] = {1, "m", 1, "quadratic", "success", 1.5, 1.0, 0.5, 0.2, 0};
  records[2] = {2, "m", 1, "quadratic", "exhausted", 0.0, 1.0, std::nullopt, 0.3, 2};
  const auto s = Summarize(records, {"m"});
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].failures, 1);
  EXPECT_NEAR(s[0].failure_rate, 100.0 / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(*s[0].median_gap, 0.75);
}

TEST(BenchmarkTest, ZeroQueriesGiveEmptyReport) {
  const Scenario sc = BuildTwoSegmentScenario();
  const std::map<std::string, LowerBoundCertificate> certs{{"t", SynthesizeBounds(sc, "t")}};
  const BenchmarkReport r = RunBenchmark(sc, {{"q1", &certs, 1}}, {});
  EXPECT_TRUE(r.records.empty());
  EXPECT_TRUE(r.summaries.empty());
}

TEST(SvgTest, MinimalScenarioIsWellFormedAndDeterministic) {
  Scenario sc;
  sc.graph.AddVertex("s", ConvexSet::Box(V2(0, 0), V2(1, 1)));
  sc.graph.AddVertex("t", ConvexSet::Point(V2(3, 1)));
  sc.graph.AddEdge("s", "t", QuadraticForm::SquaredDistance(2));
  sc.graph.AddSource("s");
  sc.graph.AddTarget("t");
  const std::string a = RenderSvg(sc);
  EXPECT_EQ(a, RenderSvg(sc));
  EXPECT_TRUE(a.rfind("<?xml", 0) == 0 || a.rfind("<svg", 0) == 0);
  EXPECT_NE(a.find("</svg>"), std::string::npos);
  EXPECT_EQ(a.find("<svg"), a.rfind("<svg"));
  EXPECT_EQ(a.find("</svg>"), a.size() - std::string("</svg>\n").size());
}

TEST(SvgTest, RejectsNonPlanarScenario) {
  Scenario sc;
  sc.graph.AddVertex("s", ConvexSet::Point(Vector{{0.0}}));
  EXPECT_THROW(RenderSvg(sc), std::invalid_argument);
}

TEST(SvgTest, BoundGridMatchesEvaluateBound) {
  const Scenario sc = BuildTwoSegmentScenario();
  const LowerBoundCertificate cert = SynthesizeBounds(sc, "t");
  const BoundGrid grid = SampleBoundGrid(sc.graph, cert, "w", 5);
  for (Eigen::Index i = 0; i < grid.xs.size(); ++i) {
    for (Eigen::Index j = 0; j < grid.ys.size(); ++j) {
      if (std::isnan(grid.values(i, j))) continue;
      EXPECT_NEAR(grid.values(i, j),
                  EvaluateBound(sc.graph, cert, "w", V2(grid.xs(i), grid.ys(j))), 1e-12);
    }
  }
}

}  // namespace
}  // namespace mqgcs
