#include "mqgcs/scenarios.hpp"

#include <algorithm>
#include <stdexcept>

namespace mqgcs {

namespace {

ConvexSet Box(double x0, double x1, double y0, double y1) {
  return ConvexSet::Box(Vector{{x0, y0}}, Vector{{x1, y1}});
}

/// Sum of squared distances between consecutive control points of a curve
/// stored as `count` stacked points of R^d.
QuadraticForm ControlPolygonCost(int count, int d) {
  const int n = count * d;
  Matrix P = Matrix::Zero(n, n);
  for (int i = 0; i + 1 < count; ++i) {
    for (int k = 0; k < d; ++k) {
      const int a = i * d + k, b = (i + 1) * d + k;
      P(a, a) += 1.0;
      P(b, b) += 1.0;
      P(a, b) -= 1.0;
      P(b, a) -= 1.0;
    }
  }
  return QuadraticForm::FromParts(P, Vector::Zero(n), 0.0);
}

bool RegionInBox(const ConvexSet& region, const AxisBox& box) {
  const AxisBox r = region.BoundingBox();
  return (r.lower.array() >= box.lower.array() - kMembershipTol).all() &&
         (r.upper.array() <= box.upper.array() + kMembershipTol).all();
}

}  // namespace

Scenario BuildBezierScenario(const std::vector<AxisBox>& boxes,
                             const std::vector<BezierTerminal>& terminals, int degree,
                             int smoothness, double min_overlap) {
  if (degree < 1) throw std::invalid_argument("BuildBezierScenario: degree must be >= 1");
  if (smoothness < 0 || smoothness > 1) {
    throw std::invalid_argument("BuildBezierScenario: smoothness must be 0 or 1");
  }
  if (degree < 2 * smoothness + 1) {
    throw std::invalid_argument("BuildBezierScenario: degree too low for the smoothness order");
  }
  if (boxes.empty()) throw std::invalid_argument("BuildBezierScenario: no boxes");
  const int d = static_cast<int>(boxes.front().lower.size());
  const int count = degree + 1;
  const int n = count * d;
  auto name = [](int i) { return "b" + std::string(i < 10 ? "0" : "") + std::to_string(i); };
  // Selects control point i of a curve placed at `offset` in a stacked vector.
  auto point_row = [&](int ambient, int offset, int i, int k) {
    return Vector::Unit(ambient, offset + i * d + k);
  };

  Scenario scenario;
  GcsGraph& graph = scenario.graph;
  for (std::size_t b = 0; b < boxes.size(); ++b) {
    if (boxes[b].lower.size() != d) {
      throw std::invalid_argument("BuildBezierScenario: boxes of different dimensions");
    }
    ConvexSet set(n);
    for (int i = 0; i < count; ++i) {
      set.Intersect(ConvexSet::Box(boxes[b].lower, boxes[b].upper).Lift(n, i * d));
    }
    graph.AddVertex(name(static_cast<int>(b)), std::move(set));
  }

  const QuadraticForm internal = ControlPolygonCost(count, d);
  for (std::size_t v = 0; v < boxes.size(); ++v) {
    for (std::size_t w = 0; w < boxes.size(); ++w) {
      if (v == w) continue;
      bool adjacent = true;
      for (int k = 0; k < d; ++k) {
        const double overlap = std::min(boxes[v].upper(k), boxes[w].upper(k)) -
                               std::max(boxes[v].lower(k), boxes[w].lower(k));
        adjacent = adjacent && overlap > 0.0 && overlap >= min_overlap;
      }
      if (!adjacent) continue;
      ConvexSet joint(2 * n);
      for (int k = 0; k < d; ++k) {
        // Position continuity: p_last(v) = p_0(w).
        joint.AddEquality(point_row(2 * n, 0, degree, k) - point_row(2 * n, n, 0, k), 0.0);
        if (smoothness >= 1) {
          // Derivative continuity: p_last(v) - p_{last-1}(v) = p_1(w) - p_0(w).
          joint.AddEquality(point_row(2 * n, 0, degree, k) - point_row(2 * n, 0, degree - 1, k) -
                                point_row(2 * n, n, 1, k) + point_row(2 * n, n, 0, k),
                            0.0);
        }
      }
      graph.AddEdge(name(static_cast<int>(v)), name(static_cast<int>(w)),
                    internal.EmbedAt(2 * n, 0), std::move(joint));
    }
  }

  for (const BezierTerminal& term : terminals) {
    if (term.region.dimension() != d) {
      throw std::invalid_argument("BuildBezierScenario: terminal '" + term.id + "' dimension");
    }
    graph.AddVertex(term.id, term.region);
    if (term.is_source) {
      graph.AddSource(term.id);
    } else {
      graph.AddTarget(term.id);
    }
    for (std::size_t b = 0; b < boxes.size(); ++b) {
      if (!RegionInBox(term.region, boxes[b])) continue;
      ConvexSet joint(d + n);
      if (term.is_source) {
        for (int k = 0; k < d; ++k) {
          joint.AddEquality(Vector::Unit(d + n, k) - point_row(d + n, d, 0, k), 0.0);
        }
        graph.AddEdge(term.id, name(static_cast<int>(b)), QuadraticForm::Zero(d + n),
                      std::move(joint));
      } else {
        for (int k = 0; k < d; ++k) {
          joint.AddEquality(point_row(n + d, 0, degree, k) - Vector::Unit(n + d, n + k), 0.0);
        }
        graph.AddEdge(name(static_cast<int>(b)), term.id, internal.EmbedAt(n + d, 0),
                      std::move(joint));
      }
    }
    if (term.is_source) {
      if (const auto box = term.region.AsAxisBox()) {
        scenario.source_distribution.push_back(
            SourceDistribution::UniformBox(term.id, box->lower, box->upper));
      } else if (const auto p = term.region.SingletonPoint()) {
        scenario.source_distribution.push_back(SourceDistribution::PointMass(term.id, *p));
      }
    }
  }
  if (!scenario.source_distribution.empty()) {
    const double weight = 1.0 / static_cast<double>(scenario.source_distribution.size());
    for (auto& dist : scenario.source_distribution) dist.weight = weight;
    if (scenario.source_distribution.size() != graph.sources().size()) {
      scenario.source_distribution.clear();  // fall back to the default distribution
    }
  }
  return scenario;
}

Scenario BuildTwoSegmentScenario() {
  Scenario scenario;
  GcsGraph& graph = scenario.graph;
  graph.AddVertex("s", ConvexSet::Point(Vector{{0.0, 2.0}}));
  graph.AddVertex("v", ConvexSet::Point(Vector{{8.0, 2.0}}));
  graph.AddVertex("w", ConvexSet::Segment(Vector{{2.0, 0.0}}, Vector{{12.0, 0.0}}));
  graph.AddVertex("t", ConvexSet::Point(Vector{{10.0, -1.0}}));
  const std::vector<std::string> ids{"s", "t", "v", "w"};
  for (const auto& a : ids) {
    for (const auto& b : ids) {
      if (a != b) graph.AddEdge(a, b, QuadraticForm::SquaredDistance(2));
    }
  }
  graph.AddSource("s");
  graph.AddTarget("t");
  scenario.source_distribution.push_back(SourceDistribution::PointMass("s", Vector{{0.0, 2.0}}));
  return scenario;
}

Scenario BuildNineVertexScenario() {
  Scenario scenario;
  GcsGraph& graph = scenario.graph;
  graph.AddVertex("s", Box(-1.0, 1.0, 8.0, 9.0));
  graph.AddVertex("a", Box(-6.0, -3.0, 5.0, 7.0));
  graph.AddVertex("b", Box(-1.0, 1.0, 5.5, 6.5));
  graph.AddVertex("c", Box(3.0, 6.0, 5.0, 7.0));
  graph.AddVertex("d", Box(-7.0, -4.0, 1.0, 3.0));
  graph.AddVertex("e", Box(-1.5, 1.5, 1.5, 3.0));
  graph.AddVertex("f", Box(4.0, 7.0, 1.0, 3.0));
  graph.AddVertex("g", Box(-2.0, 2.0, -2.0, -1.0));
  graph.AddVertex("t", ConvexSet::Point(Vector{{0.0, -4.0}}));
  const std::vector<std::pair<std::string, std::string>> one_way{
      {"s", "a"}, {"s", "b"}, {"s", "c"}, {"e", "g"}, {"d", "t"}, {"g", "t"}, {"f", "t"}};
  const std::vector<std::pair<std::string, std::string>> both_ways{
      {"a", "b"}, {"b", "c"}, {"a", "d"}, {"b", "e"}, {"c", "f"},
      {"d", "e"}, {"e", "f"}, {"d", "g"}, {"f", "g"}};
  const QuadraticForm length = QuadraticForm::SquaredDistance(2);
  for (const auto& [a, b] : one_way) graph.AddEdge(a, b, length);
  for (const auto& [a, b] : both_ways) {
    graph.AddEdge(a, b, length);
    graph.AddEdge(b, a, length);
  }
  graph.AddSource("s");
  graph.AddTarget("t");
  scenario.source_distribution.push_back(
      SourceDistribution::UniformBox("s", Vector{{-1.0, 8.0}}, Vector{{1.0, 9.0}}));
  return scenario;
}

}  // namespace mqgcs
