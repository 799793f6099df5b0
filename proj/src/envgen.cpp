#include <algorithm>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "mqgcs/scenarios.hpp"

namespace mqgcs {

namespace {

std::string Name(const char* prefix, int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%s%02d", prefix, i);
  return buf;
}

double Overlap(const AxisBox& a, const AxisBox& b, int axis) {
  return std::min(a.upper(axis), b.upper(axis)) - std::max(a.lower(axis), b.lower(axis));
}

bool Adjacent(const AxisBox& a, const AxisBox& b, double min_overlap) {
  return Overlap(a, b, 0) >= min_overlap && Overlap(a, b, 1) >= min_overlap;
}

bool Inside(const AxisBox& inner, const AxisBox& outer) {
  return (inner.lower.array() >= outer.lower.array()).all() &&
         (inner.upper.array() <= outer.upper.array()).all();
}

/// Points of `box` shrunk by `margin` on every side.
Vector UniformIn(const AxisBox& box, double margin, std::mt19937_64& rng) {
  Vector x(box.lower.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    std::uniform_real_distribution<double> u(box.lower(i) + margin, box.upper(i) - margin);
    x(i) = u(rng);
  }
  return x;
}

ConvexSet BoxSet(const AxisBox& box) { return ConvexSet::Box(box.lower, box.upper); }

Scenario SquaredEuclideanEnv(const EnvGenParams& params, const std::vector<AxisBox>& boxes,
                             std::mt19937_64& rng) {
  const int n = static_cast<int>(boxes.size());
  Scenario scenario;
  GcsGraph& graph = scenario.graph;
  for (int i = 0; i < n; ++i) graph.AddVertex(Name("b", i), BoxSet(boxes[i]));
  // Edge (v, w): x_w must also lie in box v.
  auto coupling = [](const AxisBox& tail, int head_dim) {
    ConvexSet joint(2 + head_dim);
    const ConvexSet inside = ConvexSet::Box(tail.lower, tail.upper).Lift(2 + head_dim, 2);
    joint.Intersect(inside);
    return joint;
  };
  const QuadraticForm length =
      QuadraticForm::SquaredDistance(2) + QuadraticForm::Constant(4, params.edge_cost);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j || !Adjacent(boxes[i], boxes[j], params.min_overlap)) continue;
      graph.AddEdge(Name("b", i), Name("b", j), length, coupling(boxes[i], 2));
    }
  }

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  const int ns = std::clamp(params.num_sources, 1, n);
  for (int k = 0; k < ns; ++k) {
    const int b = order[k];
    graph.AddSource(Name("b", b));
    scenario.source_distribution.push_back(SourceDistribution::UniformBox(
        Name("b", b), boxes[b].lower, boxes[b].upper, 1.0 / ns));
  }
  for (int k = 0; k < params.num_targets; ++k) {
    // Prefer boxes that are not sources.
    const int b = order[(ns + k) % n];
    const Vector p = UniformIn(boxes[b], 0.1 * (boxes[b].upper - boxes[b].lower).minCoeff(), rng);
    const std::string id = Name("t", k);
    graph.AddVertex(id, ConvexSet::Point(p));
    graph.AddTarget(id);
    for (int i = 0; i < n; ++i) {
      if (BoxSet(boxes[i]).Contains(p)) {
        graph.AddEdge(Name("b", i), id, length);
      }
    }
  }
  return scenario;
}

Scenario BezierEnv(const EnvGenParams& params, const std::vector<AxisBox>& boxes,
                   std::mt19937_64& rng) {
  const int n = static_cast<int>(boxes.size());
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<BezierTerminal> terminals;
  const int ns = std::clamp(params.num_sources, 1, n);
  for (int k = 0; k < ns; ++k) {
    const AxisBox& host = boxes[order[k]];
    const double half = 0.25 * (host.upper - host.lower).minCoeff();
    const Vector c = UniformIn(host, half, rng);
    const Vector h = Vector::Constant(2, half);
    terminals.push_back({Name("s", k), ConvexSet::Box(c - h, c + h), true});
  }
  for (int k = 0; k < params.num_targets; ++k) {
    const AxisBox& host = boxes[order[(ns + k) % n]];
    const Vector p = UniformIn(host, 0.1 * (host.upper - host.lower).minCoeff(), rng);
    terminals.push_back({Name("t", k), ConvexSet::Point(p), false});
  }
  return BuildBezierScenario(boxes, terminals, params.bezier_degree, params.smoothness,
                             params.min_overlap);
}

}  // namespace

std::string ToString(CostKind kind) {
  return kind == CostKind::kBezier ? "bezier" : "squared_euclidean";
}

CostKind ParseCostKind(const std::string& name) {
  if (name == "squared_euclidean") return CostKind::kSquaredEuclidean;
  if (name == "bezier") return CostKind::kBezier;
  throw std::invalid_argument("unknown cost kind '" + name + "'");
}

std::vector<AxisBox> GenerateBoxes(const EnvGenParams& params) {
  if (params.num_boxes < 1) throw std::invalid_argument("GenerateRandomEnv: num_boxes must be >= 1");
  if (!(params.min_size > 2.0 * params.min_overlap) || params.max_size < params.min_size ||
      params.max_size > params.workspace) {
    throw std::invalid_argument("GenerateRandomEnv: inconsistent box sizes");
  }
  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> size(params.min_size, params.max_size);
  std::vector<AxisBox> boxes;
  auto make = [&](const Vector& center, const Vector& side) {
    AxisBox box{center - 0.5 * side, center + 0.5 * side};
    // Shift back into the workspace.
    for (int i = 0; i < 2; ++i) {
      const double lo = std::max(0.0, -box.lower(i));
      const double hi = std::max(0.0, box.upper(i) - params.workspace);
      box.lower(i) += lo - hi;
      box.upper(i) += lo - hi;
    }
    return box;
  };
  {
    const Vector side{{size(rng), size(rng)}};
    std::uniform_real_distribution<double> u(0.0, params.workspace);
    boxes.push_back(make(Vector{{u(rng), u(rng)}}, side));
  }
  while (static_cast<int>(boxes.size()) < params.num_boxes) {
    bool placed = false;
    for (int attempt = 0; attempt < params.max_retries && !placed; ++attempt) {
      std::uniform_int_distribution<int> pick(0, static_cast<int>(boxes.size()) - 1);
      const AxisBox& anchor = boxes[pick(rng)];
      const Vector side{{size(rng), size(rng)}};
      Vector center(2);
      for (int i = 0; i < 2; ++i) {
        const double reach = 0.5 * (anchor.upper(i) - anchor.lower(i) + side(i)) - params.min_overlap;
        std::uniform_real_distribution<double> offset(-reach, reach);
        center(i) = anchor.center()(i) + offset(rng);
      }
      const AxisBox box = make(center, side);
      if (!Adjacent(box, anchor, params.min_overlap)) continue;
      // Reject near-duplicates, which add edges but no geometry.
      bool duplicate = false;
      int touching = 0;
      for (const auto& b : boxes) {
        duplicate = duplicate || Inside(box, b) || Inside(b, box);
        if (Overlap(box, b, 0) > 0.0 && Overlap(box, b, 1) > 0.0) ++touching;
      }
      if (duplicate || (params.max_touching > 0 && touching > params.max_touching)) continue;
      boxes.push_back(box);
      placed = true;
    }
    if (!placed) throw std::runtime_error("GenerateRandomEnv: retry budget exhausted");
  }
  return boxes;
}

Scenario GenerateRandomEnv(const EnvGenParams& params) {
  const std::vector<AxisBox> boxes = GenerateBoxes(params);
  std::mt19937_64 rng(params.seed ^ 0x9e3779b97f4a7c15ULL);
  return params.cost == CostKind::kBezier ? BezierEnv(params, boxes, rng)
                                          : SquaredEuclideanEnv(params, boxes, rng);
}

}  // namespace mqgcs
