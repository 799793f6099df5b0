#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mqgcs/scenario_io.hpp"

namespace mqgcs {

enum class CostKind { kSquaredEuclidean, kBezier };

std::string ToString(CostKind kind);
/// Accepts "squared_euclidean" and "bezier"; throws std::invalid_argument.
CostKind ParseCostKind(const std::string& name);

/// Parameters of the random box environments.
struct EnvGenParams {
  std::uint64_t seed = 0;
  int num_boxes = 12;
  /// Boxes are kept inside [0, workspace]^2.
  double workspace = 10.0;
  /// Side lengths are drawn uniformly from [min_size, max_size].
  double min_size = 1.5;
  double max_size = 3.5;
  /// Two boxes are adjacent when they overlap by at least this much along
  /// both axes; every new box is placed to overlap an earlier one.
  double min_overlap = 0.3;
  /// A new box may overlap at most this many earlier boxes; 0 means no
  /// limit. Small values give corridor-like maps with few cycles.
  int max_touching = 0;
  int num_sources = 1;
  int num_targets = 1;
  CostKind cost = CostKind::kSquaredEuclidean;
  /// Squared-Euclidean environments only: constant added to every edge
  /// length. With zero, splitting a segment into more hops always lowers
  /// its cost, so walks that bounce between overlapping boxes cost almost
  /// nothing and lower bounds collapse towards zero.
  double edge_cost = 0.0;
  /// Bezier environments only.
  int bezier_degree = 3;
  int smoothness = 1;
  /// Attempts per box before generation fails.
  int max_retries = 200;
};

/// Seeded environment of overlapping axis-aligned boxes in R^2, one vertex
/// "bNN" per box and a pair of opposite edges per adjacent pair.
///
/// Squared-Euclidean kind: x_v is a point of box v; edge (v, w) has length
/// ||x_v - x_w||^2 + edge_cost and requires x_w to lie in box v as well, so every
/// straight segment of a trajectory stays inside one box. Source vertices
/// are boxes; target vertices "tN" are single points inside a box, entered
/// from every box containing them.
///
/// Bezier kind: see BuildBezierScenario; sources "sN" are square regions
/// and targets "tN" single points, each attached to the boxes containing it.
///
/// Throws std::runtime_error when a box cannot be placed within the retry
/// budget. The default source distribution is uniform over each source set.
Scenario GenerateRandomEnv(const EnvGenParams& params);

/// The boxes behind a generated environment, in vertex order.
std::vector<AxisBox> GenerateBoxes(const EnvGenParams& params);

/// Query endpoint region attached to a Bezier scenario.
struct BezierTerminal {
  std::string id;
  /// Region of the curve's start (source) or end (target) position in R^d.
  ConvexSet region;
  bool is_source = true;
};

/// One vertex per box holding the stacked control points of a Bezier curve
/// of the given degree, all inside the box. Boxes overlapping by at least
/// `min_overlap` along every axis (and by a positive amount) get a pair of
/// edges constraining the last control point of the tail to equal the first
/// of the head (smoothness >= 0) and the last control-point difference of the
/// tail to equal the first of the head (smoothness >= 1). The length of an
/// edge is the tail curve's sum of squared distances between consecutive
/// control points. Terminals are vertices over R^d: a source connects with
/// length 0 to every box containing its region, pinning the first control
/// point; every box containing a target region connects to it, pinning the
/// last control point. Throws std::invalid_argument when the degree is below
/// 1, the smoothness is outside [0, 1], or the degree is too low for it.
Scenario BuildBezierScenario(const std::vector<AxisBox>& boxes,
                             const std::vector<BezierTerminal>& terminals, int degree = 3,
                             int smoothness = 1, double min_overlap = 0.0);

/// Two-segment instance with the topology of the revisit example: point sets
/// s = (0, 2), v = (8, 2), t = (10, -1) and the segment w from (2, 0) to
/// (12, 0); complete digraph with squared-distance lengths. Without revisit
/// penalties the cheapest walk visits w twice.
Scenario BuildTwoSegmentScenario();

/// Nine-vertex, 25-edge planar instance with several cycles: a box source
/// at the top, a singleton target at the bottom, boxes in between and
/// squared-distance lengths without coupling constraints.
Scenario BuildNineVertexScenario();

}  // namespace mqgcs
