#pragma once

#include <optional>
#include <vector>

#include "mqgcs/graph.hpp"
#include "mqgcs/solver.hpp"

namespace mqgcs {

/// Convex program over the points of a fixed vertex sequence:
///   min  sum of edge lengths along the sequence + terminal(x_last)
///   s.t. vertex and edge constraints, optional pinned first/last points.
/// A pinned vertex keeps only the pin (its membership is the caller's
/// responsibility); edge coupling constraints are always enforced.
struct PathProgram {
  PathSeq path;
  std::optional<Vector> first_point;
  std::optional<Vector> last_point;
  /// Extra cost on the last point (e.g. a cost-to-go bound).
  std::optional<QuadraticForm> terminal;
};

struct PathSolution {
  SolveStatus status = SolveStatus::kNumericalFailure;
  /// Sum of edge lengths at the optimum.
  double length = 0.0;
  /// Objective including the terminal term.
  double objective = 0.0;
  std::vector<Vector> points;
  int iterations = 0;

  bool optimal() const { return status == SolveStatus::kOptimal; }
  Trajectory trajectory(const PathSeq& path) const { return {path, points}; }
};

/// Throws std::invalid_argument for missing edges or dimension mismatches.
PathSolution SolvePathProgram(const GcsGraph& graph, const PathProgram& program,
                              const SolverOptions& options = {});

}  // namespace mqgcs
