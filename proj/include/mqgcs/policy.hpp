#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mqgcs/graph.hpp"
#include "mqgcs/path_program.hpp"
#include "mqgcs/solver.hpp"
#include "mqgcs/synthesis.hpp"

namespace mqgcs {

/// Where the online policy stands: the current vertex and point, the vertices
/// already on the path (p_k) and the first steps already ruled out at this
/// state by backtracking.
struct RolloutState {
  std::string current_vertex;
  Vector current_point;
  /// Vertices visited before the current one, in order.
  PathSeq visited;
  std::set<std::string> excluded_first_steps;
  int iteration = 0;
};

/// One n-step decision sequence and the optimum of its convex program.
struct LookaheadCandidate {
  PathSeq sequence;
  double value = 0.0;
  Vector first_step_point;
};

struct PolicyOptions {
  int horizon = 1;
  /// Iterations of the rollout loop before giving up (Table 1 uses 10,000).
  int max_iters = 10000;
  /// Candidate programs evaluated concurrently within one step.
  int threads = 1;
  SolverOptions solver;
};

enum class RolloutStatus { kSuccess, kExhausted, kIterationCap, kReoptimizationFailed };

std::string_view ToString(RolloutStatus status);

struct RolloutDiagnostics {
  int iterations = 0;
  int backtracks = 0;
  int programs_solved = 0;
  double wall_time_s = 0.0;
};

struct RolloutResult {
  RolloutStatus status = RolloutStatus::kExhausted;
  PathSeq path;
  /// Re-optimized trajectory on success (the incremental one if that is cheaper).
  Trajectory trajectory;
  /// Sum of edge lengths along `trajectory`.
  double cost = 0.0;
  /// Trajectory assembled from the committed first-step points.
  Trajectory incremental_trajectory;
  double incremental_cost = 0.0;
  RolloutDiagnostics diagnostics;

  bool success() const { return status == RolloutStatus::kSuccess; }
};

/// All simple extensions of the current vertex of exactly `horizon` vertices,
/// or fewer when they reach the target (which ends a sequence). Visited
/// vertices and excluded first steps are skipped. Lexicographic order.
std::vector<PathSeq> LookaheadCandidates(const GcsGraph& graph, const RolloutState& state,
                                         int horizon, const std::string& target);

/// Solves the candidate's program: edge lengths from the current point along
/// the sequence plus the bound of the last vertex, or, when the sequence ends
/// at the target, the last point pinned to the target point and no bound.
/// Penalties are not added. nullopt when the program is infeasible or the
/// last vertex cannot reach the target.
std::optional<LookaheadCandidate> EvaluateCandidate(const GcsGraph& graph,
                                                    const LowerBoundCertificate& cert,
                                                    const RolloutState& state, const PathSeq& sequence,
                                                    const Vector& target_point,
                                                    const SolverOptions& options = {});

/// Best candidate of one step; nullopt is the backtrack signal. Values within
/// 1e-9 tie and are broken by the lexicographic order of the sequences.
struct StepDecision {
  std::optional<LookaheadCandidate> best;
  int programs_solved = 0;
};

StepDecision StepPolicy(const GcsGraph& graph, const LowerBoundCertificate& cert,
                        const RolloutState& state, const std::string& target,
                        const Vector& target_point, const PolicyOptions& options = {});

/// Iterates the step policy from the source to the target with depth-first
/// backtracking: when a state has no feasible candidate, the previous state
/// (vertex, point and path) is restored and the step that led here is
/// excluded there. On success the path is re-optimized as a whole. Throws
/// std::invalid_argument for unknown vertices, points outside their sets or a
/// certificate for another target.
RolloutResult Rollout(const GcsGraph& graph, const LowerBoundCertificate& cert,
                      const std::string& source, const Vector& source_point,
                      const std::string& target, const Vector& target_point,
                      const PolicyOptions& options = {});

/// Program (2) on a fixed path with both end points pinned.
PathSolution ReoptimizePath(const GcsGraph& graph, const PathSeq& path, const Vector& source_point,
                            const Vector& target_point, const SolverOptions& options = {});

/// Minimum candidate value at (vertex, point) with an empty path history:
/// the piecewise-quadratic lookahead bound. 0 at the target itself and
/// +infinity when no candidate is feasible.
double LookaheadValue(const GcsGraph& graph, const LowerBoundCertificate& cert,
                      const std::string& vertex, const Vector& point, int horizon,
                      const std::string& target, const Vector& target_point,
                      const SolverOptions& options = {});

}  // namespace mqgcs
