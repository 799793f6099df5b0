#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mqgcs/convex_set.hpp"
#include "mqgcs/quadratic_form.hpp"

namespace mqgcs {

struct GcsVertex {
  std::string id;
  ConvexSet set;

  int dimension() const { return set.dimension(); }
};

/// Directed edge. `joint_set` lives on the stacked variable (x_tail, x_head)
/// and carries only coupling constraints; membership of each endpoint in its
/// vertex set is implied.
struct GcsEdge {
  std::string tail;
  std::string head;
  ConvexSet joint_set;
  QuadraticForm length;
};

/// Ordered list of distinct vertex ids.
using PathSeq = std::vector<std::string>;

struct Trajectory {
  PathSeq path;
  std::vector<Vector> points;
};

class GcsGraph {
 public:
  /// Throws std::invalid_argument on a duplicate id or an empty dimension.
  const GcsVertex& AddVertex(std::string id, ConvexSet set);
  /// Adds an edge. Endpoints need not exist yet (validation reports dangling
  /// edges); when they do, an empty `joint_set` is sized automatically.
  void AddEdge(std::string tail, std::string head, QuadraticForm length,
               ConvexSet joint_set = ConvexSet());
  void AddSource(std::string id) { sources_.push_back(std::move(id)); }
  void AddTarget(std::string id) { targets_.push_back(std::move(id)); }
  /// Records a problem found while reading the graph from a file.
  void AddInputIssue(std::string issue) { input_issues_.push_back(std::move(issue)); }

  const std::vector<GcsVertex>& vertices() const { return vertices_; }
  const std::vector<GcsEdge>& edges() const { return edges_; }
  const std::vector<std::string>& sources() const { return sources_; }
  const std::vector<std::string>& targets() const { return targets_; }
  const std::vector<std::string>& input_issues() const { return input_issues_; }

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  bool HasVertex(const std::string& id) const { return index_.count(id) > 0; }
  /// Throws std::out_of_range for unknown ids.
  int IndexOf(const std::string& id) const;
  const GcsVertex& vertex(const std::string& id) const { return vertices_[IndexOf(id)]; }

  /// First edge from tail to head, or nullptr.
  const GcsEdge* FindEdge(const std::string& tail, const std::string& head) const;
  /// Indices of edges leaving `id`, ordered by head id.
  const std::vector<int>& OutEdges(const std::string& id) const;

  /// X_tail x X_head intersected with the edge's coupling constraints.
  ConvexSet EdgeFeasibleSet(const GcsEdge& edge) const;

 private:
  std::vector<GcsVertex> vertices_;
  std::vector<GcsEdge> edges_;
  std::vector<std::string> sources_;
  std::vector<std::string> targets_;
  std::vector<std::string> input_issues_;
  std::map<std::string, int> index_;
  std::vector<std::vector<int>> out_;
};

struct ValidationReport {
  std::vector<std::string> issues;

  bool ok() const { return issues.empty(); }
  /// True when some issue contains `text`.
  bool Mentions(const std::string& text) const;
};

/// Checks vertex sets (bounded, nonempty), edges (known endpoints, no
/// self-loops, consistent dimensions, nonnegative length on 100 samples of the
/// edge's feasible set), and that sources and targets exist.
ValidationReport ValidateGraph(const GcsGraph& graph);

/// All simple s-t paths with at most `max_len` edges, in lexicographic order
/// of the vertex-id sequence.
std::vector<PathSeq> EnumeratePaths(const GcsGraph& graph, const std::string& s,
                                    const std::string& t, int max_len);

/// Lists violated trajectory invariants: edges exist, vertices distinct,
/// points in their sets and consecutive pairs in the edge constraints.
ValidationReport ValidateTrajectory(const GcsGraph& graph, const Trajectory& trajectory,
                                    double tol = kMembershipTol);

/// Sum of edge lengths along the trajectory.
double TrajectoryCost(const GcsGraph& graph, const Trajectory& trajectory);

/// True when every edge has a reverse edge whose length and coupling
/// constraints are the mirror images of its own.
bool IsSymmetric(const GcsGraph& graph, double tol = 1e-12);

/// 64-bit FNV-1a hash; used for fingerprints and per-object seeds.
std::uint64_t Fnv1a64(std::string_view data);

/// Reverses a trajectory on a symmetric graph. Throws std::invalid_argument
/// when the graph is not symmetric.
Trajectory ReverseTrajectory(const GcsGraph& graph, const Trajectory& trajectory);

}  // namespace mqgcs
