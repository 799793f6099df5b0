#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mqgcs/graph.hpp"
#include "mqgcs/solver.hpp"

namespace mqgcs {

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Best s-t trajectory found by exhaustive enumeration.
struct OracleSolution {
  /// +infinity when no enumerated sequence is feasible.
  double cost = 0.0;
  PathSeq path;
  Trajectory trajectory;
  /// Number of vertex sequences whose program was considered.
  std::int64_t paths_examined = 0;

  bool feasible() const;
};

struct OracleOptions {
  /// Maximum number of edges; -1 means |V| - 1 for paths and 2|V| for walks.
  int max_edges = -1;
  /// Enumeration aborts with OracleError beyond this many sequences.
  std::int64_t max_paths = 1'000'000;
  int threads = 1;
  SolverOptions solver;
  /// Optional admissible bound on the cost-to-go from each vertex (nullopt:
  /// the target is unreachable). When set, ExactSppGcs runs a depth-first
  /// branch and bound: a path prefix is pruned once the cost of its program
  /// plus the bound at its last vertex reaches the best cost found. Exactness
  /// then rests on the bound being valid; it does not change the optimum.
  std::function<std::optional<QuadraticForm>(const std::string&)> prune_bound;
  /// Branch and bound only: known s-t paths whose programs are solved first
  /// to seed the incumbent. Any path works; they only speed up pruning.
  std::vector<PathSeq> incumbents;
};

/// Exact SPP in GCS: every simple s-t path with at most max_edges edges is
/// solved as a fixed-path convex program with x_s and x_t pinned; the
/// cheapest wins (ties go to the lexicographically first path). Exact when
/// max_edges >= |V| - 1. With `prune_bound`, paths_examined counts the
/// prefixes and paths whose programs were solved. Throws
/// std::invalid_argument for unknown vertices or points outside their sets.
OracleSolution ExactSppGcs(const GcsGraph& graph, const std::string& s, const Vector& x_s,
                           const std::string& t, const Vector& x_t, const OracleOptions& options = {});

/// Same search over walks, where vertices other than the target may repeat.
/// A walk ends at its first arrival at t. A lower bound on ExactSppGcs.
OracleSolution RelaxedWalkOracle(const GcsGraph& graph, const std::string& s, const Vector& x_s,
                                 const std::string& t, const Vector& x_t,
                                 const OracleOptions& options = {});

/// Directed graph with scalar edge costs on vertices 0..n-1.
struct DiscreteGraph {
  struct Arc {
    int tail = 0;
    int head = 0;
    double cost = 0.0;
  };
  int num_vertices = 0;
  std::vector<Arc> arcs;
};

/// All-pairs costs J*[v][t] and successors: successor[v][t] is the vertex
/// after v on a shortest v-t path (-1 when t is unreachable or v == t).
struct DiscreteApspTables {
  std::vector<std::vector<double>> cost;
  std::vector<std::vector<int>> successor;

  /// Vertex sequence obtained by following successors from v to t; empty
  /// when t is unreachable.
  std::vector<int> Walk(int v, int t) const;
};

/// Floyd-Warshall. Parallel arcs keep the cheapest. Throws
/// std::invalid_argument for negative costs or out-of-range vertices.
DiscreteApspTables FloydWarshall(const DiscreteGraph& graph);

/// Edge costs of a graph whose vertex sets are all singletons, in vertex
/// order. Throws std::invalid_argument when some set is not a single point.
DiscreteGraph ToDiscreteGraph(const GcsGraph& graph);

}  // namespace mqgcs
