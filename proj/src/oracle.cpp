#include "mqgcs/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <set>
#include <thread>

#include "mqgcs/path_program.hpp"

namespace mqgcs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void CheckEndpoint(const GcsGraph& graph, const std::string& v, const Vector& x) {
  if (!graph.HasVertex(v)) throw std::invalid_argument("oracle: unknown vertex '" + v + "'");
  if (!graph.vertex(v).set.Contains(x)) {
    throw std::invalid_argument("oracle: point outside X_" + v);
  }
}

/// Walks from s that end at their first arrival at t, with at most max_edges
/// edges. Lexicographic order.
std::vector<PathSeq> EnumerateWalks(const GcsGraph& graph, const std::string& s,
                                    const std::string& t, int max_edges, std::int64_t limit) {
  std::vector<PathSeq> out;
  PathSeq walk{s};
  auto extend = [&](auto&& self) -> void {
    if (static_cast<int>(walk.size()) - 1 >= max_edges) return;
    std::string last_head;
    for (int e : graph.OutEdges(walk.back())) {
      const std::string& head = graph.edges()[e].head;
      if (head == last_head || !graph.HasVertex(head)) continue;
      last_head = head;
      walk.push_back(head);
      if (head == t) {
        out.push_back(walk);
        if (static_cast<std::int64_t>(out.size()) > limit) {
          throw OracleError("oracle: more than " + std::to_string(limit) + " walks");
        }
      } else {
        self(self);
      }
      walk.pop_back();
    }
  };
  if (s != t) extend(extend);
  return out;
}

OracleSolution SolveSequences(const GcsGraph& graph, const std::vector<PathSeq>& sequences,
                              const Vector& x_s, const Vector& x_t, const OracleOptions& options) {
  std::vector<double> costs(sequences.size(), kInf);
  std::vector<std::vector<Vector>> points(sequences.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < sequences.size(); i = next++) {
      PathProgram program;
      program.path = sequences[i];
      program.first_point = x_s;
      program.last_point = x_t;
      PathSolution sol = SolvePathProgram(graph, program, options.solver);
      if (!sol.optimal()) continue;
      costs[i] = sol.length;
      points[i] = std::move(sol.points);
    }
  };
  const int threads =
      std::clamp(options.threads, 1, std::max(1, static_cast<int>(sequences.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  OracleSolution best;
  best.cost = kInf;
  best.paths_examined = static_cast<std::int64_t>(sequences.size());
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    if (costs[i] < best.cost) {
      best.cost = costs[i];
      best.path = sequences[i];
      best.trajectory = {sequences[i], points[i]};
    }
  }
  return best;
}

OracleSolution BranchAndBound(const GcsGraph& graph, const std::string& s, const Vector& x_s,
                              const std::string& t, const Vector& x_t, int max_edges,
                              const OracleOptions& options) {
  OracleSolution best;
  best.cost = kInf;
  PathSeq path{s};
  std::set<std::string> used{s};
  auto solve = [&](PathProgram program) {
    if (++best.paths_examined > options.max_paths) {
      throw OracleError("oracle: more than " + std::to_string(options.max_paths) + " programs");
    }
    program.path = path;
    program.first_point = x_s;
    return SolvePathProgram(graph, program, options.solver);
  };
  auto consider = [&](const PathSolution& sol) {
    if (sol.optimal() && sol.length < best.cost) {
      best.cost = sol.length;
      best.path = path;
      best.trajectory = sol.trajectory(path);
    }
  };
  // Known paths seed the incumbent so pruning is effective from the start.
  for (const PathSeq& seq : options.incumbents) {
    if (seq.size() < 2 || seq.front() != s || seq.back() != t) continue;
    if (static_cast<int>(seq.size()) - 1 > max_edges) continue;
    if (std::set<std::string>(seq.begin(), seq.end()).size() != seq.size()) continue;
    path = seq;
    PathProgram program;
    program.last_point = x_t;
    consider(solve(program));
  }
  path = {s};
  auto extend = [&](auto&& self) -> void {
    if (static_cast<int>(path.size()) - 1 >= max_edges) return;
    // Children are explored in increasing order of their prefix bound.
    std::vector<std::pair<double, std::string>> children;
    std::string last_head;
    for (int e : graph.OutEdges(path.back())) {
      const std::string& head = graph.edges()[e].head;
      if (head == last_head || !graph.HasVertex(head) || used.count(head) > 0) continue;
      last_head = head;
      path.push_back(head);
      if (head == t) {
        PathProgram program;
        program.last_point = x_t;
        consider(solve(program));
      } else if (const auto bound = options.prune_bound(head)) {
        PathProgram program;
        program.terminal = *bound;
        const PathSolution sol = solve(program);
        if (sol.optimal() && sol.objective < best.cost) children.emplace_back(sol.objective, head);
      }
      path.pop_back();
    }
    std::sort(children.begin(), children.end());
    for (const auto& [value, head] : children) {
      if (value >= best.cost) break;
      path.push_back(head);
      used.insert(head);
      self(self);
      used.erase(head);
      path.pop_back();
    }
  };
  extend(extend);
  return best;
}

OracleSolution TrivialQuery(const std::string& s, const Vector& x_s, const Vector& x_t) {
  OracleSolution sol;
  sol.paths_examined = 1;
  if ((x_s - x_t).norm() <= kMembershipTol) {
    sol.cost = 0.0;
    sol.path = {s};
    sol.trajectory = {sol.path, {x_s}};
  } else {
    sol.cost = kInf;
  }
  return sol;
}

}  // namespace

bool OracleSolution::feasible() const { return std::isfinite(cost); }

OracleSolution ExactSppGcs(const GcsGraph& graph, const std::string& s, const Vector& x_s,
                           const std::string& t, const Vector& x_t, const OracleOptions& options) {
  CheckEndpoint(graph, s, x_s);
  CheckEndpoint(graph, t, x_t);
  if (s == t) return TrivialQuery(s, x_s, x_t);
  const int max_edges = options.max_edges < 0 ? graph.num_vertices() - 1 : options.max_edges;
  if (max_edges < 1) throw std::invalid_argument("ExactSppGcs: max_edges must be >= 1");
  if (options.prune_bound) return BranchAndBound(graph, s, x_s, t, x_t, max_edges, options);
  // Simple paths are counted before their programs are built.
  std::vector<PathSeq> paths = EnumeratePaths(graph, s, t, max_edges);
  if (static_cast<std::int64_t>(paths.size()) > options.max_paths) {
    throw OracleError("oracle: more than " + std::to_string(options.max_paths) + " paths");
  }
  return SolveSequences(graph, paths, x_s, x_t, options);
}

OracleSolution RelaxedWalkOracle(const GcsGraph& graph, const std::string& s, const Vector& x_s,
                                 const std::string& t, const Vector& x_t,
                                 const OracleOptions& options) {
  CheckEndpoint(graph, s, x_s);
  CheckEndpoint(graph, t, x_t);
  if (s == t) return TrivialQuery(s, x_s, x_t);
  const int max_edges = options.max_edges < 0 ? 2 * graph.num_vertices() : options.max_edges;
  if (max_edges < 1) throw std::invalid_argument("RelaxedWalkOracle: max_edges must be >= 1");
  const std::vector<PathSeq> walks = EnumerateWalks(graph, s, t, max_edges, options.max_paths);
  return SolveSequences(graph, walks, x_s, x_t, options);
}

std::vector<int> DiscreteApspTables::Walk(int v, int t) const {
  std::vector<int> walk;
  if (v == t) return {v};
  if (!std::isfinite(cost[v][t])) return walk;
  walk.push_back(v);
  while (v != t) {
    v = successor[v][t];
    walk.push_back(v);
  }
  return walk;
}

DiscreteApspTables FloydWarshall(const DiscreteGraph& graph) {
  const int n = graph.num_vertices;
  DiscreteApspTables tables;
  tables.cost.assign(n, std::vector<double>(n, kInf));
  tables.successor.assign(n, std::vector<int>(n, -1));
  for (int v = 0; v < n; ++v) tables.cost[v][v] = 0.0;
  for (const auto& arc : graph.arcs) {
    if (arc.tail < 0 || arc.tail >= n || arc.head < 0 || arc.head >= n) {
      throw std::invalid_argument("FloydWarshall: arc endpoint out of range");
    }
    if (!(arc.cost >= 0.0)) throw std::invalid_argument("FloydWarshall: negative arc cost");
    if (arc.tail == arc.head) continue;
    if (arc.cost < tables.cost[arc.tail][arc.head]) {
      tables.cost[arc.tail][arc.head] = arc.cost;
      tables.successor[arc.tail][arc.head] = arc.head;
    }
  }
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      if (i == k || !std::isfinite(tables.cost[i][k])) continue;
      for (int j = 0; j < n; ++j) {
        const double via = tables.cost[i][k] + tables.cost[k][j];
        if (via < tables.cost[i][j]) {
          tables.cost[i][j] = via;
          tables.successor[i][j] = tables.successor[i][k];
        }
      }
    }
  }
  return tables;
}

DiscreteGraph ToDiscreteGraph(const GcsGraph& graph) {
  DiscreteGraph out;
  out.num_vertices = graph.num_vertices();
  std::vector<Vector> points;
  for (const auto& v : graph.vertices()) {
    const auto p = v.set.SingletonPoint();
    if (!p) throw std::invalid_argument("ToDiscreteGraph: X_" + v.id + " is not a single point");
    points.push_back(*p);
  }
  for (const auto& e : graph.edges()) {
    if (!graph.HasVertex(e.tail) || !graph.HasVertex(e.head)) continue;
    const int i = graph.IndexOf(e.tail);
    const int j = graph.IndexOf(e.head);
    Vector z(points[i].size() + points[j].size());
    z << points[i], points[j];
    double cost = e.length(z);
    // Rounding in the homogeneous evaluation of a zero length.
    if (cost < 0.0 && cost > -1e-12) cost = 0.0;
    out.arcs.push_back({i, j, cost});
  }
  return out;
}

}  // namespace mqgcs
