#include "mqgcs/path_program.hpp"

#include <stdexcept>

namespace mqgcs {

PathSolution SolvePathProgram(const GcsGraph& graph, const PathProgram& program,
                              const SolverOptions& options) {
  const PathSeq& path = program.path;
  if (path.empty()) throw std::invalid_argument("SolvePathProgram: empty path");
  const int k = static_cast<int>(path.size());
  std::vector<int> offset(k + 1, 0);
  for (int i = 0; i < k; ++i) offset[i + 1] = offset[i] + graph.vertex(path[i]).dimension();
  const int n = offset[k];

  auto pin = [&](ConvexSet& set, int i, const Vector& x) {
    const int d = offset[i + 1] - offset[i];
    if (x.size() != d) throw std::invalid_argument("SolvePathProgram: pinned point dimension");
    for (int j = 0; j < d; ++j) set.AddEquality(Vector::Unit(n, offset[i] + j), x(j));
  };

  ConvexSet feasible(n);
  QuadraticForm objective = QuadraticForm::Zero(n);
  for (int i = 0; i < k; ++i) {
    const bool pinned_first = i == 0 && program.first_point;
    const bool pinned_last = i == k - 1 && program.last_point;
    if (pinned_first) pin(feasible, i, *program.first_point);
    if (pinned_last && !(pinned_first && k == 1)) pin(feasible, i, *program.last_point);
    if (!pinned_first && !pinned_last) {
      feasible.Intersect(graph.vertex(path[i]).set.Lift(n, offset[i]));
    }
    if (i + 1 < k) {
      const GcsEdge* e = graph.FindEdge(path[i], path[i + 1]);
      if (e == nullptr) {
        throw std::invalid_argument("SolvePathProgram: missing edge " + path[i] + "->" +
                                    path[i + 1]);
      }
      objective += e->length.EmbedAt(n, offset[i]);
      if (!e->joint_set.unconstrained()) feasible.Intersect(e->joint_set.Lift(n, offset[i]));
    }
  }
  if (program.terminal) {
    if (program.terminal->dimension() != offset[k] - offset[k - 1]) {
      throw std::invalid_argument("SolvePathProgram: terminal cost dimension");
    }
    objective += program.terminal->EmbedAt(n, offset[k - 1]);
  }

  const SolveResult r = SolveConvexQp(objective, feasible, options);
  PathSolution out;
  out.status = r.status;
  out.iterations = r.iterations;
  if (!r.optimal()) return out;
  out.objective = r.objective_value;
  for (int i = 0; i < k; ++i) out.points.push_back(r.primal.segment(offset[i], offset[i + 1] - offset[i]));
  out.length = 0.0;
  for (int i = 0; i + 1 < k; ++i) {
    const GcsEdge* e = graph.FindEdge(path[i], path[i + 1]);
    Vector z(offset[i + 2] - offset[i]);
    z << out.points[i], out.points[i + 1];
    out.length += e->length(z);
  }
  return out;
}

}  // namespace mqgcs
