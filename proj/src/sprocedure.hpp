#pragma once

// Normalized S-procedure data shared by the synthesis program and the
// independent certificate check. Each vertex point is written as
//   x_v = origin_v + P_v u_v,
// where the columns of P_v span the affine hull of X_v scaled by the global
// coordinate scale; edge lengths are divided by the global cost scale. All
// constraint functions are expressed in the stacked edge variable
//   z = (u_tail, u_head[, u_target])
// as homogeneous matrices of functions that are nonnegative on the edge set.

#include <string>
#include <vector>

#include "mqgcs/graph.hpp"
#include "mqgcs/synthesis.hpp"

namespace mqgcs::detail {

struct VertexFrame {
  int k = 0;      // reduced dimension
  Vector origin;  // in R^n
  Matrix P;       // n x k
  Matrix Pinv;    // k x n, left inverse of P
  ConvexSet reduced;  // X_v in u coordinates (no equalities)

  /// [1;u] = T [1;x]
  Matrix ToReduced() const;
};

struct EdgeBlock {
  int edge = -1;  // index into graph.edges()
  int tail = -1;
  int head = -1;
  int dim = 0;  // dimension of z
  int head_offset = 0;
  int target_offset = -1;  // joint mode only; equals head_offset on edges into the target
  Matrix length;           // normalized homogeneous length
  std::vector<Matrix> inequalities;  // g >= 0 on the edge set
  std::vector<Vector> equalities;    // e^T [1;z] = 0
  std::vector<Vector> affine;        // homogeneous vectors of the affine g's
  int cycle = -1;                    // index of the 2-cycle this edge belongs to
};

struct NormalizedProblem {
  double coord_scale = 1.0;
  double cost_scale = 1.0;
  int target = -1;
  bool joint = false;
  std::vector<VertexFrame> frames;
  std::vector<bool> reaches_target;
  std::vector<EdgeBlock> edges;
  std::vector<std::pair<int, int>> cycles;  // (min index, max index)
  std::vector<Matrix> target_inequalities;  // X_t constraints in u_t coordinates
  std::vector<Vector> target_affine;
};

/// Builds the normalized data for `target`. Edges whose tail or head cannot
/// reach the target are left out, as are edges leaving the target and edges
/// with trivially infeasible coupling constraints. In joint mode the head
/// block of an edge into the target is the target block itself. Deterministic
/// in the graph and mode.
NormalizedProblem Normalize(const GcsGraph& graph, const std::string& target, bool joint,
                            bool pairwise_products);

/// Copy of `graph` with X_target replaced by the single point `point`; used
/// in fixed-point target mode so that every edge into the target ends there.
GcsGraph PinTarget(const GcsGraph& graph, const std::string& target, const Vector& point);

/// Bound dimension d_v: k_v, plus k_t in joint mode.
int BoundDimension(const NormalizedProblem& np, int v);

/// [1; u_v (; u_t)] = T [1; x_v (; x_t)] for the bound of vertex v.
Matrix BoundToReduced(const NormalizedProblem& np, int v);
/// [1; x_v (; x_t)] = A [1; u_v (; u_t)], the inverse direction on the hull.
Matrix BoundFromReduced(const NormalizedProblem& np, int v);

/// Index map of a bound's coordinates into the edge variable z: the vertex
/// block starts at `offset`; in joint mode the target block follows it in the
/// bound and sits at `target_offset` in z. Entry 0 is the homogeneous one.
std::vector<int> BoundEmbedding(int k, int offset, int k_t, int target_offset);

/// Places the homogeneous matrix Q into a (dim+1)x(dim+1) zero matrix, row
/// and column i of Q going to index[i].
Matrix EmbedHomogeneous(const Matrix& Q, const std::vector<int>& index, int dim);

}  // namespace mqgcs::detail
