#include "sprocedure.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

namespace mqgcs::detail {

namespace {

constexpr double kTrivialRow = 1e-12;
constexpr double kInconsistent = 1e-9;

Matrix BlockDiagonal(const Matrix& A, const Matrix& B) {
  Matrix out = Matrix::Zero(A.rows() + B.rows(), A.cols() + B.cols());
  out.topLeftCorner(A.rows(), A.cols()) = A;
  out.bottomRightCorner(B.rows(), B.cols()) = B;
  return out;
}

Vector Stack(const Vector& a, const Vector& b) {
  Vector out(a.size() + b.size());
  out << a, b;
  return out;
}

Matrix AffineMatrixOf(const Vector& g) {
  // g^T [1;z] as a homogeneous quadratic matrix.
  Matrix G = Matrix::Zero(g.size(), g.size());
  G.col(0) += 0.5 * g;
  G.row(0) += 0.5 * g.transpose();
  return G;
}

// Collects the constraints of `set` (over variables placed at `index`) as
// functions that are nonnegative on the set. Returns false when a constraint
// is trivially violated.
bool Collect(const ConvexSet& set, const std::vector<int>& index, int dim,
             std::vector<Matrix>& inequalities, std::vector<Vector>& equalities,
             std::vector<Vector>& affine) {
  auto lift_vector = [&](const Vector& a, double b, double sign_b) {
    // Homogeneous vector of sign_b * b - a^T x, mapped into z.
    Vector g = Vector::Zero(dim + 1);
    g(0) = sign_b * b;
    for (Eigen::Index i = 0; i < a.size(); ++i) g(index[i + 1]) -= a(i);
    return g;
  };
  for (const auto& c : set.inequalities()) {
    const double na = c.a.norm();
    if (na <= kTrivialRow * std::max(1.0, std::abs(c.b))) {
      if (c.b < -kInconsistent) return false;
      continue;
    }
    const Vector g = lift_vector(c.a, c.b, 1.0) / na;
    inequalities.push_back(AffineMatrixOf(g));
    affine.push_back(g);
  }
  for (const auto& c : set.equalities()) {
    const double na = c.a.norm();
    if (na <= kTrivialRow * std::max(1.0, std::abs(c.b))) {
      if (std::abs(c.b) > kInconsistent) return false;
      continue;
    }
    equalities.push_back(-lift_vector(c.a, c.b, 1.0) / na);
  }
  for (const auto& q : set.quadratics()) {
    const double scale = q.coeffs().cwiseAbs().maxCoeff();
    if (scale == 0.0) continue;
    inequalities.push_back(-EmbedHomogeneous(q.coeffs(), index, dim) / scale);
  }
  return true;
}

// Replaces the equality vectors by an orthonormal basis of their span, so
// that the multiplier terms of one edge are not redundant.
void Orthonormalize(std::vector<Vector>& equalities) {
  if (equalities.empty()) return;
  Matrix E(equalities.front().size(), static_cast<Eigen::Index>(equalities.size()));
  for (std::size_t i = 0; i < equalities.size(); ++i) E.col(static_cast<Eigen::Index>(i)) = equalities[i];
  Eigen::ColPivHouseholderQR<Matrix> qr(E);
  qr.setThreshold(1e-10);
  const Eigen::Index rank = qr.rank();
  const Matrix Q = qr.householderQ();
  equalities.clear();
  for (Eigen::Index i = 0; i < rank; ++i) equalities.push_back(Q.col(i));
}

}  // namespace

Matrix VertexFrame::ToReduced() const {
  const int n = static_cast<int>(origin.size());
  Matrix T = Matrix::Zero(k + 1, n + 1);
  T(0, 0) = 1.0;
  if (k > 0) {
    T.block(1, 0, k, 1) = -Pinv * origin;
    T.block(1, 1, k, n) = Pinv;
  }
  return T;
}

GcsGraph PinTarget(const GcsGraph& graph, const std::string& target, const Vector& point) {
  GcsGraph pinned;
  for (const auto& v : graph.vertices()) {
    pinned.AddVertex(v.id, v.id == target ? ConvexSet::Point(point) : v.set);
  }
  for (const auto& e : graph.edges()) pinned.AddEdge(e.tail, e.head, e.length, e.joint_set);
  for (const auto& s : graph.sources()) pinned.AddSource(s);
  for (const auto& t : graph.targets()) pinned.AddTarget(t);
  return pinned;
}

int BoundDimension(const NormalizedProblem& np, int v) {
  return np.frames[v].k + (np.joint ? np.frames[np.target].k : 0);
}

Matrix BoundToReduced(const NormalizedProblem& np, int v) {
  const Matrix Tv = np.frames[v].ToReduced();
  if (!np.joint) return Tv;
  const Matrix Tt = np.frames[np.target].ToReduced();
  const Eigen::Index kv = Tv.rows() - 1, nv = Tv.cols() - 1;
  const Eigen::Index kt = Tt.rows() - 1, nt = Tt.cols() - 1;
  Matrix T = Matrix::Zero(1 + kv + kt, 1 + nv + nt);
  T(0, 0) = 1.0;
  T.block(1, 0, kv, 1) = Tv.block(1, 0, kv, 1);
  T.block(1, 1, kv, nv) = Tv.block(1, 1, kv, nv);
  T.block(1 + kv, 0, kt, 1) = Tt.block(1, 0, kt, 1);
  T.block(1 + kv, 1 + nv, kt, nt) = Tt.block(1, 1, kt, nt);
  return T;
}

Matrix BoundFromReduced(const NormalizedProblem& np, int v) {
  auto single = [](const VertexFrame& f) {
    const Eigen::Index n = f.origin.size();
    Matrix A = Matrix::Zero(n + 1, f.k + 1);
    A(0, 0) = 1.0;
    A.block(1, 0, n, 1) = f.origin;
    A.block(1, 1, n, f.k) = f.P;
    return A;
  };
  const Matrix Av = single(np.frames[v]);
  if (!np.joint) return Av;
  const Matrix At = single(np.frames[np.target]);
  const Eigen::Index nv = Av.rows() - 1, kv = Av.cols() - 1;
  const Eigen::Index nt = At.rows() - 1, kt = At.cols() - 1;
  Matrix A = Matrix::Zero(1 + nv + nt, 1 + kv + kt);
  A(0, 0) = 1.0;
  A.block(1, 0, nv, 1) = Av.block(1, 0, nv, 1);
  A.block(1, 1, nv, kv) = Av.block(1, 1, nv, kv);
  A.block(1 + nv, 0, nt, 1) = At.block(1, 0, nt, 1);
  A.block(1 + nv, 1 + kv, nt, kt) = At.block(1, 1, nt, kt);
  return A;
}

std::vector<int> BoundEmbedding(int k, int offset, int k_t, int target_offset) {
  std::vector<int> index{0};
  for (int i = 0; i < k; ++i) index.push_back(offset + i + 1);
  if (target_offset >= 0) {
    for (int i = 0; i < k_t; ++i) index.push_back(target_offset + i + 1);
  }
  return index;
}

Matrix EmbedHomogeneous(const Matrix& Q, const std::vector<int>& index, int dim) {
  Matrix out = Matrix::Zero(dim + 1, dim + 1);
  for (Eigen::Index r = 0; r < Q.rows(); ++r) {
    for (Eigen::Index c = 0; c < Q.cols(); ++c) out(index[r], index[c]) += Q(r, c);
  }
  return out;
}

NormalizedProblem Normalize(const GcsGraph& graph, const std::string& target, bool joint,
                            bool pairwise_products) {
  NormalizedProblem np;
  np.joint = joint;
  np.target = graph.IndexOf(target);
  const int nv = graph.num_vertices();

  // Backward reachability from the target.
  std::vector<std::vector<int>> incoming(nv);
  for (int e = 0; e < static_cast<int>(graph.edges().size()); ++e) {
    const auto& edge = graph.edges()[e];
    if (graph.HasVertex(edge.tail) && graph.HasVertex(edge.head)) {
      incoming[graph.IndexOf(edge.head)].push_back(e);
    }
  }
  np.reaches_target.assign(nv, false);
  std::deque<int> queue{np.target};
  np.reaches_target[np.target] = true;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (int e : incoming[v]) {
      const int u = graph.IndexOf(graph.edges()[e].tail);
      if (!np.reaches_target[u]) {
        np.reaches_target[u] = true;
        queue.push_back(u);
      }
    }
  }

  // Affine hulls, centers and the common coordinate scale.
  struct Hull {
    AffineParametrization param;
    AxisBox box;
  };
  std::vector<Hull> hulls(nv);
  double half_extent = 0.0;
  for (int v = 0; v < nv; ++v) {
    const ConvexSet& set = graph.vertices()[v].set;
    const auto hull = set.AffineHull();
    if (!hull) {
      throw SynthesisError("vertex '" + graph.vertices()[v].id + "' has an empty set");
    }
    hulls[v].param = *hull;
    const int k = static_cast<int>(hull->basis.cols());
    if (k > 0) {
      hulls[v].box = set.ComposeAffine(hull->shift, hull->basis).WithoutEqualities().BoundingBox();
      if (np.reaches_target[v]) {
        half_extent = std::max(half_extent, 0.5 * (hulls[v].box.upper - hulls[v].box.lower)
                                                      .cwiseAbs()
                                                      .maxCoeff());
      }
    }
  }
  np.coord_scale = half_extent > 1e-12 ? half_extent : 1.0;
  const double L = np.coord_scale;
  np.frames.resize(nv);
  for (int v = 0; v < nv; ++v) {
    VertexFrame& f = np.frames[v];
    const auto& h = hulls[v];
    f.k = static_cast<int>(h.param.basis.cols());
    f.origin = h.param.shift;
    if (f.k > 0) f.origin += h.param.basis * h.box.center();
    f.P = L * h.param.basis;
    f.Pinv = h.param.basis.transpose() / L;
    f.reduced = graph.vertices()[v].set.ComposeAffine(f.origin, f.P).WithoutEqualities();
  }
  const VertexFrame& ft = np.frames[np.target];
  const int k_t = joint ? ft.k : 0;

  // Edges between vertices that reach the target.
  std::map<std::pair<int, int>, int> by_pair;
  for (int e = 0; e < static_cast<int>(graph.edges().size()); ++e) {
    const auto& edge = graph.edges()[e];
    if (!graph.HasVertex(edge.tail) || !graph.HasVertex(edge.head)) continue;
    const int v = graph.IndexOf(edge.tail);
    const int w = graph.IndexOf(edge.head);
    // A path ends on its first arrival at the target, so edges leaving it
    // never occur on a path to it.
    if (v == w || v == np.target || !np.reaches_target[v] || !np.reaches_target[w]) continue;
    const VertexFrame& fv = np.frames[v];
    const VertexFrame& fw = np.frames[w];
    // In joint mode the arrival point at the target is the target point: the
    // head block and the target block of z coincide.
    const bool into_target = joint && w == np.target;
    EdgeBlock b;
    b.edge = e;
    b.tail = v;
    b.head = w;
    b.head_offset = fv.k;
    b.dim = fv.k + fw.k + (into_target ? 0 : k_t);
    if (joint) b.target_offset = into_target ? fv.k : fv.k + fw.k;
    const Vector shift = Stack(fv.origin, fw.origin);
    const Matrix basis = BlockDiagonal(fv.P, fw.P);
    std::vector<int> pair_index{0};
    for (int i = 0; i < fv.k + fw.k; ++i) pair_index.push_back(i + 1);
    b.length = EmbedHomogeneous(edge.length.ComposeAffine(shift, basis).coeffs(), pair_index,
                                b.dim);
    bool ok = Collect(fv.reduced, BoundEmbedding(fv.k, 0, 0, -1), b.dim, b.inequalities,
                      b.equalities, b.affine);
    ok = ok && Collect(fw.reduced, BoundEmbedding(fw.k, fv.k, 0, -1), b.dim, b.inequalities,
                       b.equalities, b.affine);
    if (!edge.joint_set.unconstrained()) {
      ok = ok && Collect(edge.joint_set.ComposeAffine(shift, basis), pair_index, b.dim,
                         b.inequalities, b.equalities, b.affine);
    }
    const std::size_t own_affine = b.affine.size();
    if (joint && !into_target) {
      ok = ok && Collect(ft.reduced, BoundEmbedding(0, 0, ft.k, b.target_offset), b.dim,
                         b.inequalities, b.equalities, b.affine);
    }
    if (!ok) continue;
    Orthonormalize(b.equalities);
    // Products of target constraints are always kept in joint mode: around a
    // cycle of edges that do not touch the target the bound differences
    // cancel, so without a curvature term in x_t the edge matrices are forced
    // singular in the target directions and the program has no interior.
    if (!pairwise_products) {
      b.affine.erase(b.affine.begin(), b.affine.begin() + static_cast<std::ptrdiff_t>(own_affine));
    }
    by_pair[{v, w}] = static_cast<int>(np.edges.size());
    np.edges.push_back(std::move(b));
  }

  // Cost scale.
  double cost = 0.0;
  for (const auto& b : np.edges) cost = std::max(cost, b.length.cwiseAbs().maxCoeff());
  np.cost_scale = cost > 1e-12 ? cost : 1.0;
  for (auto& b : np.edges) b.length /= np.cost_scale;

  // 2-cycles.
  for (const auto& [key, idx] : by_pair) {
    if (key.first > key.second) continue;
    const auto it = by_pair.find({key.second, key.first});
    if (it == by_pair.end()) continue;
    const int c = static_cast<int>(np.cycles.size());
    np.cycles.push_back(key);
    np.edges[idx].cycle = c;
    np.edges[it->second].cycle = c;
  }

  if (joint) {
    std::vector<Vector> unused_eq;
    Collect(ft.reduced, BoundEmbedding(ft.k, 0, 0, -1), ft.k, np.target_inequalities, unused_eq,
            np.target_affine);
  }
  return np;
}

}  // namespace mqgcs::detail
