#include "mqgcs/graph.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <set>
#include <stdexcept>

namespace mqgcs {

namespace {

constexpr int kLengthSamples = 100;
constexpr double kLengthTol = -1e-9;

std::string EdgeName(const GcsEdge& e) { return e.tail + "->" + e.head; }

// Matrix P with (x_tail, x_head) = P (x_head, x_tail).
Matrix SwapMatrix(int n_tail, int n_head) {
  Matrix P = Matrix::Zero(n_tail + n_head, n_tail + n_head);
  for (int i = 0; i < n_tail; ++i) P(i, n_head + i) = 1.0;
  for (int i = 0; i < n_head; ++i) P(n_tail + i, i) = 1.0;
  return P;
}

bool SameLinear(const LinearConstraint& x, const LinearConstraint& y, bool either_sign,
                double tol) {
  const double nx = std::max(x.a.norm(), std::abs(x.b));
  const double ny = std::max(y.a.norm(), std::abs(y.b));
  if (nx == 0.0 || ny == 0.0) return nx == ny;
  auto close = [&](double s) {
    return (x.a / nx - s * y.a / ny).cwiseAbs().maxCoeff() <= tol &&
           std::abs(x.b / nx - s * y.b / ny) <= tol;
  };
  return close(1.0) || (either_sign && close(-1.0));
}

template <typename T, typename Eq>
bool SameMultiset(const std::vector<T>& xs, const std::vector<T>& ys, Eq eq) {
  if (xs.size() != ys.size()) return false;
  std::vector<bool> used(ys.size(), false);
  for (const auto& x : xs) {
    bool found = false;
    for (std::size_t j = 0; j < ys.size() && !found; ++j) {
      if (!used[j] && eq(x, ys[j])) used[j] = found = true;
    }
    if (!found) return false;
  }
  return true;
}

}  // namespace

const GcsVertex& GcsGraph::AddVertex(std::string id, ConvexSet set) {
  if (set.dimension() <= 0) {
    throw std::invalid_argument("GcsGraph::AddVertex: vertex '" + id + "' has no dimension");
  }
  if (index_.count(id)) {
    throw std::invalid_argument("GcsGraph::AddVertex: duplicate vertex id '" + id + "'");
  }
  index_[id] = static_cast<int>(vertices_.size());
  vertices_.push_back({std::move(id), std::move(set)});
  out_.emplace_back();
  // Edges added before their tail existed are attached now.
  const std::string& name = vertices_.back().id;
  for (int e = 0; e < static_cast<int>(edges_.size()); ++e) {
    if (edges_[e].tail == name) out_.back().push_back(e);
  }
  auto& list = out_.back();
  std::stable_sort(list.begin(), list.end(),
                   [&](int a, int b) { return edges_[a].head < edges_[b].head; });
  return vertices_.back();
}

void GcsGraph::AddEdge(std::string tail, std::string head, QuadraticForm length,
                       ConvexSet joint_set) {
  if (joint_set.dimension() == 0 && HasVertex(tail) && HasVertex(head)) {
    joint_set = ConvexSet(vertex(tail).dimension() + vertex(head).dimension());
  }
  edges_.push_back({std::move(tail), std::move(head), std::move(joint_set), std::move(length)});
  const int e = static_cast<int>(edges_.size()) - 1;
  const auto it = index_.find(edges_[e].tail);
  if (it == index_.end()) return;
  auto& list = out_[it->second];
  const auto pos = std::upper_bound(list.begin(), list.end(), e, [&](int a, int b) {
    return edges_[a].head < edges_[b].head;
  });
  list.insert(pos, e);
}

int GcsGraph::IndexOf(const std::string& id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) throw std::out_of_range("unknown vertex '" + id + "'");
  return it->second;
}

const GcsEdge* GcsGraph::FindEdge(const std::string& tail, const std::string& head) const {
  const auto it = index_.find(tail);
  if (it == index_.end()) return nullptr;
  for (int e : out_[it->second]) {
    if (edges_[e].head == head) return &edges_[e];
  }
  return nullptr;
}

const std::vector<int>& GcsGraph::OutEdges(const std::string& id) const {
  return out_[IndexOf(id)];
}

ConvexSet GcsGraph::EdgeFeasibleSet(const GcsEdge& edge) const {
  const ConvexSet& tail = vertex(edge.tail).set;
  const ConvexSet& head = vertex(edge.head).set;
  const int n = tail.dimension() + head.dimension();
  ConvexSet out = tail.Lift(n, 0);
  out.Intersect(head.Lift(n, tail.dimension()));
  if (edge.joint_set.dimension() == n) out.Intersect(edge.joint_set);
  return out;
}

bool ValidationReport::Mentions(const std::string& text) const {
  return std::any_of(issues.begin(), issues.end(),
                     [&](const std::string& s) { return s.find(text) != std::string::npos; });
}

ValidationReport ValidateGraph(const GcsGraph& graph) {
  ValidationReport report;
  report.issues = graph.input_issues();
  std::vector<bool> usable(graph.num_vertices(), true);
  for (int i = 0; i < graph.num_vertices(); ++i) {
    const auto& v = graph.vertices()[i];
    try {
      v.set.BoundingBox();
    } catch (const UnboundedSetError&) {
      report.issues.push_back("unbounded set at vertex '" + v.id + "'");
      usable[i] = false;
    } catch (const std::runtime_error&) {
      report.issues.push_back("empty set at vertex '" + v.id + "'");
      usable[i] = false;
    }
  }
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& e : graph.edges()) {
    const std::string name = EdgeName(e);
    bool ok = true;
    for (const std::string* end : {&e.tail, &e.head}) {
      if (!graph.HasVertex(*end)) {
        report.issues.push_back("dangling edge " + name + ": unknown vertex '" + *end + "'");
        ok = false;
      }
    }
    if (e.tail == e.head) {
      report.issues.push_back("self-loop at vertex '" + e.tail + "'");
      ok = false;
    }
    if (!seen.insert({e.tail, e.head}).second) {
      report.issues.push_back("duplicate edge " + name);
    }
    if (!ok) continue;
    const int n = graph.vertex(e.tail).dimension() + graph.vertex(e.head).dimension();
    if (e.length.dimension() != n) {
      report.issues.push_back("dimension mismatch: length of edge " + name);
      continue;
    }
    if (e.joint_set.dimension() != n) {
      report.issues.push_back("dimension mismatch: joint set of edge " + name);
      continue;
    }
    if (!usable[graph.IndexOf(e.tail)] || !usable[graph.IndexOf(e.head)]) continue;
    std::mt19937_64 rng(Fnv1a64(name));
    std::vector<Vector> samples;
    try {
      samples = SampleSet(graph.EdgeFeasibleSet(e), kLengthSamples, rng);
    } catch (const std::runtime_error&) {
      report.issues.push_back("empty feasible set on edge " + name);
      continue;
    }
    for (const auto& z : samples) {
      const double value = e.length(z);
      if (value < kLengthTol) {
        report.issues.push_back("negative edge length on " + name + " (" +
                                std::to_string(value) + ")");
        break;
      }
    }
  }
  for (const auto& s : graph.sources()) {
    if (!graph.HasVertex(s)) report.issues.push_back("unknown source vertex '" + s + "'");
  }
  for (const auto& t : graph.targets()) {
    if (!graph.HasVertex(t)) report.issues.push_back("unknown target vertex '" + t + "'");
  }
  return report;
}

std::vector<PathSeq> EnumeratePaths(const GcsGraph& graph, const std::string& s,
                                    const std::string& t, int max_len) {
  std::vector<PathSeq> out;
  if (!graph.HasVertex(s) || !graph.HasVertex(t)) return out;
  if (s == t) {
    out.push_back({s});
    return out;
  }
  PathSeq path{s};
  std::vector<bool> on_path(graph.num_vertices(), false);
  on_path[graph.IndexOf(s)] = true;
  // Out-edges are sorted by head id, so depth-first order is lexicographic.
  std::function<void(const std::string&)> dfs = [&](const std::string& v) {
    if (static_cast<int>(path.size()) - 1 >= max_len) return;
    for (int e : graph.OutEdges(v)) {
      const std::string& w = graph.edges()[e].head;
      if (!graph.HasVertex(w)) continue;
      const int wi = graph.IndexOf(w);
      if (on_path[wi]) continue;
      path.push_back(w);
      if (w == t) {
        out.push_back(path);
      } else {
        on_path[wi] = true;
        dfs(w);
        on_path[wi] = false;
      }
      path.pop_back();
    }
  };
  dfs(s);
  return out;
}

ValidationReport ValidateTrajectory(const GcsGraph& graph, const Trajectory& trajectory,
                                    double tol) {
  ValidationReport report;
  const auto& path = trajectory.path;
  if (path.empty()) {
    report.issues.push_back("empty path");
    return report;
  }
  if (trajectory.points.size() != path.size()) {
    report.issues.push_back("point count differs from path length");
    return report;
  }
  std::set<std::string> seen;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (!graph.HasVertex(path[i])) {
      report.issues.push_back("unknown vertex '" + path[i] + "'");
      return report;
    }
    if (!seen.insert(path[i]).second) report.issues.push_back("repeated vertex '" + path[i] + "'");
    const auto& set = graph.vertex(path[i]).set;
    if (trajectory.points[i].size() != set.dimension()) {
      report.issues.push_back("dimension mismatch at vertex '" + path[i] + "'");
      return report;
    }
    const double viol = set.MaxViolation(trajectory.points[i]);
    if (viol > tol) {
      report.issues.push_back("point outside set of vertex '" + path[i] + "' (violation " +
                              std::to_string(viol) + ")");
    }
  }
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const GcsEdge* e = graph.FindEdge(path[i], path[i + 1]);
    if (e == nullptr) {
      report.issues.push_back("missing edge " + path[i] + "->" + path[i + 1]);
      continue;
    }
    Vector z(trajectory.points[i].size() + trajectory.points[i + 1].size());
    z << trajectory.points[i], trajectory.points[i + 1];
    const double viol = e->joint_set.MaxViolation(z);
    if (viol > tol) {
      report.issues.push_back("edge constraint violated on " + EdgeName(*e) + " (violation " +
                              std::to_string(viol) + ")");
    }
  }
  return report;
}

double TrajectoryCost(const GcsGraph& graph, const Trajectory& trajectory) {
  double cost = 0.0;
  for (std::size_t i = 0; i + 1 < trajectory.path.size(); ++i) {
    const GcsEdge* e = graph.FindEdge(trajectory.path[i], trajectory.path[i + 1]);
    if (e == nullptr) {
      throw std::invalid_argument("TrajectoryCost: missing edge " + trajectory.path[i] + "->" +
                                  trajectory.path[i + 1]);
    }
    Vector z(trajectory.points[i].size() + trajectory.points[i + 1].size());
    z << trajectory.points[i], trajectory.points[i + 1];
    cost += e->length(z);
  }
  return cost;
}

bool IsSymmetric(const GcsGraph& graph, double tol) {
  for (const auto& e : graph.edges()) {
    if (!graph.HasVertex(e.tail) || !graph.HasVertex(e.head)) return false;
    const GcsEdge* r = graph.FindEdge(e.head, e.tail);
    if (r == nullptr) return false;
    const int nt = graph.vertex(e.tail).dimension();
    const int nh = graph.vertex(e.head).dimension();
    const Matrix P = SwapMatrix(nt, nh);
    const Vector zero = Vector::Zero(nt + nh);
    const QuadraticForm mirrored = e.length.ComposeAffine(zero, P);
    const double scale = std::max(1.0, mirrored.coeffs().cwiseAbs().maxCoeff());
    if ((mirrored.coeffs() - r->length.coeffs()).cwiseAbs().maxCoeff() > tol * scale) {
      return false;
    }
    const ConvexSet joint = e.joint_set.ComposeAffine(zero, P);
    auto eq = [&](const LinearConstraint& x, const LinearConstraint& y) {
      return SameLinear(x, y, true, 1e3 * tol);
    };
    auto ineq = [&](const LinearConstraint& x, const LinearConstraint& y) {
      return SameLinear(x, y, false, 1e3 * tol);
    };
    auto quad = [&](const QuadraticForm& x, const QuadraticForm& y) {
      return (x.coeffs() - y.coeffs()).cwiseAbs().maxCoeff() <=
             tol * std::max(1.0, x.coeffs().cwiseAbs().maxCoeff());
    };
    if (!SameMultiset(joint.equalities(), r->joint_set.equalities(), eq) ||
        !SameMultiset(joint.inequalities(), r->joint_set.inequalities(), ineq) ||
        !SameMultiset(joint.quadratics(), r->joint_set.quadratics(), quad)) {
      return false;
    }
  }
  return true;
}

std::uint64_t Fnv1a64(std::string_view data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

Trajectory ReverseTrajectory(const GcsGraph& graph, const Trajectory& trajectory) {
  if (!IsSymmetric(graph)) {
    throw std::invalid_argument("ReverseTrajectory: graph is not symmetric");
  }
  Trajectory out;
  out.path.assign(trajectory.path.rbegin(), trajectory.path.rend());
  out.points.assign(trajectory.points.rbegin(), trajectory.points.rend());
  return out;
}

}  // namespace mqgcs
