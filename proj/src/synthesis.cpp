#include "mqgcs/synthesis.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "mqgcs/conic_program.hpp"
#include "sprocedure.hpp"

namespace mqgcs {

using detail::EdgeBlock;
using detail::NormalizedProblem;

std::string ToString(BoundMode mode) {
  return mode == BoundMode::kAffine ? "affine" : "quadratic";
}

std::string ToString(TargetMode mode) {
  return mode == TargetMode::kFixedPoint ? "fixed_point" : "joint_target";
}

BoundMode ParseBoundMode(const std::string& name) {
  if (name == "affine") return BoundMode::kAffine;
  if (name == "quadratic") return BoundMode::kQuadratic;
  throw std::invalid_argument("unknown bound mode '" + name + "'");
}

TargetMode ParseTargetMode(const std::string& name) {
  if (name == "fixed_point") return TargetMode::kFixedPoint;
  if (name == "joint_target") return TargetMode::kJointTarget;
  throw std::invalid_argument("unknown target mode '" + name + "'");
}

double LowerBoundCertificate::Penalty(const std::string& v, const Vector& x_t) const {
  const auto it = penalties.find(v);
  if (it == penalties.end()) return 0.0;
  if (it->second.dimension() == 0) return it->second.constant();
  return it->second.Evaluate(x_t);
}

double LowerBoundCertificate::PenaltySum(const Vector& x_t) const {
  double sum = 0.0;
  for (const auto& [v, form] : penalties) sum += Penalty(v, x_t);
  for (const auto& [pair, h] : cycle_penalties) sum += h;
  return sum;
}

std::optional<QuadraticForm> LowerBoundCertificate::BoundForm(const std::string& v,
                                                              const Vector& x_t) const {
  const auto it = bounds.find(v);
  if (it == bounds.end()) return std::nullopt;
  if (target_mode == TargetMode::kFixedPoint) return it->second;
  const int n_v = it->second.dimension() - target_dimension;
  return it->second.Restrict(n_v, x_t);
}

namespace {

// Weight of the penalty tie-break relative to the source weights.
constexpr double kPenaltyTieBreak = 1e-4;

/// Symmetric table of program variables for a homogeneous matrix; -1 marks
/// entries fixed at zero.
using VarTable = std::vector<std::vector<int>>;

VarTable MakeSymmetricVars(ConicProgram& program, int size, bool row_zero_only) {
  VarTable vars(size, std::vector<int>(size, -1));
  for (int r = 0; r < size; ++r) {
    for (int c = r; c < size; ++c) {
      if (row_zero_only && r > 0) continue;
      vars[r][c] = vars[c][r] = program.AddVariable();
    }
  }
  return vars;
}

/// Adds sign * V to `lmi`, row/column i of V landing at index[i].
void AddVars(AffineMatrix& lmi, const VarTable& vars, const std::vector<int>& index,
             double sign) {
  for (int r = 0; r < static_cast<int>(vars.size()); ++r) {
    for (int c = r; c < static_cast<int>(vars.size()); ++c) {
      if (vars[r][c] >= 0) lmi.AddTerm(vars[r][c], index[r], index[c], sign);
    }
  }
}

/// LMI asserting that the trailing block [first, size) of V is PSD.
void AddBlockPsd(ConicProgram& program, const VarTable& vars, int first) {
  const int size = static_cast<int>(vars.size());
  if (size - first <= 0) return;
  AffineMatrix lmi(size - first);
  for (int r = first; r < size; ++r) {
    for (int c = r; c < size; ++c) {
      if (vars[r][c] >= 0) lmi.AddTerm(vars[r][c], r - first, c - first, 1.0);
    }
  }
  program.AddLmi(std::move(lmi));
}

int AddNonnegative(ConicProgram& program) {
  const int var = program.AddVariable();
  program.AddInequality({{var, -1.0}}, 0.0);
  return var;
}

Matrix ValueOf(const VarTable& vars, const Vector& y) {
  const int size = static_cast<int>(vars.size());
  Matrix M = Matrix::Zero(size, size);
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) {
      if (vars[r][c] >= 0) M(r, c) = y(vars[r][c]);
    }
  }
  return M;
}

/// E[[1;u_v;u_t][1;u_v;u_t]^T] for independent u_v and u_t given their own
/// homogeneous moment matrices.
Matrix JointMoments(const Matrix& Mv, const Matrix& Mt) {
  const Eigen::Index kv = Mv.rows() - 1, kt = Mt.rows() - 1;
  Matrix W = Matrix::Zero(1 + kv + kt, 1 + kv + kt);
  W.topLeftCorner(1 + kv, 1 + kv) = Mv;
  W(0, 0) = 1.0;
  W.block(0, 1 + kv, 1, kt) = Mt.block(0, 1, 1, kt);
  W.block(1 + kv, 0, kt, 1) = Mt.block(1, 0, kt, 1);
  W.block(1 + kv, 1 + kv, kt, kt) = Mt.block(1, 1, kt, kt);
  const Matrix cross = Mv.block(1, 0, kv, 1) * Mt.block(0, 1, 1, kt);
  W.block(1, 1 + kv, kv, kt) = cross;
  W.block(1 + kv, 1, kt, kv) = cross.transpose();
  return W;
}

SourceDistribution DefaultTargetDistribution(const GcsGraph& graph, const std::string& target) {
  const ConvexSet& set = graph.vertex(target).set;
  if (const auto point = set.SingletonPoint()) {
    return SourceDistribution::PointMass(target, *point);
  }
  if (const auto box = set.AsAxisBox()) {
    return SourceDistribution::UniformBox(target, box->lower, box->upper);
  }
  std::mt19937_64 rng(Fnv1a64(target));
  return SourceDistribution::SampleSet(target, SampleSet(set, 64, rng));
}

struct Program {
  ConicProgram conic;
  std::vector<VarTable> bounds;     // per vertex; empty when unreachable
  std::vector<VarTable> penalties;  // per vertex; 1x1 for scalar penalties
  std::vector<int> cycles;          // per 2-cycle
  struct EdgeVars {
    std::vector<int> inequality;
    struct Equality {
      Matrix basis;  // multiplier = basis * y(vars)
      std::vector<int> vars;
    };
    std::vector<Equality> equality;
    std::vector<int> products;
  };
  std::vector<EdgeVars> edges;
};

Program Assemble(const NormalizedProblem& np, const SynthesisOptions& options) {
  Program p;
  ConicProgram& prog = p.conic;
  prog.SetSense(Sense::kMaximize);
  const int nv = static_cast<int>(np.frames.size());
  const bool affine = options.mode == BoundMode::kAffine;
  const int k_t = np.joint ? np.frames[np.target].k : 0;
  const bool target_dependent = np.joint && options.target_dependent_penalties && k_t > 0;

  p.bounds.resize(nv);
  p.penalties.resize(nv);
  for (int v = 0; v < nv; ++v) {
    // The target's bound is minus the penalty sum, not a variable, and
    // arriving at the target needs no penalty.
    if (!np.reaches_target[v] || v == np.target) continue;
    const int d = detail::BoundDimension(np, v);
    p.bounds[v] = MakeSymmetricVars(prog, d + 1, affine);
    if (!affine) {
      // Convexity in x_v: the u_v block of the quadratic part.
      const int k = np.frames[v].k;
      if (k > 0) {
        AffineMatrix lmi(k);
        for (int r = 1; r <= k; ++r) {
          for (int c = r; c <= k; ++c) lmi.AddTerm(p.bounds[v][r][c], r - 1, c - 1, 1.0);
        }
        prog.AddLmi(std::move(lmi));
      }
    }
    if (!options.penalties) continue;
    if (target_dependent) {
      VarTable H = MakeSymmetricVars(prog, k_t + 1, false);
      AddBlockPsd(prog, H, 1);
      // Nonnegativity on X_t.
      AffineMatrix lmi(k_t + 1);
      std::vector<int> identity(k_t + 1);
      for (int i = 0; i <= k_t; ++i) identity[i] = i;
      AddVars(lmi, H, identity, 1.0);
      for (const Matrix& G : np.target_inequalities) {
        const int mu = AddNonnegative(prog);
        lmi.AddTerm(mu, -G);
      }
      prog.AddLmi(std::move(lmi));
      p.penalties[v] = std::move(H);
    } else {
      p.penalties[v] = VarTable{{AddNonnegative(prog)}};
    }
  }
  if (options.cycle_penalties) {
    for (std::size_t c = 0; c < np.cycles.size(); ++c) p.cycles.push_back(AddNonnegative(prog));
  }

  // Edge LMIs.
  for (const EdgeBlock& b : np.edges) {
    Program::EdgeVars ev;
    AffineMatrix lmi(b.dim + 1);
    lmi.AddConstant(b.length);
    const int k_v = np.frames[b.tail].k;
    const int k_w = np.frames[b.head].k;
    const std::vector<int> target_index = detail::BoundEmbedding(0, 0, k_t, b.target_offset);
    auto add_penalty = [&](const VarTable& H, double sign) {
      if (H.size() == 1) {
        lmi.AddTerm(H[0][0], 0, 0, sign);
      } else if (H.size() > 1) {
        AddVars(lmi, H, target_index, sign);
      }
    };
    if (b.head == np.target) {
      // J_t = -(sum of all penalties).
      for (const VarTable& H : p.penalties) add_penalty(H, -1.0);
      for (int var : p.cycles) lmi.AddTerm(var, 0, 0, -1.0);
    } else {
      AddVars(lmi, p.bounds[b.head],
              detail::BoundEmbedding(k_w, b.head_offset, k_t, b.target_offset), 1.0);
      add_penalty(p.penalties[b.head], 1.0);
    }
    AddVars(lmi, p.bounds[b.tail], detail::BoundEmbedding(k_v, 0, k_t, b.target_offset), -1.0);
    if (b.cycle >= 0 && !p.cycles.empty()) lmi.AddTerm(p.cycles[b.cycle], 0, 0, 1.0);
    for (const Matrix& G : b.inequalities) {
      const int lambda = AddNonnegative(prog);
      lmi.AddTerm(lambda, -G);
      ev.inequality.push_back(lambda);
    }
    if (!b.equalities.empty()) {
      // The equality vectors are orthonormal; completing them to a basis Q,
      // the multiplier of the i-th one is restricted to the span of the
      // columns i.. of Q, which removes the antisymmetric redundancy
      // between pairs of equalities.
      const int m = static_cast<int>(b.equalities.size());
      Matrix E(b.dim + 1, m);
      for (int i = 0; i < m; ++i) E.col(i) = b.equalities[i];
      const Matrix Q = Eigen::HouseholderQR<Matrix>(E).householderQ();
      for (int i = 0; i < m; ++i) {
        Program::EdgeVars::Equality eq;
        eq.basis.resize(b.dim + 1, b.dim + 1 - i);
        eq.basis.col(0) = b.equalities[i];
        eq.basis.rightCols(b.dim - i) = Q.rightCols(b.dim - i);
        for (int j = 0; j < eq.basis.cols(); ++j) {
          const int var = prog.AddVariable();
          lmi.AddTerm(var, -AffineProduct(eq.basis.col(j), b.equalities[i]));
          eq.vars.push_back(var);
        }
        ev.equality.push_back(std::move(eq));
      }
    }
    for (std::size_t i = 0; i < b.affine.size(); ++i) {
      for (std::size_t j = i + 1; j < b.affine.size(); ++j) {
        const int lambda = AddNonnegative(prog);
        lmi.AddTerm(lambda, -AffineProduct(b.affine[i], b.affine[j]));
        ev.products.push_back(lambda);
      }
    }
    prog.AddLmi(std::move(lmi));
    p.edges.push_back(std::move(ev));
  }

  return p;
}

}  // namespace

LowerBoundCertificate SynthesizeBounds(const Scenario& scenario, const std::string& target,
                                       const SynthesisOptions& options) {
  const GcsGraph& original = scenario.graph;
  if (!original.HasVertex(target)) {
    throw SynthesisError("unknown target vertex '" + target + "'");
  }
  const bool joint = options.target_mode == TargetMode::kJointTarget;
  if (options.target_dependent_penalties && !joint) {
    throw SynthesisError("target-dependent penalties require joint target mode");
  }
  const ConvexSet& target_set = original.vertex(target).set;

  LowerBoundCertificate cert;
  cert.mode = options.mode;
  cert.target_mode = options.target_mode;
  cert.penalties_enabled = options.penalties;
  cert.target_dependent_penalties = options.target_dependent_penalties;
  cert.cycle_penalties_enabled = options.cycle_penalties;
  cert.pairwise_products = options.pairwise_products;
  cert.target = target;
  cert.target_dimension = target_set.dimension();
  cert.fingerprint = Fingerprint(scenario);

  // In fixed-point mode the target set is pinned to the target point.
  GcsGraph pinned;
  const GcsGraph* graph = &original;
  if (!joint) {
    if (options.target_point) {
      if (!target_set.Contains(*options.target_point)) {
        throw SynthesisError("target point outside X_" + target);
      }
      cert.target_point = *options.target_point;
    } else if (const auto point = target_set.SingletonPoint()) {
      cert.target_point = *point;
    } else {
      throw SynthesisError("fixed-point target mode needs a singleton X_" + target +
                           " or an explicit target point");
    }
    pinned = detail::PinTarget(original, target, cert.target_point);
    graph = &pinned;
  }

  NormalizedProblem np;
  try {
    np = detail::Normalize(*graph, target, joint, options.pairwise_products);
  } catch (const SynthesisError&) {
    throw;
  } catch (const std::exception& e) {
    throw SynthesisError(std::string("cannot normalize the graph: ") + e.what());
  }
  cert.coord_scale = np.coord_scale;
  cert.cost_scale = np.cost_scale;

  // Source moments in reduced coordinates.
  std::vector<SourceDistribution> dists = options.source_distribution;
  if (dists.empty()) dists = scenario.source_distribution;
  if (dists.empty()) dists = DefaultSourceDistribution(original);
  std::vector<std::pair<int, Matrix>> moments;
  try {
    ValidateDistributions(original, dists);
    Matrix target_moments;
    if (joint) {
      const SourceDistribution td =
          options.target_distribution.value_or(DefaultTargetDistribution(original, target));
      const Matrix Tt = np.frames[np.target].ToReduced();
      target_moments = Tt * SourceMoments(target_set, td) * Tt.transpose();
    }
    for (const auto& dist : dists) {
      if (dist.weight == 0.0) continue;
      const int s = original.IndexOf(dist.vertex);
      if (!np.reaches_target[s]) {
        throw SynthesisError("source '" + dist.vertex + "' cannot reach target '" + target + "'");
      }
      const Matrix Ts = np.frames[s].ToReduced();
      Matrix M = Ts * SourceMoments(original.vertices()[s].set, dist) * Ts.transpose();
      if (joint) M = JointMoments(M, target_moments);
      moments.emplace_back(s, dist.weight * M);
    }
  } catch (const SynthesisError&) {
    throw;
  } catch (const std::exception& e) {
    throw SynthesisError(std::string("invalid source distribution: ") + e.what());
  }

  Program program = Assemble(np, options);
  const int k_t = joint ? np.frames[np.target].k : 0;
  for (const auto& [s, M] : moments) {
    if (s == np.target) {
      // J_t(x_t', x_t) = -(sum of penalties at x_t): pair the penalty
      // coefficients with the target block of the moments.
      auto at = [&](int i) { return i == 0 ? 0 : k_t + i; };
      for (const VarTable& H : program.penalties) {
        for (int r = 0; r < static_cast<int>(H.size()); ++r) {
          for (int c = r; c < static_cast<int>(H.size()); ++c) {
            program.conic.AddObjective(H[r][c], -(r == c ? 1.0 : 2.0) * M(at(r), at(c)));
          }
        }
      }
      for (int var : program.cycles) program.conic.AddObjective(var, -M(0, 0));
      continue;
    }
    const VarTable& J = program.bounds[s];
    for (int r = 0; r < static_cast<int>(J.size()); ++r) {
      for (int c = r; c < static_cast<int>(J.size()); ++c) {
        if (J[r][c] >= 0) program.conic.AddObjective(J[r][c], (r == c ? 1.0 : 2.0) * M(r, c));
      }
    }
  }

  // The objective is often flat in the penalties (they only matter where a
  // walk would undercut the best path), and an interior-point solver then
  // returns penalties from the middle of the optimal face. Large penalties
  // lower every bound near the target by their sum, which the rollout, which
  // waives penalties, sees as spurious attraction towards detours. A tiny
  // tie-break pulls penalties to the smallest optimal values.
  double total_weight = 0.0;
  for (const auto& [s, M] : moments) total_weight += M(0, 0);
  const double tie_break = kPenaltyTieBreak * total_weight;
  std::vector<int> tie_broken;
  for (const VarTable& H : program.penalties) {
    if (!H.empty()) tie_broken.push_back(H[0][0]);
  }
  tie_broken.insert(tie_broken.end(), program.cycles.begin(), program.cycles.end());
  for (int var : tie_broken) program.conic.AddObjective(var, -tie_break);

  const SolveResult result = SolveSdp(program.conic, options.solver);
  cert.solver_iterations = result.iterations;
  cert.solve_time_s = result.wall_time_s;
  switch (result.status) {
    case SolveStatus::kOptimal:
      break;
    case SolveStatus::kUnbounded:
      throw SynthesisError("synthesis program unbounded for target '" + target + "'");
    case SolveStatus::kInfeasible:
      throw SynthesisError("numerical failure: synthesis program reported infeasible for target '" +
                           target + "'");
    case SolveStatus::kNumericalFailure:
      throw SynthesisError("numerical failure while solving for target '" + target + "'");
  }

  // Back to original units.
  const Vector& y = result.primal;
  const double kappa = np.cost_scale;
  double objective = result.objective_value;
  for (int var : tie_broken) objective += tie_break * y(var);
  cert.objective = kappa * objective;
  for (int v = 0; v < static_cast<int>(np.frames.size()); ++v) {
    const std::string& id = original.vertices()[v].id;
    if (!np.reaches_target[v]) {
      cert.unreachable.insert(id);
      continue;
    }
    if (v == np.target) continue;
    const Matrix T = detail::BoundToReduced(np, v);
    cert.bounds.emplace(id, QuadraticForm(kappa * T.transpose() * ValueOf(program.bounds[v], y) * T));
    const VarTable& H = program.penalties[v];
    if (H.empty()) continue;
    if (H.size() == 1) {
      cert.penalties.emplace(id, QuadraticForm::Constant(joint ? cert.target_dimension : 0,
                                                         kappa * y(H[0][0])));
    } else {
      const Matrix Tt = np.frames[np.target].ToReduced();
      cert.penalties.emplace(id, QuadraticForm(kappa * Tt.transpose() * ValueOf(H, y) * Tt));
    }
  }
  for (std::size_t c = 0; c < program.cycles.size(); ++c) {
    const auto [a, b] = np.cycles[c];
    std::string ia = original.vertices()[a].id, ib = original.vertices()[b].id;
    if (ib < ia) std::swap(ia, ib);
    cert.cycle_penalties[{ia, ib}] = kappa * y(program.cycles[c]);
  }
  // The target's bound is minus the penalty sum, a function of x_t only.
  const int n_t = cert.target_dimension;
  QuadraticForm penalty_sum = QuadraticForm::Zero(joint ? n_t : 0);
  for (const auto& [id, h] : cert.penalties) penalty_sum += h;
  for (const auto& [pair, h] : cert.cycle_penalties) {
    penalty_sum += QuadraticForm::Constant(joint ? n_t : 0, h);
  }
  cert.bounds.emplace(target, joint ? (-1.0 * penalty_sum).EmbedAt(2 * n_t, n_t)
                                    : QuadraticForm::Constant(n_t, -penalty_sum.constant()));
  for (std::size_t i = 0; i < np.edges.size(); ++i) {
    const auto& ev = program.edges[i];
    const GcsEdge& edge = original.edges()[np.edges[i].edge];
    EdgeMultipliers m;
    for (int var : ev.inequality) m.inequality.push_back(y(var));
    for (const auto& eq : ev.equality) {
      Vector alpha(eq.vars.size());
      for (std::size_t j = 0; j < eq.vars.size(); ++j) alpha(j) = y(eq.vars[j]);
      m.equality.push_back(eq.basis * alpha);
    }
    for (int var : ev.products) m.products.push_back(y(var));
    cert.multipliers[edge.tail + "->" + edge.head] = std::move(m);
  }
  return cert;
}

std::map<std::string, LowerBoundCertificate> SynthesizeAllTargets(
    const Scenario& scenario, const std::vector<std::string>& targets,
    const SynthesisOptions& options) {
  if (targets.empty()) throw SynthesisError("no targets");
  const auto& declared = scenario.graph.targets();
  for (const auto& t : targets) {
    if (std::find(declared.begin(), declared.end(), t) == declared.end()) {
      throw SynthesisError("target '" + t + "': not a declared target");
    }
  }
  std::vector<std::optional<LowerBoundCertificate>> results(targets.size());
  std::vector<std::string> errors(targets.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < targets.size(); i = next++) {
      try {
        results[i] = SynthesizeBounds(scenario, targets[i], options);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const int threads =
      std::clamp(options.solver.threads, 1, static_cast<int>(targets.size()));
  std::vector<std::thread> pool;
  for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::map<std::string, LowerBoundCertificate> out;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (!results[i]) throw SynthesisError("target '" + targets[i] + "': " + errors[i]);
    out.emplace(targets[i], std::move(*results[i]));
  }
  return out;
}

double EvaluateBound(const GcsGraph& graph, const LowerBoundCertificate& cert,
                     const std::string& v, const Vector& x_v, const std::optional<Vector>& x_t) {
  const GcsVertex& vertex = graph.vertex(v);
  if (x_v.size() != vertex.dimension() || !vertex.set.Contains(x_v, kMembershipTol)) {
    throw std::invalid_argument("point outside X_" + v);
  }
  const bool joint = cert.target_mode == TargetMode::kJointTarget;
  if (joint && !x_t) throw std::invalid_argument("joint-target bound needs x_t");
  if (cert.unreachable.count(v)) return std::numeric_limits<double>::infinity();
  const auto it = cert.bounds.find(v);
  if (it == cert.bounds.end()) throw std::out_of_range("no bound for vertex '" + v + "'");
  if (!joint) return it->second.Evaluate(x_v);
  if (x_t->size() != cert.target_dimension) {
    throw std::invalid_argument("x_t has the wrong dimension");
  }
  Vector z(x_v.size() + x_t->size());
  z << x_v, *x_t;
  return it->second.Evaluate(z);
}

}  // namespace mqgcs
