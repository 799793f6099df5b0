#include "mqgcs/policy.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <limits>
#include <stdexcept>
#include <thread>

namespace mqgcs {

namespace {

constexpr double kTieTol = 1e-9;

void ExtendCandidates(const GcsGraph& graph, const RolloutState& state, int horizon,
                      const std::string& target, PathSeq& prefix, std::set<std::string>& used,
                      std::vector<PathSeq>& out) {
  const std::string& from = prefix.empty() ? state.current_vertex : prefix.back();
  std::string last_head;
  for (int e : graph.OutEdges(from)) {
    const std::string& head = graph.edges()[e].head;
    if (head == last_head) continue;  // parallel edges: FindEdge uses the first
    last_head = head;
    if (used.count(head) > 0 || !graph.HasVertex(head)) continue;
    if (prefix.empty() && state.excluded_first_steps.count(head) > 0) continue;
    prefix.push_back(head);
    if (head == target || static_cast<int>(prefix.size()) == horizon) {
      out.push_back(prefix);
    } else {
      used.insert(head);
      ExtendCandidates(graph, state, horizon, target, prefix, used, out);
      used.erase(head);
    }
    prefix.pop_back();
  }
}

void CheckTarget(const LowerBoundCertificate& cert, const std::string& target) {
  if (cert.target != target) {
    throw std::invalid_argument("certificate is for target '" + cert.target + "', not '" +
                                target + "'");
  }
}

void CheckPoint(const GcsGraph& graph, const std::string& v, const Vector& x, const char* what) {
  if (!graph.HasVertex(v)) throw std::invalid_argument(std::string("unknown ") + what + " '" + v + "'");
  if (!graph.vertex(v).set.Contains(x)) {
    throw std::invalid_argument(std::string(what) + " point outside X_" + v);
  }
}

}  // namespace

std::string_view ToString(RolloutStatus status) {
  switch (status) {
    case RolloutStatus::kSuccess:
      return "success";
    case RolloutStatus::kExhausted:
      return "exhausted";
    case RolloutStatus::kIterationCap:
      return "iteration_cap";
    case RolloutStatus::kReoptimizationFailed:
      return "reoptimization_failed";
  }
  return "unknown";
}

std::vector<PathSeq> LookaheadCandidates(const GcsGraph& graph, const RolloutState& state,
                                         int horizon, const std::string& target) {
  if (horizon < 1) throw std::invalid_argument("LookaheadCandidates: horizon must be >= 1");
  std::vector<PathSeq> out;
  if (state.current_vertex == target) return out;
  std::set<std::string> used(state.visited.begin(), state.visited.end());
  used.insert(state.current_vertex);
  PathSeq prefix;
  ExtendCandidates(graph, state, horizon, target, prefix, used, out);
  return out;
}

std::optional<LookaheadCandidate> EvaluateCandidate(const GcsGraph& graph,
                                                    const LowerBoundCertificate& cert,
                                                    const RolloutState& state, const PathSeq& sequence,
                                                    const Vector& target_point,
                                                    const SolverOptions& options) {
  if (sequence.empty()) throw std::invalid_argument("EvaluateCandidate: empty sequence");
  PathProgram program;
  program.path.push_back(state.current_vertex);
  program.path.insert(program.path.end(), sequence.begin(), sequence.end());
  program.first_point = state.current_point;
  const std::string& last = sequence.back();
  if (last == cert.target) {
    program.last_point = target_point;
  } else {
    const auto bound = cert.BoundForm(last, target_point);
    if (!bound) return std::nullopt;
    program.terminal = *bound;
  }
  const PathSolution solution = SolvePathProgram(graph, program, options);
  if (!solution.optimal()) return std::nullopt;
  return LookaheadCandidate{sequence, solution.objective, solution.points[1]};
}

StepDecision StepPolicy(const GcsGraph& graph, const LowerBoundCertificate& cert,
                        const RolloutState& state, const std::string& target,
                        const Vector& target_point, const PolicyOptions& options) {
  CheckTarget(cert, target);
  const std::vector<PathSeq> sequences = LookaheadCandidates(graph, state, options.horizon, target);
  std::vector<std::optional<LookaheadCandidate>> results(sequences.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < sequences.size(); i = next++) {
      results[i] = EvaluateCandidate(graph, cert, state, sequences[i], target_point, options.solver);
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

  StepDecision decision;
  decision.programs_solved = static_cast<int>(sequences.size());
  // Sequences are in lexicographic order, so the first of tied values wins.
  for (auto& r : results) {
    if (!r) continue;
    if (!decision.best || r->value < decision.best->value - kTieTol) decision.best = std::move(r);
  }
  return decision;
}

PathSolution ReoptimizePath(const GcsGraph& graph, const PathSeq& path, const Vector& source_point,
                            const Vector& target_point, const SolverOptions& options) {
  PathProgram program;
  program.path = path;
  program.first_point = source_point;
  program.last_point = target_point;
  return SolvePathProgram(graph, program, options);
}

RolloutResult Rollout(const GcsGraph& graph, const LowerBoundCertificate& cert,
                      const std::string& source, const Vector& source_point,
                      const std::string& target, const Vector& target_point,
                      const PolicyOptions& options) {
  CheckPoint(graph, source, source_point, "source");
  CheckPoint(graph, target, target_point, "target");
  CheckTarget(cert, target);
  const auto start = std::chrono::steady_clock::now();

  RolloutResult result;
  RolloutState state;
  state.current_vertex = source;
  state.current_point = source_point;
  // Ancestor states, restored on backtracking.
  std::vector<RolloutState> stack;
  std::vector<Vector> points;  // committed points, parallel to state.visited

  int iteration = 0;
  bool reached = source == target;
  while (!reached) {
    if (iteration >= options.max_iters) {
      result.status = RolloutStatus::kIterationCap;
      break;
    }
    state.iteration = iteration++;
    const StepDecision step = StepPolicy(graph, cert, state, target, target_point, options);
    result.diagnostics.programs_solved += step.programs_solved;
    if (!step.best) {
      if (stack.empty()) {
        result.status = RolloutStatus::kExhausted;
        break;
      }
      const std::string failed = state.current_vertex;
      state = std::move(stack.back());
      stack.pop_back();
      points.pop_back();
      state.excluded_first_steps.insert(failed);
      ++result.diagnostics.backtracks;
      continue;
    }
    const std::string next = step.best->sequence.front();
    stack.push_back(state);
    points.push_back(state.current_point);
    RolloutState child;
    child.visited = state.visited;
    child.visited.push_back(state.current_vertex);
    child.current_vertex = next;
    child.current_point = next == target ? target_point : step.best->first_step_point;
    state = std::move(child);
    reached = next == target;
  }
  result.diagnostics.iterations = iteration;

  if (reached) {
    result.path = state.visited;
    result.path.push_back(state.current_vertex);
    points.push_back(state.current_point);
    result.incremental_trajectory = {result.path, points};
    result.incremental_cost = TrajectoryCost(graph, result.incremental_trajectory);
    if (result.path.size() == 1) {
      result.status = RolloutStatus::kSuccess;
      result.trajectory = result.incremental_trajectory;
      result.cost = result.incremental_cost;
    } else {
      const PathSolution solution =
          ReoptimizePath(graph, result.path, source_point, target_point, options.solver);
      ++result.diagnostics.programs_solved;
      if (solution.optimal()) {
        result.status = RolloutStatus::kSuccess;
        // The incremental points are feasible for the same program, so keep
        // them if solver tolerance leaves the re-optimized cost above them.
        if (solution.length <= result.incremental_cost) {
          result.trajectory = solution.trajectory(result.path);
          result.cost = solution.length;
        } else {
          result.trajectory = result.incremental_trajectory;
          result.cost = result.incremental_cost;
        }
      } else {
        result.status = RolloutStatus::kReoptimizationFailed;
      }
    }
  }
  result.diagnostics.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

double LookaheadValue(const GcsGraph& graph, const LowerBoundCertificate& cert,
                      const std::string& vertex, const Vector& point, int horizon,
                      const std::string& target, const Vector& target_point,
                      const SolverOptions& options) {
  CheckTarget(cert, target);
  if (vertex == target) return 0.0;
  RolloutState state;
  state.current_vertex = vertex;
  state.current_point = point;
  double best = std::numeric_limits<double>::infinity();
  for (const PathSeq& seq : LookaheadCandidates(graph, state, horizon, target)) {
    if (const auto c = EvaluateCandidate(graph, cert, state, seq, target_point, options)) {
      best = std::min(best, c->value);
    }
  }
  return best;
}

}  // namespace mqgcs
