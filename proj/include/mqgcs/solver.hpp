#pragma once

#include <span>
#include <string_view>

#include "mqgcs/convex_set.hpp"
#include "mqgcs/quadratic_form.hpp"

namespace mqgcs {

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded, kNumericalFailure };

std::string_view ToString(SolveStatus status);

/// Config keys `solver.accuracy`, `solver.max_iters`, `solver.threads`.
struct SolverOptions {
  double accuracy = 1e-8;
  int max_iters = 200;
  int threads = 1;
};

struct SolveResult {
  SolveStatus status = SolveStatus::kNumericalFailure;
  double objective_value = 0.0;
  /// Values of all program variables; empty unless status is optimal.
  Vector primal;
  int iterations = 0;
  double wall_time_s = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;

  bool optimal() const { return status == SolveStatus::kOptimal; }
};

/// Minimizes a convex quadratic over the intersection of `feasible` (affine
/// equalities, affine inequalities, convex quadratic inequalities).
/// Infeasibility is reported through the status, never thrown.
SolveResult SolveConvexQp(const QuadraticForm& objective, const ConvexSet& feasible,
                          const SolverOptions& options = {});

/// Same as above with the feasible set given as a list of sets over the same
/// stacked variable.
SolveResult SolveConvexQp(const QuadraticForm& objective, std::span<const ConvexSet> sets,
                          const SolverOptions& options = {});

}  // namespace mqgcs
