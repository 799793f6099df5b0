#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mqgcs/moments.hpp"
#include "mqgcs/scenario_io.hpp"
#include "mqgcs/solver.hpp"

namespace mqgcs {

enum class BoundMode { kAffine, kQuadratic };
enum class TargetMode { kFixedPoint, kJointTarget };

std::string ToString(BoundMode mode);
std::string ToString(TargetMode mode);
BoundMode ParseBoundMode(const std::string& name);
TargetMode ParseTargetMode(const std::string& name);

struct SynthesisOptions {
  BoundMode mode = BoundMode::kQuadratic;
  /// Per-vertex revisit penalties h_v >= 0.
  bool penalties = true;
  TargetMode target_mode = TargetMode::kFixedPoint;
  /// Joint mode only: h_v becomes a convex quadratic of x_t, nonnegative on X_t.
  bool target_dependent_penalties = false;
  /// Extra penalty shared by the two edges of each 2-cycle.
  bool cycle_penalties = false;
  /// Adds products of pairs of affine inequalities to the S-procedure. In
  /// joint mode, products among the X_t inequalities are always included.
  bool pairwise_products = false;
  /// Fixed mode: target point; defaults to the point of a singleton X_t.
  std::optional<Vector> target_point;
  /// Overrides the scenario's source distribution.
  std::vector<SourceDistribution> source_distribution;
  /// Joint mode: distribution of x_t; defaults to uniform over a box X_t or
  /// samples of X_t otherwise.
  std::optional<SourceDistribution> target_distribution;
  SolverOptions solver;
};

/// S-procedure multipliers of one edge, in normalized units and in the order
/// the constraints are enumerated (tail set, head set, coupling, target set).
struct EdgeMultipliers {
  std::vector<double> inequality;
  std::vector<Vector> equality;
  std::vector<double> products;
};

/// Offline product for one target: convex quadratic lower bounds J_v on the
/// cost-to-go, revisit penalties and the data needed to re-verify them.
struct LowerBoundCertificate {
  BoundMode mode = BoundMode::kQuadratic;
  TargetMode target_mode = TargetMode::kFixedPoint;
  bool penalties_enabled = true;
  bool target_dependent_penalties = false;
  bool cycle_penalties_enabled = false;
  bool pairwise_products = false;

  std::string target;
  /// Fixed mode only.
  Vector target_point;
  int target_dimension = 0;

  /// J_v over x_v (fixed mode) or over (x_v, x_t) (joint mode).
  std::map<std::string, QuadraticForm> bounds;
  /// h_v as a form over x_t (joint mode) or a constant form of dimension 0.
  std::map<std::string, QuadraticForm> penalties;
  /// Vertices with no path to the target; their bound is +infinity.
  std::set<std::string> unreachable;
  /// Keyed by the ordered pair (min id, max id).
  std::map<std::pair<std::string, std::string>, double> cycle_penalties;

  double objective = 0.0;
  std::string fingerprint;
  double coord_scale = 1.0;
  double cost_scale = 1.0;
  std::map<std::string, EdgeMultipliers> multipliers;  // key "tail->head"
  int solver_iterations = 0;
  double solve_time_s = 0.0;

  /// h_v at x_t (x_t ignored in fixed mode).
  double Penalty(const std::string& v, const Vector& x_t = Vector()) const;
  /// Sum of all penalties, including 2-cycle penalties.
  double PenaltySum(const Vector& x_t = Vector()) const;
  /// Bound as a quadratic form over x_v, with x_t substituted in joint mode.
  /// nullopt for unreachable vertices.
  std::optional<QuadraticForm> BoundForm(const std::string& v,
                                         const Vector& x_t = Vector()) const;
};

class SynthesisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Assembles and solves the lower-bound program for one target.
/// Throws SynthesisError on invalid input or solver failure.
LowerBoundCertificate SynthesizeBounds(const Scenario& scenario, const std::string& target,
                                       const SynthesisOptions& options = {});

/// One independent certificate per target, solved concurrently on up to
/// options.solver.threads workers. Throws SynthesisError ("no targets") for an
/// empty list and prefixes per-target failures with the target id.
std::map<std::string, LowerBoundCertificate> SynthesizeAllTargets(
    const Scenario& scenario, const std::vector<std::string>& targets,
    const SynthesisOptions& options = {});

/// J_v(x_v) (joint mode: J_v(x_v, x_t)). Throws std::out_of_range for unknown
/// vertices and std::invalid_argument when x_v leaves X_v (tolerance 1e-7) or
/// x_t is missing in joint mode. Returns +infinity for unreachable vertices.
double EvaluateBound(const GcsGraph& graph, const LowerBoundCertificate& cert,
                     const std::string& v, const Vector& x_v,
                     const std::optional<Vector>& x_t = std::nullopt);

}  // namespace mqgcs
