#pragma once

#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "mqgcs/quadratic_form.hpp"

namespace mqgcs {

/// Geometric membership tolerance.
inline constexpr double kMembershipTol = 1e-7;
/// Symmetry tolerance for stored coefficient matrices.
inline constexpr double kSymmetryTol = 1e-12;
/// Slack allowed on the minimum eigenvalue of a PSD block.
inline constexpr double kPsdTol = 1e-9;

/// a^T x (= or <=) b.
struct LinearConstraint {
  Vector a;
  double b = 0.0;
};

struct AxisBox {
  Vector lower;
  Vector upper;

  Vector center() const { return 0.5 * (lower + upper); }
  double diameter() const { return (upper - lower).norm(); }
};

/// Parametrization x = shift + basis * w of an affine subspace.
struct AffineParametrization {
  Vector shift;
  Matrix basis;
};

class UnboundedSetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Intersection of affine equalities, affine inequalities and convex quadratic
/// inequalities g(x) <= 0 in R^n.
class ConvexSet {
 public:
  ConvexSet() = default;
  explicit ConvexSet(int dimension) : dimension_(dimension) {}

  static ConvexSet Box(const Vector& lower, const Vector& upper);
  static ConvexSet Point(const Vector& point);
  /// Segment between two points of R^n.
  static ConvexSet Segment(const Vector& p0, const Vector& p1);
  static ConvexSet Ball(const Vector& center, double radius);

  int dimension() const { return dimension_; }
  const std::vector<LinearConstraint>& equalities() const { return equalities_; }
  const std::vector<LinearConstraint>& inequalities() const { return inequalities_; }
  const std::vector<QuadraticForm>& quadratics() const { return quadratics_; }
  bool unconstrained() const {
    return equalities_.empty() && inequalities_.empty() && quadratics_.empty();
  }

  ConvexSet& AddEquality(const Vector& a, double b);
  ConvexSet& AddInequality(const Vector& a, double b);
  /// Adds g(x) <= 0. Throws if g is not convex.
  ConvexSet& AddQuadratic(const QuadraticForm& g);
  /// Intersects with another set of the same dimension.
  ConvexSet& Intersect(const ConvexSet& other);

  /// Largest constraint violation at x (0 when feasible).
  double MaxViolation(const Vector& x) const;
  bool Contains(const Vector& x, double tol = kMembershipTol) const;

  /// Per-coordinate extent, from 2n convex programs. Throws UnboundedSetError
  /// for unbounded sets and std::runtime_error for empty ones.
  AxisBox BoundingBox() const;

  /// The unique point of the set, if it is a singleton (within tol).
  std::optional<Vector> SingletonPoint(double tol = 1e-9) const;
  /// Recognizes sets made only of +-e_i inequalities bounding every coordinate.
  std::optional<AxisBox> AsAxisBox() const;

  /// Same set placed at coordinates [offset, offset + n) of R^ambient.
  ConvexSet Lift(int ambient, int offset) const;
  /// Composition with x = shift + basis * w.
  ConvexSet ComposeAffine(const Vector& shift, const Matrix& basis) const;

  /// Affine hull of the equalities (the whole space when there are none);
  /// nullopt when the equalities are inconsistent.
  std::optional<AffineParametrization> AffineHull() const;
  /// Copy with the equalities removed.
  ConvexSet WithoutEqualities() const;

 private:
  void RequireDimension(Eigen::Index n, const char* what) const;

  int dimension_ = 0;
  std::vector<LinearConstraint> equalities_;
  std::vector<LinearConstraint> inequalities_;
  std::vector<QuadraticForm> quadratics_;
};

/// Draws `count` points of a bounded, nonempty set. Full-dimensional parts are
/// sampled uniformly by rejection inside the bounding box of the set's affine
/// hull; sets too thin for rejection fall back to random convex combinations
/// of projected box samples. Throws std::runtime_error for empty sets.
std::vector<Vector> SampleSet(const ConvexSet& set, int count, std::mt19937_64& rng);

}  // namespace mqgcs
