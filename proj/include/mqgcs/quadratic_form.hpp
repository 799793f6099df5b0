#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace mqgcs {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Quadratic function on R^n stored in homogeneous form
///   f(x) = [1; x]^T Q [1; x],
/// with Q symmetric of size (n+1)x(n+1). Q(0,0) is the constant term, Q(0,1:)
/// is half the linear coefficient, Q(1:,1:) is the Hessian over two.
class QuadraticForm {
 public:
  QuadraticForm() : coeffs_(Matrix::Zero(1, 1)) {}
  /// Symmetrizes `coeffs` on construction.
  explicit QuadraticForm(const Matrix& coeffs);

  static QuadraticForm Zero(int dimension);
  static QuadraticForm Constant(int dimension, double value);
  /// f(x) = a^T x + b.
  static QuadraticForm Affine(const Vector& a, double b);
  /// f(x) = x^T P x + q^T x + r.
  static QuadraticForm FromParts(const Matrix& P, const Vector& q, double r);
  /// ||x - center||^2 on R^n.
  static QuadraticForm SquaredDistanceTo(const Vector& center);
  /// ||x - y||^2 on the joint variable (x, y) in R^n x R^n.
  static QuadraticForm SquaredDistance(int n);

  int dimension() const { return static_cast<int>(coeffs_.rows()) - 1; }
  const Matrix& coeffs() const { return coeffs_; }

  double constant() const { return coeffs_(0, 0); }
  /// Linear coefficient vector q in f(x) = x^T P x + q^T x + r.
  Vector linear() const { return 2.0 * coeffs_.col(0).tail(dimension()); }
  /// Quadratic block P in f(x) = x^T P x + q^T x + r.
  Matrix quadratic() const {
    return coeffs_.bottomRightCorner(dimension(), dimension());
  }

  /// Throws std::invalid_argument on dimension mismatch.
  double Evaluate(const Vector& x) const;
  double operator()(const Vector& x) const { return Evaluate(x); }
  /// Gradient 2 P x + q.
  Vector Gradient(const Vector& x) const;

  /// True when the quadratic block has minimum eigenvalue >= -tol.
  bool IsConvex(double tol = 1e-9) const;
  double MinQuadraticEigenvalue() const;

  /// Lifts to R^ambient with coordinate i of this form mapped to coordinate
  /// index[i] of the ambient space.
  QuadraticForm Embed(int ambient, std::span<const int> index) const;
  /// Lifts to R^ambient with coordinates placed contiguously at `offset`.
  QuadraticForm EmbedAt(int ambient, int offset) const;

  /// Composition with the affine map x = shift + basis * w.
  QuadraticForm ComposeAffine(const Vector& shift, const Matrix& basis) const;

  /// Fixes coordinates [offset, offset + value.size()) to `value` and returns
  /// the form over the remaining coordinates (in their original order).
  QuadraticForm Restrict(int offset, const Vector& value) const;

  QuadraticForm& operator+=(const QuadraticForm& other);
  QuadraticForm& operator-=(const QuadraticForm& other);
  QuadraticForm& operator*=(double scale);
  friend QuadraticForm operator+(QuadraticForm a, const QuadraticForm& b) { return a += b; }
  friend QuadraticForm operator-(QuadraticForm a, const QuadraticForm& b) { return a -= b; }
  friend QuadraticForm operator*(double s, QuadraticForm a) { return a *= s; }

 private:
  Matrix coeffs_;
};

/// Homogeneous matrix of the product of two affine functions
/// (e1^T [1;x]) (e2^T [1;x]).
Matrix AffineProduct(const Vector& e1, const Vector& e2);

}  // namespace mqgcs
