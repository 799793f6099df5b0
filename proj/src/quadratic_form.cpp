#include "mqgcs/quadratic_form.hpp"

#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace mqgcs {

namespace {

void RequireDimension(const QuadraticForm& f, Eigen::Index n, const char* what) {
  if (f.dimension() != n) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (form has " +
                                std::to_string(f.dimension()) + ", got " +
                                std::to_string(n) + ")");
  }
}

}  // namespace

QuadraticForm::QuadraticForm(const Matrix& coeffs) {
  if (coeffs.rows() != coeffs.cols() || coeffs.rows() < 1) {
    throw std::invalid_argument("QuadraticForm: coefficient matrix must be square");
  }
  coeffs_ = 0.5 * (coeffs + coeffs.transpose());
}

QuadraticForm QuadraticForm::Zero(int dimension) {
  return QuadraticForm(Matrix::Zero(dimension + 1, dimension + 1));
}

QuadraticForm QuadraticForm::Constant(int dimension, double value) {
  Matrix Q = Matrix::Zero(dimension + 1, dimension + 1);
  Q(0, 0) = value;
  return QuadraticForm(Q);
}

QuadraticForm QuadraticForm::Affine(const Vector& a, double b) {
  const auto n = a.size();
  Matrix Q = Matrix::Zero(n + 1, n + 1);
  Q(0, 0) = b;
  Q.block(1, 0, n, 1) = 0.5 * a;
  Q.block(0, 1, 1, n) = 0.5 * a.transpose();
  return QuadraticForm(Q);
}

QuadraticForm QuadraticForm::FromParts(const Matrix& P, const Vector& q, double r) {
  const auto n = q.size();
  if (P.rows() != n || P.cols() != n) {
    throw std::invalid_argument("QuadraticForm::FromParts: dimension mismatch");
  }
  Matrix Q = Matrix::Zero(n + 1, n + 1);
  Q(0, 0) = r;
  Q.block(1, 0, n, 1) = 0.5 * q;
  Q.block(0, 1, 1, n) = 0.5 * q.transpose();
  Q.bottomRightCorner(n, n) = P;
  return QuadraticForm(Q);
}

QuadraticForm QuadraticForm::SquaredDistanceTo(const Vector& center) {
  const auto n = center.size();
  return FromParts(Matrix::Identity(n, n), -2.0 * center, center.squaredNorm());
}

QuadraticForm QuadraticForm::SquaredDistance(int n) {
  Matrix P(2 * n, 2 * n);
  const Matrix I = Matrix::Identity(n, n);
  P << I, -I, -I, I;
  return FromParts(P, Vector::Zero(2 * n), 0.0);
}

double QuadraticForm::Evaluate(const Vector& x) const {
  RequireDimension(*this, x.size(), "QuadraticForm::Evaluate");
  const int n = dimension();
  const auto P = coeffs_.bottomRightCorner(n, n);
  const auto h = coeffs_.col(0).tail(n);
  return coeffs_(0, 0) + 2.0 * h.dot(x) + x.dot(P * x);
}

Vector QuadraticForm::Gradient(const Vector& x) const {
  RequireDimension(*this, x.size(), "QuadraticForm::Gradient");
  const int n = dimension();
  return 2.0 * (coeffs_.bottomRightCorner(n, n) * x + coeffs_.col(0).tail(n));
}

double QuadraticForm::MinQuadraticEigenvalue() const {
  const int n = dimension();
  if (n == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(quadratic(), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

bool QuadraticForm::IsConvex(double tol) const {
  return MinQuadraticEigenvalue() >= -tol;
}

QuadraticForm QuadraticForm::Embed(int ambient, std::span<const int> index) const {
  if (static_cast<int>(index.size()) != dimension()) {
    throw std::invalid_argument("QuadraticForm::Embed: index size mismatch");
  }
  // [1; x_local] = E^T [1; x_ambient]
  Matrix E = Matrix::Zero(ambient + 1, dimension() + 1);
  E(0, 0) = 1.0;
  for (int i = 0; i < dimension(); ++i) {
    if (index[i] < 0 || index[i] >= ambient) {
      throw std::invalid_argument("QuadraticForm::Embed: index out of range");
    }
    E(1 + index[i], 1 + i) = 1.0;
  }
  return QuadraticForm(E * coeffs_ * E.transpose());
}

QuadraticForm QuadraticForm::EmbedAt(int ambient, int offset) const {
  std::vector<int> index(dimension());
  for (int i = 0; i < dimension(); ++i) index[i] = offset + i;
  return Embed(ambient, index);
}

QuadraticForm QuadraticForm::ComposeAffine(const Vector& shift, const Matrix& basis) const {
  RequireDimension(*this, shift.size(), "QuadraticForm::ComposeAffine");
  if (basis.rows() != shift.size()) {
    throw std::invalid_argument("QuadraticForm::ComposeAffine: basis rows mismatch");
  }
  const auto k = basis.cols();
  Matrix T = Matrix::Zero(shift.size() + 1, k + 1);
  T(0, 0) = 1.0;
  T.block(1, 0, shift.size(), 1) = shift;
  T.block(1, 1, shift.size(), k) = basis;
  return QuadraticForm(T.transpose() * coeffs_ * T);
}

QuadraticForm QuadraticForm::Restrict(int offset, const Vector& value) const {
  const int n = dimension();
  const int m = static_cast<int>(value.size());
  if (offset < 0 || offset + m > n) {
    throw std::invalid_argument("QuadraticForm::Restrict: range out of bounds");
  }
  const int k = n - m;
  Vector shift = Vector::Zero(n);
  shift.segment(offset, m) = value;
  Matrix basis = Matrix::Zero(n, k);
  for (int i = 0, col = 0; i < n; ++i) {
    if (i >= offset && i < offset + m) continue;
    basis(i, col++) = 1.0;
  }
  return ComposeAffine(shift, basis);
}

QuadraticForm& QuadraticForm::operator+=(const QuadraticForm& other) {
  RequireDimension(*this, other.dimension(), "QuadraticForm::operator+");
  coeffs_ += other.coeffs_;
  return *this;
}

QuadraticForm& QuadraticForm::operator-=(const QuadraticForm& other) {
  RequireDimension(*this, other.dimension(), "QuadraticForm::operator-");
  coeffs_ -= other.coeffs_;
  return *this;
}

QuadraticForm& QuadraticForm::operator*=(double scale) {
  coeffs_ *= scale;
  return *this;
}

Matrix AffineProduct(const Vector& e1, const Vector& e2) {
  Matrix outer = e1 * e2.transpose();
  return 0.5 * (outer + outer.transpose());
}

}  // namespace mqgcs
