#pragma once

#include <iosfwd>
#include <map>
#include <utility>
#include <vector>

#include "mqgcs/solver.hpp"

namespace mqgcs {

/// Sparse linear functional sum_i coeff_i * y_i.
using LinearTerms = std::vector<std::pair<int, double>>;

/// Affine symmetric matrix function F(y) = F0 + sum_i y_i F_i. Entries are kept
/// in upper-triangular form; an off-diagonal entry (r, c) stands for both
/// (r, c) and (c, r).
class AffineMatrix {
 public:
  using Entries = std::map<std::pair<int, int>, double>;

  explicit AffineMatrix(int dim = 0) : dim_(dim) {}

  int dim() const { return dim_; }
  void AddConstant(int row, int col, double value);
  /// Adds the upper triangle of a dense symmetric matrix.
  void AddConstant(const Matrix& value);
  void AddTerm(int var, int row, int col, double value);
  void AddTerm(int var, const Matrix& value);

  const Entries& constant() const { return constant_; }
  const std::map<int, Entries>& terms() const { return terms_; }

  Matrix EvaluateConstant() const;
  Matrix Evaluate(const Vector& y) const;

 private:
  int dim_;
  Entries constant_;
  std::map<int, Entries> terms_;
};

enum class Sense { kMinimize, kMaximize };

/// Handle for a symmetric PSD matrix variable stored through its upper
/// triangle.
struct PsdVariable {
  int dim = 0;
  std::vector<int> vars;  // row-major upper triangle
  int at(int row, int col) const;
};

/// Semidefinite program over scalar variables y:
///   optimize  c^T y
///   s.t.      equalities, affine inequalities a^T y <= b,
///             linear matrix inequalities F(y) >= 0 (PSD).
/// Matrix variables are scalar variables pinned to a PSD constraint; they
/// enter other constraints through their entries (trace pairings).
class ConicProgram {
 public:
  int AddVariable();
  /// Returns the index of the first of `count` new variables.
  int AddVariables(int count);
  PsdVariable AddPsdMatrix(int dim);

  void SetSense(Sense sense) { sense_ = sense; }
  void AddObjective(int var, double coeff);
  void AddObjectiveConstant(double value) { objective_constant_ += value; }
  void AddEquality(LinearTerms row, double rhs);
  /// row^T y <= rhs.
  void AddInequality(LinearTerms row, double rhs);
  /// F(y) PSD. One-dimensional matrices become affine inequalities.
  void AddLmi(AffineMatrix lmi);

  int num_variables() const { return num_vars_; }
  Sense sense() const { return sense_; }
  const std::map<int, double>& objective() const { return objective_; }
  double objective_constant() const { return objective_constant_; }
  const std::vector<std::pair<LinearTerms, double>>& equalities() const { return equalities_; }
  const std::vector<AffineMatrix>& lmis() const { return lmis_; }

  double EvaluateObjective(const Vector& y) const;

 private:
  int num_vars_ = 0;
  Sense sense_ = Sense::kMaximize;
  std::map<int, double> objective_;
  double objective_constant_ = 0.0;
  std::vector<std::pair<LinearTerms, double>> equalities_;
  std::vector<AffineMatrix> lmis_;
};

/// Solves with a primal-dual interior-point method (HKM direction, Mehrotra
/// predictor-corrector, sparse Schur complement). On optimal status, residuals
/// are below `options.accuracy` and `result.primal` holds y.
SolveResult SolveSdp(const ConicProgram& program, const SolverOptions& options = {});

/// Smallest eigenvalue over all LMIs of the program at y.
double MinLmiEigenvalue(const ConicProgram& program, const Vector& y);

/// Writes the program in SDPA sparse format (.dat-s). Equalities are written
/// as pairs of opposite inequalities in a diagonal block.
void WriteSdpa(const ConicProgram& program, std::ostream& out);

}  // namespace mqgcs
