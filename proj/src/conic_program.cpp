#include "mqgcs/conic_program.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace mqgcs {

namespace {

std::pair<int, int> Upper(int row, int col) {
  return row <= col ? std::pair{row, col} : std::pair{col, row};
}

void Accumulate(AffineMatrix::Entries& entries, int row, int col, double value) {
  if (value == 0.0) return;
  entries[Upper(row, col)] += value;
}

void Fill(const AffineMatrix::Entries& entries, double scale, Matrix& out) {
  for (const auto& [rc, v] : entries) {
    out(rc.first, rc.second) += scale * v;
    if (rc.first != rc.second) out(rc.second, rc.first) += scale * v;
  }
}

}  // namespace

void AffineMatrix::AddConstant(int row, int col, double value) {
  Accumulate(constant_, row, col, value);
}

void AffineMatrix::AddConstant(const Matrix& value) {
  for (int c = 0; c < value.cols(); ++c) {
    for (int r = 0; r <= c; ++r) Accumulate(constant_, r, c, value(r, c));
  }
}

void AffineMatrix::AddTerm(int var, int row, int col, double value) {
  if (value == 0.0) return;
  Accumulate(terms_[var], row, col, value);
}

void AffineMatrix::AddTerm(int var, const Matrix& value) {
  for (int c = 0; c < value.cols(); ++c) {
    for (int r = 0; r <= c; ++r) {
      if (value(r, c) != 0.0) Accumulate(terms_[var], r, c, value(r, c));
    }
  }
}

Matrix AffineMatrix::EvaluateConstant() const {
  Matrix out = Matrix::Zero(dim_, dim_);
  Fill(constant_, 1.0, out);
  return out;
}

Matrix AffineMatrix::Evaluate(const Vector& y) const {
  Matrix out = EvaluateConstant();
  for (const auto& [var, entries] : terms_) Fill(entries, y(var), out);
  return out;
}

int PsdVariable::at(int row, int col) const {
  const auto [r, c] = Upper(row, col);
  // Row-major upper triangle offset.
  const int offset = r * dim - r * (r - 1) / 2 + (c - r);
  return vars.at(offset);
}

int ConicProgram::AddVariable() { return num_vars_++; }

int ConicProgram::AddVariables(int count) {
  const int first = num_vars_;
  num_vars_ += count;
  return first;
}

PsdVariable ConicProgram::AddPsdMatrix(int dim) {
  PsdVariable X;
  X.dim = dim;
  AffineMatrix lmi(dim);
  for (int r = 0; r < dim; ++r) {
    for (int c = r; c < dim; ++c) {
      const int v = AddVariable();
      X.vars.push_back(v);
      lmi.AddTerm(v, r, c, 1.0);
    }
  }
  AddLmi(std::move(lmi));
  return X;
}

void ConicProgram::AddObjective(int var, double coeff) {
  if (var < 0 || var >= num_vars_) throw std::out_of_range("ConicProgram: unknown variable");
  objective_[var] += coeff;
}

void ConicProgram::AddEquality(LinearTerms row, double rhs) {
  for (const auto& [v, c] : row) {
    if (v < 0 || v >= num_vars_) throw std::out_of_range("ConicProgram: unknown variable");
    (void)c;
  }
  equalities_.emplace_back(std::move(row), rhs);
}

void ConicProgram::AddInequality(LinearTerms row, double rhs) {
  AffineMatrix lmi(1);
  lmi.AddConstant(0, 0, rhs);
  for (const auto& [v, c] : row) lmi.AddTerm(v, 0, 0, -c);
  AddLmi(std::move(lmi));
}

void ConicProgram::AddLmi(AffineMatrix lmi) {
  for (const auto& [v, entries] : lmi.terms()) {
    if (v < 0 || v >= num_vars_) throw std::out_of_range("ConicProgram: unknown variable");
    for (const auto& [rc, value] : entries) {
      if (rc.second >= lmi.dim()) throw std::out_of_range("ConicProgram: entry outside LMI");
      (void)value;
    }
  }
  lmis_.push_back(std::move(lmi));
}

double ConicProgram::EvaluateObjective(const Vector& y) const {
  double value = objective_constant_;
  for (const auto& [v, c] : objective_) value += c * y(v);
  return value;
}

double MinLmiEigenvalue(const ConicProgram& program, const Vector& y) {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& lmi : program.lmis()) {
    const Matrix F = lmi.Evaluate(y);
    if (F.rows() == 1) {
      worst = std::min(worst, F(0, 0));
      continue;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(F, Eigen::EigenvaluesOnly);
    worst = std::min(worst, es.eigenvalues()(0));
  }
  return worst;
}

void WriteSdpa(const ConicProgram& program, std::ostream& out) {
  // SDPA: minimize c^T x s.t. sum_i F_i x_i - F_0 >= 0.
  std::vector<const AffineMatrix*> blocks;
  std::vector<const AffineMatrix*> diagonal;
  for (const auto& lmi : program.lmis()) {
    (lmi.dim() == 1 ? diagonal : blocks).push_back(&lmi);
  }
  const int n_eq = static_cast<int>(program.equalities().size());
  const int diag_size = static_cast<int>(diagonal.size()) + 2 * n_eq;
  const double sign = program.sense() == Sense::kMaximize ? -1.0 : 1.0;

  out << std::setprecision(17);
  out << "* mqgcs conic program\n";
  out << program.num_variables() << "\n";
  out << blocks.size() + (diag_size > 0 ? 1 : 0) << "\n";
  for (const auto* b : blocks) out << b->dim() << " ";
  if (diag_size > 0) out << -diag_size;
  out << "\n";
  for (int i = 0; i < program.num_variables(); ++i) {
    const auto it = program.objective().find(i);
    out << (it == program.objective().end() ? 0.0 : sign * it->second)
        << (i + 1 < program.num_variables() ? " " : "\n");
  }
  if (program.num_variables() == 0) out << "\n";
  auto write_block = [&](const AffineMatrix& lmi, int block_index) {
    for (const auto& [rc, v] : lmi.constant()) {
      out << 0 << " " << block_index << " " << rc.first + 1 << " " << rc.second + 1 << " " << -v
          << "\n";
    }
    for (const auto& [var, entries] : lmi.terms()) {
      for (const auto& [rc, v] : entries) {
        out << var + 1 << " " << block_index << " " << rc.first + 1 << " " << rc.second + 1
            << " " << v << "\n";
      }
    }
  };
  int block_index = 1;
  for (const auto* b : blocks) write_block(*b, block_index++);
  if (diag_size > 0) {
    int d = 1;
    for (const auto* lmi : diagonal) {
      for (const auto& [rc, v] : lmi->constant()) {
        out << 0 << " " << block_index << " " << d << " " << d << " " << -v << "\n";
        (void)rc;
      }
      for (const auto& [var, entries] : lmi->terms()) {
        for (const auto& [rc, v] : entries) {
          out << var + 1 << " " << block_index << " " << d << " " << d << " " << v << "\n";
          (void)rc;
        }
      }
      ++d;
    }
    for (const auto& [row, rhs] : program.equalities()) {
      for (double s : {1.0, -1.0}) {
        out << 0 << " " << block_index << " " << d << " " << d << " " << s * rhs << "\n";
        for (const auto& [var, c] : row) {
          out << var + 1 << " " << block_index << " " << d << " " << d << " " << s * c << "\n";
        }
        ++d;
      }
    }
  }
}

}  // namespace mqgcs
