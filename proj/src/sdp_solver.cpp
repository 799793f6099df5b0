// Primal-dual interior-point method for the semidefinite programs built by
// the synthesis module.
//
// The user program optimizes c^T y subject to F_j(y) = F_j0 + sum_i y_i F_ji
// PSD and affine equalities. Equalities are removed first by sparse pivot
// substitution, y = y0 + T w. The remaining program is the dual of the
// standard-form pair
//   primal:  min <C, X>  s.t.  <A_k, X> = b_k,  X PSD
//   dual:    max b^T w   s.t.  C - sum_k w_k A_k = Z PSD
// with C = G_0 and A_k = -G_k. One-by-one LMIs are collected into a separate
// linear block. Search directions use the HKM scaling with Mehrotra
// predictor-corrector steps; the Schur complement is assembled sparsely from
// per-variable entry lists and factored with a simplicial LDL^T.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "mqgcs/conic_program.hpp"

namespace mqgcs {

namespace {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

constexpr double kDropTol = 1e-13;
// When the bound side has no strictly feasible point (for instance opposite
// edges between two full-dimensional sets under a distance cost force the
// two bounds to agree along x_v = x_w), the multiplier iterates diverge: the
// bound iterate stays feasible while the gap stalls. The best feasible
// iterate is accepted when its relative gap is below kStalledGap and it has
// not improved for kStallWindow iterations.
constexpr double kStalledGap = 1e-4;
constexpr int kStallWindow = 15;

struct Entry {
  int r;
  int c;
  double v;
};

// Affine expression of an original variable in the reduced variables.
struct Substitution {
  double constant = 0.0;
  std::map<int, double> terms;
};

struct Reduction {
  bool infeasible = false;
  // Per original variable: expression in original indices of the kept
  // (non-pivot) variables.
  std::vector<Substitution> expr;
};

// Removes equalities by substituting one pivot variable per independent row.
Reduction EliminateEqualities(const ConicProgram& program, const std::vector<int>& appearances,
                              double tol) {
  const int n = program.num_variables();
  Reduction red;
  red.expr.resize(n);
  std::vector<bool> is_pivot(n, false);
  for (int i = 0; i < n; ++i) red.expr[i].terms[i] = 1.0;

  for (const auto& [row, rhs] : program.equalities()) {
    // Express the row in kept variables.
    std::map<int, double> coeffs;
    double b = rhs;
    double scale = std::abs(rhs);
    for (const auto& [var, c] : row) {
      scale = std::max(scale, std::abs(c));
      const Substitution& s = red.expr[var];
      b -= c * s.constant;
      for (const auto& [k, t] : s.terms) coeffs[k] += c * t;
    }
    double largest = 0.0;
    for (auto it = coeffs.begin(); it != coeffs.end();) {
      if (std::abs(it->second) <= kDropTol * std::max(1.0, scale)) {
        it = coeffs.erase(it);
      } else {
        largest = std::max(largest, std::abs(it->second));
        ++it;
      }
    }
    if (coeffs.empty() || largest <= tol * std::max(1.0, scale)) {
      if (std::abs(b) > tol * std::max(1.0, scale)) red.infeasible = true;
      continue;
    }
    // Among well-conditioned candidates pick the one touching fewest LMIs so
    // that substitution keeps the constraint matrices sparse.
    int pivot = -1;
    for (const auto& [k, c] : coeffs) {
      if (std::abs(c) < 0.1 * largest) continue;
      if (pivot < 0 || appearances[k] < appearances[pivot]) pivot = k;
    }
    const double a = coeffs.at(pivot);
    Substitution sub;
    sub.constant = b / a;
    for (const auto& [k, c] : coeffs) {
      if (k != pivot) sub.terms[k] = -c / a;
    }
    // Replace the pivot in every existing expression.
    for (int i = 0; i < n; ++i) {
      auto& e = red.expr[i];
      const auto it = e.terms.find(pivot);
      if (it == e.terms.end()) continue;
      const double t = it->second;
      e.terms.erase(it);
      e.constant += t * sub.constant;
      for (const auto& [k, c] : sub.terms) {
        double& slot = e.terms[k];
        slot += t * c;
        if (std::abs(slot) <= kDropTol) e.terms.erase(k);
      }
    }
    is_pivot[pivot] = true;
  }
  return red;
}

struct SdpBlock {
  int n = 0;
  Matrix C;
  // (reduced variable, upper-triangle entries of A_k)
  std::vector<std::pair<int, std::vector<Entry>>> vars;
  // Schur complement value positions for all pairs (a <= b) of `vars`.
  std::vector<int> positions;
};

struct LpRow {
  double c = 0.0;
  std::vector<std::pair<int, double>> a;  // (reduced variable, A_k entry)
  std::vector<int> positions;
};

struct StandardForm {
  int m = 0;
  Vector b;
  std::vector<SdpBlock> blocks;
  std::vector<LpRow> lp;
  // Reduced variable -> original index of the kept variable.
  std::vector<int> kept;
  double objective_constant = 0.0;
};

double Dot(const Matrix& A, const Matrix& B) { return A.cwiseProduct(B).sum(); }

// <A, X> for a sparse upper-triangle entry list.
double Pair(const std::vector<Entry>& entries, const Matrix& X) {
  double s = 0.0;
  for (const Entry& e : entries) s += (e.r == e.c ? 1.0 : 2.0) * e.v * X(e.r, e.c);
  return s;
}

void AddScaled(const std::vector<Entry>& entries, double w, Matrix& out) {
  for (const Entry& e : entries) {
    out(e.r, e.c) += w * e.v;
    if (e.r != e.c) out(e.c, e.r) += w * e.v;
  }
}

class InteriorPoint {
 public:
  InteriorPoint(StandardForm& sf, const SolverOptions& options) : sf_(sf), options_(options) {}

  struct Outcome {
    SolveStatus status = SolveStatus::kNumericalFailure;
    Vector w;
    int iterations = 0;
    double pinf = 0.0;
    double dinf = 0.0;
    double gap = 0.0;
  };

  Outcome Run();

 private:
  void BuildPattern();
  void Initialize();
  void Residuals();
  bool AssembleAndFactor();
  Vector SolveSchur(const Vector& rhs) const;
  Vector ApplyA(const std::vector<Matrix>& W, const Vector& wl) const;
  void Direction(const std::vector<Matrix>& Rc, const Vector& rc, Vector& dy,
                 std::vector<Matrix>& dX, std::vector<Matrix>& dZ, Vector& dx,
                 Vector& dz) const;
  double MaxStepPsd(const std::vector<Matrix>& X, const std::vector<Matrix>& dX) const;
  static double MaxStepLp(const Vector& x, const Vector& dx);

  StandardForm& sf_;
  const SolverOptions& options_;

  std::vector<Matrix> X_, Z_, Zinv_, Rd_;
  Vector x_, z_, rd_;
  Vector y_;
  Vector rp_;
  double mu_ = 0.0;
  double pobj_ = 0.0, dobj_ = 0.0;
  double pinf_ = 0.0, dinf_ = 0.0, gap_ = 0.0;
  double norm_b_ = 0.0;
  int total_dim_ = 0;

  SparseMatrix M_;
  Vector scale_;
  std::vector<int> diag_pos_;
  Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower> ldlt_;
  SparseMatrix Ms_;
  double shift_ = 1e-13;
  bool analyzed_ = false;
};

int FindPosition(const SparseMatrix& M, int row, int col) {
  const int* inner = M.innerIndexPtr();
  const int begin = M.outerIndexPtr()[col];
  const int end = M.outerIndexPtr()[col + 1];
  const int* it = std::lower_bound(inner + begin, inner + end, row);
  return static_cast<int>(it - inner);
}

void InteriorPoint::BuildPattern() {
  const int m = sf_.m;
  std::vector<Eigen::Triplet<double>> trip;
  for (int i = 0; i < m; ++i) trip.emplace_back(i, i, 1.0);
  auto add = [&](int a, int b) { trip.emplace_back(std::max(a, b), std::min(a, b), 1.0); };
  for (const auto& blk : sf_.blocks) {
    for (std::size_t i = 0; i < blk.vars.size(); ++i) {
      for (std::size_t j = i; j < blk.vars.size(); ++j) add(blk.vars[i].first, blk.vars[j].first);
    }
  }
  for (const auto& row : sf_.lp) {
    for (std::size_t i = 0; i < row.a.size(); ++i) {
      for (std::size_t j = i; j < row.a.size(); ++j) add(row.a[i].first, row.a[j].first);
    }
  }
  M_.resize(m, m);
  M_.setFromTriplets(trip.begin(), trip.end());
  M_.makeCompressed();
  auto pos = [&](int a, int b) { return FindPosition(M_, std::max(a, b), std::min(a, b)); };
  for (auto& blk : sf_.blocks) {
    blk.positions.clear();
    for (std::size_t i = 0; i < blk.vars.size(); ++i) {
      for (std::size_t j = i; j < blk.vars.size(); ++j) {
        blk.positions.push_back(pos(blk.vars[i].first, blk.vars[j].first));
      }
    }
  }
  for (auto& row : sf_.lp) {
    row.positions.clear();
    for (std::size_t i = 0; i < row.a.size(); ++i) {
      for (std::size_t j = i; j < row.a.size(); ++j) {
        row.positions.push_back(pos(row.a[i].first, row.a[j].first));
      }
    }
  }
  diag_pos_.resize(m);
  for (int i = 0; i < m; ++i) diag_pos_[i] = pos(i, i);
}

void InteriorPoint::Initialize() {
  const int m = sf_.m;
  y_ = Vector::Zero(m);
  norm_b_ = sf_.b.norm();
  total_dim_ = static_cast<int>(sf_.lp.size());
  X_.clear();
  Z_.clear();
  for (const auto& blk : sf_.blocks) {
    total_dim_ += blk.n;
    const double sn = std::sqrt(static_cast<double>(blk.n));
    double xi = std::max(10.0, sn);
    double eta = std::max({10.0, sn, blk.C.norm()});
    for (const auto& [k, entries] : blk.vars) {
      double fro = 0.0;
      for (const Entry& e : entries) fro += (e.r == e.c ? 1.0 : 2.0) * e.v * e.v;
      fro = std::sqrt(fro);
      xi = std::max(xi, sn * (1.0 + std::abs(sf_.b(k))) / (1.0 + fro));
      eta = std::max(eta, fro);
    }
    X_.push_back(xi * Matrix::Identity(blk.n, blk.n));
    Z_.push_back(eta * Matrix::Identity(blk.n, blk.n));
  }
  const int L = static_cast<int>(sf_.lp.size());
  x_ = Vector::Constant(L, 10.0);
  z_ = Vector::Constant(L, 10.0);
  for (int l = 0; l < L; ++l) {
    double na = 0.0;
    for (const auto& [k, a] : sf_.lp[l].a) {
      na = std::max(na, std::abs(a));
      x_(l) = std::max(x_(l), (1.0 + std::abs(sf_.b(k))) / (1.0 + std::abs(a)));
    }
    z_(l) = std::max({10.0, std::abs(sf_.lp[l].c), na});
  }
}

Vector InteriorPoint::ApplyA(const std::vector<Matrix>& W, const Vector& wl) const {
  Vector out = Vector::Zero(sf_.m);
  for (std::size_t j = 0; j < sf_.blocks.size(); ++j) {
    for (const auto& [k, entries] : sf_.blocks[j].vars) out(k) += Pair(entries, W[j]);
  }
  for (std::size_t l = 0; l < sf_.lp.size(); ++l) {
    for (const auto& [k, a] : sf_.lp[l].a) out(k) += a * wl(l);
  }
  return out;
}

void InteriorPoint::Residuals() {
  Zinv_.resize(Z_.size());
  Rd_.resize(Z_.size());
  double inner = 0.0;
  pobj_ = 0.0;
  double dnorm = 0.0;
  for (std::size_t j = 0; j < sf_.blocks.size(); ++j) {
    const auto& blk = sf_.blocks[j];
    Eigen::LLT<Matrix> llt(Z_[j]);
    Zinv_[j] = llt.solve(Matrix::Identity(blk.n, blk.n));
    Zinv_[j] = 0.5 * (Zinv_[j] + Zinv_[j].transpose()).eval();
    Matrix R = blk.C - Z_[j];
    for (const auto& [k, entries] : blk.vars) AddScaled(entries, -y_(k), R);
    Rd_[j] = std::move(R);
    dnorm = std::max(dnorm, Rd_[j].norm());
    inner += Dot(X_[j], Z_[j]);
    pobj_ += Dot(blk.C, X_[j]);
  }
  const int L = static_cast<int>(sf_.lp.size());
  rd_.resize(L);
  for (int l = 0; l < L; ++l) {
    double r = sf_.lp[l].c - z_(l);
    for (const auto& [k, a] : sf_.lp[l].a) r -= a * y_(k);
    rd_(l) = r;
    dnorm = std::max(dnorm, std::abs(r));
    pobj_ += sf_.lp[l].c * x_(l);
  }
  inner += x_.dot(z_);
  mu_ = inner / std::max(1, total_dim_);
  rp_ = sf_.b - ApplyA(X_, x_);
  dobj_ = sf_.b.dot(y_);
  pinf_ = rp_.norm() / (1.0 + norm_b_);
  dinf_ = dnorm;
  gap_ = std::abs(pobj_ - dobj_) / (1.0 + std::abs(pobj_) + std::abs(dobj_));
}

bool InteriorPoint::AssembleAndFactor() {
  const int m = sf_.m;
  double* values = M_.valuePtr();
  std::fill(values, values + M_.nonZeros(), 0.0);
  // M_ab = tr(A_a X A_b Z^{-1}) = <G_a, G_b> with G_a = L_X^T A_a L_Z^{-T}.
  // The Gram form stays positive semidefinite in floating point, whereas
  // the direct product cancels badly once X and Z^{-1} are both large.
  for (std::size_t j = 0; j < sf_.blocks.size(); ++j) {
    const auto& blk = sf_.blocks[j];
    const int n = blk.n;
    const Matrix Lx = Eigen::LLT<Matrix>(X_[j]).matrixL();
    const Matrix Lz = Eigen::LLT<Matrix>(Z_[j]).matrixL();
    const Matrix R = Lz.triangularView<Eigen::Lower>().solve(Matrix::Identity(n, n)).transpose();
    const int k = static_cast<int>(blk.vars.size());
    Matrix G = Matrix::Zero(n * n, k);
    for (int a = 0; a < k; ++a) {
      Eigen::Map<Matrix> Ga(G.col(a).data(), n, n);
      for (const Entry& e : blk.vars[a].second) {
        Ga.noalias() += e.v * Lx.row(e.r).transpose() * R.row(e.c);
        if (e.r != e.c) Ga.noalias() += e.v * Lx.row(e.c).transpose() * R.row(e.r);
      }
    }
    Matrix Mb = Matrix::Zero(k, k);
    Mb.selfadjointView<Eigen::Lower>().rankUpdate(G.transpose());
    std::size_t p = 0;
    for (int a = 0; a < k; ++a) {
      for (int b = a; b < k; ++b) values[blk.positions[p++]] += Mb(b, a);
    }
  }
  for (std::size_t l = 0; l < sf_.lp.size(); ++l) {
    const auto& row = sf_.lp[l];
    const double ratio = x_(l) / z_(l);
    std::size_t p = 0;
    for (std::size_t a = 0; a < row.a.size(); ++a) {
      for (std::size_t b = a; b < row.a.size(); ++b) {
        values[row.positions[p++]] += ratio * row.a[a].second * row.a[b].second;
      }
    }
  }
  scale_.resize(m);
  for (int i = 0; i < m; ++i) {
    const double d = values[diag_pos_[i]];
    scale_(i) = d > 0.0 ? 1.0 / std::sqrt(d) : 1.0;
  }
  Ms_ = M_;
  double* sv = Ms_.valuePtr();
  for (int col = 0; col < m; ++col) {
    for (int idx = Ms_.outerIndexPtr()[col]; idx < Ms_.outerIndexPtr()[col + 1]; ++idx) {
      sv[idx] *= scale_(col) * scale_(Ms_.innerIndexPtr()[idx]);
    }
  }
  if (!analyzed_) {
    ldlt_.analyzePattern(Ms_);
    analyzed_ = true;
  }
  for (double shift = shift_; shift < 1e-4; shift *= 100.0) {
    ldlt_.setShift(shift);
    ldlt_.factorize(Ms_);
    if (ldlt_.info() == Eigen::Success && (ldlt_.vectorD().array() > 0.0).all()) return true;
  }
  return false;
}

Vector InteriorPoint::SolveSchur(const Vector& rhs) const {
  // Solve D M D u = D rhs with the shifted factorization and refine against
  // the unshifted scaled matrix.
  const Vector r0 = scale_.cwiseProduct(rhs);
  Vector u = ldlt_.solve(r0);
  double last = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 30; ++it) {
    const Vector res = r0 - Ms_.selfadjointView<Eigen::Lower>() * u;
    const double norm = res.norm();
    if (norm <= 1e-15 * (1.0 + r0.norm()) || norm > 0.5 * last) break;
    last = norm;
    u += ldlt_.solve(res);
  }
  return scale_.cwiseProduct(u);
}

void InteriorPoint::Direction(const std::vector<Matrix>& Rc, const Vector& rc, Vector& dy,
                              std::vector<Matrix>& dX, std::vector<Matrix>& dZ, Vector& dx,
                              Vector& dz) const {
  const std::size_t nb = sf_.blocks.size();
  std::vector<Matrix> W(nb);
  for (std::size_t j = 0; j < nb; ++j) {
    // Only the symmetric part pairs with the constraint matrices.
    const Matrix T = Rc[j] - X_[j] * Rd_[j] * Zinv_[j];
    W[j] = 0.5 * (T + T.transpose());
  }
  const Vector wl = rc - x_.cwiseProduct(rd_).cwiseQuotient(z_);
  dy = SolveSchur(rp_ - ApplyA(W, wl));
  dX.resize(nb);
  dZ.resize(nb);
  for (std::size_t j = 0; j < nb; ++j) {
    Matrix D = Rd_[j];
    for (const auto& [k, entries] : sf_.blocks[j].vars) AddScaled(entries, -dy(k), D);
    Matrix T = Rc[j] - X_[j] * D * Zinv_[j];
    dX[j] = 0.5 * (T + T.transpose());
    dZ[j] = std::move(D);
  }
  const int L = static_cast<int>(sf_.lp.size());
  dz = rd_;
  for (int l = 0; l < L; ++l) {
    for (const auto& [k, a] : sf_.lp[l].a) dz(l) -= a * dy(k);
  }
  dx = rc - x_.cwiseProduct(dz).cwiseQuotient(z_);
}

double InteriorPoint::MaxStepPsd(const std::vector<Matrix>& X,
                                 const std::vector<Matrix>& dX) const {
  double alpha = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < X.size(); ++j) {
    Eigen::LLT<Matrix> llt(X[j]);
    const Matrix Li = llt.matrixL().solve(Matrix::Identity(X[j].rows(), X[j].cols()));
    Matrix S = Li * dX[j] * Li.transpose();
    S = 0.5 * (S + S.transpose()).eval();
    const double lmin = Eigen::SelfAdjointEigenSolver<Matrix>(S, Eigen::EigenvaluesOnly)
                            .eigenvalues()(0);
    if (lmin < 0.0) alpha = std::min(alpha, -1.0 / lmin);
  }
  return alpha;
}

double InteriorPoint::MaxStepLp(const Vector& x, const Vector& dx) {
  double alpha = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (dx(i) < 0.0) alpha = std::min(alpha, -x(i) / dx(i));
  }
  return alpha;
}

InteriorPoint::Outcome InteriorPoint::Run() {
  Outcome out;
  BuildPattern();
  Initialize();
  const double acc = options_.accuracy;
  const std::size_t nb = sf_.blocks.size();
  int stalls = 0;
  Outcome best;
  best.gap = std::numeric_limits<double>::infinity();
  int best_iter = -1;
  for (int iter = 0; iter <= options_.max_iters; ++iter) {
    Residuals();
    out.iterations = iter;
    out.pinf = pinf_;
    out.dinf = dinf_;
    out.gap = gap_;
    if (pinf_ <= acc && dinf_ <= acc && gap_ <= acc) {
      out.status = SolveStatus::kOptimal;
      out.w = y_;
      return out;
    }
    if (dinf_ <= acc && gap_ < best.gap) {
      best.w = y_;
      best.iterations = iter;
      best.pinf = pinf_;
      best.dinf = dinf_;
      best.gap = gap_;
      best_iter = iter;
    }
    if (best_iter >= 0 && iter - best_iter >= kStallWindow) break;
    // Infeasibility certificates: a primal ray proves the LMIs infeasible; a
    // dual ray proves the objective unbounded.
    if (iter > 5) {
      const double cx = -pobj_;
      if (cx > 0.0) {
        const double ax = (sf_.b - rp_).norm();
        if (ax / cx < 1e-8 && cx > 1e6) {
          out.status = SolveStatus::kInfeasible;
          return out;
        }
      }
      if (dobj_ > 1e8 * (1.0 + std::abs(pobj_)) && dinf_ < 1e-6 * dobj_) {
        out.status = SolveStatus::kUnbounded;
        return out;
      }
    }
    if (iter == options_.max_iters) break;
    if (!AssembleAndFactor()) break;

    // Predictor.
    std::vector<Matrix> Rc(nb);
    for (std::size_t j = 0; j < nb; ++j) Rc[j] = -X_[j];
    Vector rc = -x_;
    Vector dy, dx, dz;
    std::vector<Matrix> dX, dZ;
    Direction(Rc, rc, dy, dX, dZ, dx, dz);
    double ap = std::min(1.0, std::min(MaxStepPsd(X_, dX), MaxStepLp(x_, dx)));
    double ad = std::min(1.0, std::min(MaxStepPsd(Z_, dZ), MaxStepLp(z_, dz)));
    double inner_aff = 0.0;
    for (std::size_t j = 0; j < nb; ++j) inner_aff += Dot(X_[j] + ap * dX[j], Z_[j] + ad * dZ[j]);
    inner_aff += (x_ + ap * dx).dot(z_ + ad * dz);
    const double mu_aff = inner_aff / std::max(1, total_dim_);
    const double expon = std::max(1.0, 3.0 * std::pow(std::min(ap, ad), 2));
    const double sigma = std::min(1.0, std::pow(std::max(0.0, mu_aff / mu_), expon));

    // Corrector.
    for (std::size_t j = 0; j < nb; ++j) {
      Matrix T = dX[j] * dZ[j] * Zinv_[j];
      Rc[j] = sigma * mu_ * Zinv_[j] - X_[j] - 0.5 * (T + T.transpose());
    }
    rc = sigma * mu_ * z_.cwiseInverse() - x_ - dx.cwiseProduct(dz).cwiseQuotient(z_);
    Direction(Rc, rc, dy, dX, dZ, dx, dz);
    ap = std::min(MaxStepPsd(X_, dX), MaxStepLp(x_, dx));
    ad = std::min(MaxStepPsd(Z_, dZ), MaxStepLp(z_, dz));
    const double gamma = 0.9 + 0.09 * std::min({ap, ad, 1.0});
    ap = std::min(1.0, gamma * ap);
    ad = std::min(1.0, gamma * ad);
    for (std::size_t j = 0; j < nb; ++j) {
      X_[j] += ap * dX[j];
      Z_[j] += ad * dZ[j];
      X_[j] = 0.5 * (X_[j] + X_[j].transpose()).eval();
      Z_[j] = 0.5 * (Z_[j] + Z_[j].transpose()).eval();
    }
    x_ += ap * dx;
    z_ += ad * dz;
    y_ += ad * dy;
    if (std::max(ap, ad) < 1e-8) {
      if (++stalls >= 3) break;
    } else {
      stalls = 0;
    }
  }
  if (best_iter >= 0 && best.gap <= kStalledGap) {
    best.status = SolveStatus::kOptimal;
    best.iterations = out.iterations;
    return best;
  }
  out.status = SolveStatus::kNumericalFailure;
  return out;
}

void AddEntries(std::map<std::pair<int, int>, double>& into, const AffineMatrix::Entries& from,
                double w) {
  for (const auto& [rc, v] : from) into[rc] += w * v;
}

}  // namespace

SolveResult SolveSdp(const ConicProgram& program, const SolverOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  SolveResult result;
  auto finish = [&](SolveResult r) {
    r.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
  };
  const int n = program.num_variables();

  std::vector<int> appearances(n, 0);
  for (const auto& lmi : program.lmis()) {
    for (const auto& [var, entries] : lmi.terms()) {
      (void)entries;
      ++appearances[var];
    }
  }
  const Reduction red = EliminateEqualities(program, appearances, 1e-11);
  if (red.infeasible) {
    result.status = SolveStatus::kInfeasible;
    return finish(result);
  }

  // Kept variables are those that remain in some expression.
  std::vector<int> reduced_index(n, -1);
  std::vector<int> kept;
  for (int i = 0; i < n; ++i) {
    for (const auto& [k, t] : red.expr[i].terms) {
      (void)t;
      if (reduced_index[k] < 0) {
        reduced_index[k] = 0;
        kept.push_back(k);
      }
    }
  }
  std::sort(kept.begin(), kept.end());

  // Reduced objective over kept variables.
  const double sign = program.sense() == Sense::kMaximize ? 1.0 : -1.0;
  std::map<int, double> cred;
  double objective_constant = program.objective_constant();
  for (const auto& [var, c] : program.objective()) {
    objective_constant += c * red.expr[var].constant;
    for (const auto& [k, t] : red.expr[var].terms) cred[k] += c * t;
  }

  // Reduced LMIs.
  StandardForm sf;
  std::vector<bool> in_lmi(n, false);
  struct ReducedLmi {
    int dim;
    std::map<std::pair<int, int>, double> constant;
    std::map<int, std::map<std::pair<int, int>, double>> terms;
  };
  std::vector<ReducedLmi> reduced;
  for (const auto& lmi : program.lmis()) {
    ReducedLmi r;
    r.dim = lmi.dim();
    AddEntries(r.constant, lmi.constant(), 1.0);
    for (const auto& [var, entries] : lmi.terms()) {
      const Substitution& s = red.expr[var];
      if (s.constant != 0.0) AddEntries(r.constant, entries, s.constant);
      for (const auto& [k, t] : s.terms) AddEntries(r.terms[k], entries, t);
    }
    for (auto it = r.terms.begin(); it != r.terms.end();) {
      auto& entries = it->second;
      for (auto e = entries.begin(); e != entries.end();) {
        e = std::abs(e->second) <= kDropTol ? entries.erase(e) : std::next(e);
      }
      if (entries.empty()) {
        it = r.terms.erase(it);
      } else {
        in_lmi[it->first] = true;
        ++it;
      }
    }
    reduced.push_back(std::move(r));
  }

  // Variables absent from every LMI are either unbounded directions or
  // irrelevant (fixed to zero).
  std::vector<int> free_vars;
  for (int k : kept) {
    if (in_lmi[k]) {
      reduced_index[k] = static_cast<int>(free_vars.size());
      free_vars.push_back(k);
    } else {
      reduced_index[k] = -1;
      const auto it = cred.find(k);
      if (it != cred.end() && std::abs(it->second) > kDropTol) {
        result.status = SolveStatus::kUnbounded;
        return finish(result);
      }
    }
  }
  sf.m = static_cast<int>(free_vars.size());
  sf.kept = free_vars;
  sf.b = Vector::Zero(sf.m);
  for (const auto& [k, c] : cred) {
    if (reduced_index[k] >= 0) sf.b(reduced_index[k]) = sign * c;
  }
  sf.objective_constant = objective_constant;

  for (auto& r : reduced) {
    if (r.dim == 1) {
      LpRow row;
      const auto it = r.constant.find({0, 0});
      row.c = it == r.constant.end() ? 0.0 : it->second;
      for (const auto& [k, entries] : r.terms) {
        row.a.emplace_back(reduced_index[k], -entries.begin()->second);
      }
      if (row.a.empty()) {
        if (row.c < -options.accuracy) {
          result.status = SolveStatus::kInfeasible;
          return finish(result);
        }
        continue;
      }
      sf.lp.push_back(std::move(row));
      continue;
    }
    SdpBlock blk;
    blk.n = r.dim;
    blk.C = Matrix::Zero(r.dim, r.dim);
    for (const auto& [rc, v] : r.constant) {
      blk.C(rc.first, rc.second) += v;
      if (rc.first != rc.second) blk.C(rc.second, rc.first) += v;
    }
    for (const auto& [k, entries] : r.terms) {
      std::vector<Entry> list;
      for (const auto& [rc, v] : entries) list.push_back({rc.first, rc.second, -v});
      blk.vars.emplace_back(reduced_index[k], std::move(list));
    }
    if (blk.vars.empty()) {
      const double lmin =
          Eigen::SelfAdjointEigenSolver<Matrix>(blk.C, Eigen::EigenvaluesOnly).eigenvalues()(0);
      if (lmin < -options.accuracy) {
        result.status = SolveStatus::kInfeasible;
        return finish(result);
      }
      continue;
    }
    sf.blocks.push_back(std::move(blk));
  }

  Vector w = Vector::Zero(sf.m);
  if (sf.m > 0) {
    InteriorPoint ipm(sf, options);
    const auto outcome = ipm.Run();
    result.iterations = outcome.iterations;
    result.dual_residual = outcome.pinf;
    result.gap = outcome.gap;
    result.primal_residual = outcome.dinf;
    if (outcome.status != SolveStatus::kOptimal) {
      result.status = outcome.status;
      return finish(result);
    }
    w = outcome.w;
  }

  Vector y = Vector::Zero(n);
  std::vector<double> kept_value(n, 0.0);
  for (int i = 0; i < sf.m; ++i) kept_value[free_vars[i]] = w(i);
  for (int i = 0; i < n; ++i) {
    double v = red.expr[i].constant;
    for (const auto& [k, t] : red.expr[i].terms) v += t * kept_value[k];
    y(i) = v;
  }
  result.status = SolveStatus::kOptimal;
  result.primal = y;
  result.objective_value = program.EvaluateObjective(y);
  result.primal_residual = std::max(0.0, -MinLmiEigenvalue(program, y));
  return finish(result);
}

}  // namespace mqgcs
