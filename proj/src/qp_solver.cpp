// Primal-dual interior-point method for small convex QCQPs.
//
// Equalities are eliminated through a nullspace basis; the remaining problem
//   min f0(w)  s.t.  c_i(w) <= 0
// is solved with slacks c(w) + s = 0, s >= 0 and Mehrotra predictor-corrector
// steps. When phase II fails to converge, a phase I program
//   min t  s.t.  c_i(w) <= t, t >= -1
// decides between infeasibility and numerical failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string_view>

#include "mqgcs/solver.hpp"

namespace mqgcs {

std::string_view ToString(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kUnbounded: return "unbounded";
    case SolveStatus::kNumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

namespace {

struct Constraint {
  Matrix P;  // empty when affine
  Vector q;
  double r = 0.0;

  double Value(const Vector& w) const {
    double v = q.dot(w) + r;
    if (P.size() > 0) v += w.dot(P * w);
    return v;
  }
  Vector Gradient(const Vector& w) const {
    if (P.size() == 0) return q;
    return 2.0 * P * w + q;
  }
};

Constraint FromForm(const QuadraticForm& f) {
  Constraint c;
  c.r = f.constant();
  c.q = f.linear();
  Matrix P = f.quadratic();
  if (P.cwiseAbs().maxCoeff() > 0.0) c.P = std::move(P);
  return c;
}

struct InequalityProblem {
  Matrix P0;  // objective w^T P0 w + q0^T w + r0
  Vector q0;
  double r0 = 0.0;
  std::vector<Constraint> constraints;

  int size() const { return static_cast<int>(q0.size()); }
  double Objective(const Vector& w) const { return w.dot(P0 * w) + q0.dot(w) + r0; }
};

struct IpmOutcome {
  bool converged = false;
  Vector w;
  double objective = 0.0;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
};

double MaxStep(const Vector& x, const Vector& dx) {
  double alpha = 1e300;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (dx(i) < 0.0) alpha = std::min(alpha, -x(i) / dx(i));
  }
  return alpha;
}

IpmOutcome SolveInequalityForm(const InequalityProblem& prob, const Vector& w0, double tol,
                               int max_iters) {
  const int k = prob.size();
  const int m = static_cast<int>(prob.constraints.size());
  IpmOutcome out;
  Vector w = w0;

  double obj_scale = 1.0;
  if (prob.P0.size() > 0) obj_scale = std::max(obj_scale, prob.P0.cwiseAbs().maxCoeff());
  if (k > 0) obj_scale = std::max(obj_scale, prob.q0.cwiseAbs().maxCoeff());
  double con_scale = 1.0;
  for (const auto& c : prob.constraints) {
    if (c.q.size() > 0) con_scale = std::max(con_scale, c.q.cwiseAbs().maxCoeff());
    if (c.P.size() > 0) con_scale = std::max(con_scale, c.P.cwiseAbs().maxCoeff());
    con_scale = std::max(con_scale, std::abs(c.r));
  }

  if (m == 0) {
    // Unconstrained convex quadratic: one Newton step.
    Matrix H = 2.0 * prob.P0;
    Eigen::LDLT<Matrix> ldlt(H + 1e-14 * obj_scale * Matrix::Identity(k, k));
    w = ldlt.solve(-prob.q0);
    const Vector grad = 2.0 * prob.P0 * w + prob.q0;
    out.dual_residual = grad.cwiseAbs().maxCoeff() / (1.0 + obj_scale);
    out.converged = out.dual_residual <= tol * 100;
    out.w = w;
    out.objective = prob.Objective(w);
    out.iterations = 1;
    return out;
  }

  Vector c(m);
  Matrix J(m, k);
  auto evaluate = [&](const Vector& x) {
    for (int i = 0; i < m; ++i) {
      c(i) = prob.constraints[i].Value(x);
      J.row(i) = prob.constraints[i].Gradient(x).transpose();
    }
  };
  evaluate(w);
  Vector s = (-c).cwiseMax(1.0);
  Vector lam = Vector::Ones(m);

  double best_merit = std::numeric_limits<double>::infinity();
  IpmOutcome best;
  for (int iter = 0; iter < max_iters; ++iter) {
    out.iterations = iter + 1;
    const Vector grad0 = 2.0 * prob.P0 * w + prob.q0;
    const Vector rd = grad0 + J.transpose() * lam;
    const Vector rp = c + s;
    const double mu = s.dot(lam) / m;
    const double fval = prob.Objective(w);

    out.primal_residual = rp.cwiseAbs().maxCoeff() / (1.0 + con_scale);
    out.dual_residual = rd.cwiseAbs().maxCoeff() / (1.0 + obj_scale);
    out.gap = s.dot(lam) / (1.0 + std::abs(fval));
    const double merit = std::max({out.primal_residual, out.dual_residual, out.gap});
    if (merit < best_merit) {
      best_merit = merit;
      best = out;
      best.w = w;
      best.objective = fval;
    }
    if (merit <= tol) {
      out.converged = true;
      out.w = w;
      out.objective = fval;
      return out;
    }
    if (!lam.allFinite() || lam.maxCoeff() > 1e14 || !w.allFinite()) break;

    Matrix H = 2.0 * prob.P0;
    for (int i = 0; i < m; ++i) {
      if (prob.constraints[i].P.size() > 0) H += 2.0 * lam(i) * prob.constraints[i].P;
    }
    const Vector D = lam.cwiseQuotient(s);
    Matrix K = H + J.transpose() * D.asDiagonal() * J;
    const double reg = 1e-13 * (1.0 + K.diagonal().cwiseAbs().maxCoeff());
    K.diagonal().array() += reg;
    Eigen::LDLT<Matrix> ldlt(K);
    if (ldlt.info() != Eigen::Success) break;

    auto direction = [&](const Vector& rc, Vector& dw, Vector& dl, Vector& ds) {
      const Vector rhs = -rd - J.transpose() * (D.cwiseProduct(rp) - rc.cwiseQuotient(s));
      dw = ldlt.solve(rhs);
      dl = D.cwiseProduct(J * dw + rp) - rc.cwiseQuotient(s);
      ds = -(rc + s.cwiseProduct(dl)).cwiseQuotient(lam);
    };

    Vector dw, dl, ds;
    const Vector rc_aff = s.cwiseProduct(lam);
    direction(rc_aff, dw, dl, ds);
    const double a_aff = std::min({1.0, MaxStep(s, ds), MaxStep(lam, dl)});
    const double mu_aff = (s + a_aff * ds).dot(lam + a_aff * dl) / m;
    const double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3);

    const Vector rc = rc_aff + ds.cwiseProduct(dl) - Vector::Constant(m, sigma * mu);
    direction(rc, dw, dl, ds);
    double alpha = std::min(1.0, 0.99 * std::min(MaxStep(s, ds), MaxStep(lam, dl)));
    if (!(alpha > 1e-14)) break;

    w += alpha * dw;
    s += alpha * ds;
    lam += alpha * dl;
    evaluate(w);
  }
  best.converged = best_merit <= std::max(tol * 100.0, 1e-7) && best.primal_residual <= 1e-8;
  return best;
}

}  // namespace

SolveResult SolveConvexQp(const QuadraticForm& objective, const ConvexSet& feasible,
                          const SolverOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  auto finish = [&](SolveResult r) {
    r.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
  };
  if (objective.dimension() != feasible.dimension()) {
    throw std::invalid_argument("SolveConvexQp: objective and set dimensions differ");
  }
  SolveResult result;
  const auto hull = feasible.AffineHull();
  if (!hull) {
    result.status = SolveStatus::kInfeasible;
    return finish(result);
  }
  const ConvexSet reduced_set =
      feasible.ComposeAffine(hull->shift, hull->basis).WithoutEqualities();
  const QuadraticForm reduced_obj = objective.ComposeAffine(hull->shift, hull->basis);
  const int k = static_cast<int>(hull->basis.cols());
  const double tol = std::max(options.accuracy * 1e-2, 1e-13);

  InequalityProblem prob;
  prob.P0 = reduced_obj.quadratic();
  prob.q0 = reduced_obj.linear();
  prob.r0 = reduced_obj.constant();
  for (const auto& c : reduced_set.inequalities()) {
    prob.constraints.push_back({Matrix(), c.a, -c.b});
  }
  for (const auto& g : reduced_set.quadratics()) prob.constraints.push_back(FromForm(g));

  if (k == 0) {
    const double viol = feasible.MaxViolation(hull->shift);
    result.iterations = 0;
    if (viol > 1e-9) {
      result.status = SolveStatus::kInfeasible;
      return finish(result);
    }
    result.status = SolveStatus::kOptimal;
    result.primal = hull->shift;
    result.objective_value = objective(hull->shift);
    return finish(result);
  }
  if (!prob.P0.isZero(0.0)) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(prob.P0, Eigen::EigenvaluesOnly);
    if (es.eigenvalues()(0) < -1e-9 * (1.0 + prob.P0.cwiseAbs().maxCoeff())) {
      throw std::invalid_argument("SolveConvexQp: objective is not convex");
    }
  }

  const int max_iters = std::max(options.max_iters, 50);
  IpmOutcome out = SolveInequalityForm(prob, Vector::Zero(k), tol, max_iters);
  int iterations = out.iterations;
  if (!out.converged) {
    // Phase I on (w, t).
    InequalityProblem phase1;
    phase1.P0 = Matrix::Zero(k + 1, k + 1);
    phase1.q0 = Vector::Unit(k + 1, k);
    for (const auto& c : prob.constraints) {
      Constraint lifted;
      if (c.P.size() > 0) {
        lifted.P = Matrix::Zero(k + 1, k + 1);
        lifted.P.topLeftCorner(k, k) = c.P;
      }
      lifted.q = Vector::Zero(k + 1);
      lifted.q.head(k) = c.q;
      lifted.q(k) = -1.0;
      lifted.r = c.r;
      phase1.constraints.push_back(std::move(lifted));
    }
    phase1.constraints.push_back({Matrix(), -Vector::Unit(k + 1, k), -1.0});
    Vector start_point = Vector::Zero(k + 1);
    double worst = 0.0;
    for (const auto& c : prob.constraints) worst = std::max(worst, c.Value(Vector::Zero(k)));
    start_point(k) = worst + 1.0;
    const IpmOutcome p1 = SolveInequalityForm(phase1, start_point, 1e-10, max_iters);
    iterations += p1.iterations;
    const double infeasibility = p1.w.size() ? p1.w(k) : 1.0;
    if (p1.converged && infeasibility > 1e-7) {
      result.status = SolveStatus::kInfeasible;
      result.iterations = iterations;
      return finish(result);
    }
    if (p1.w.size()) {
      out = SolveInequalityForm(prob, p1.w.head(k), tol, max_iters);
      iterations += out.iterations;
    }
    if (!out.converged) {
      result.status = (p1.converged && infeasibility > 1e-9) ? SolveStatus::kInfeasible
                                                               : SolveStatus::kNumericalFailure;
      result.iterations = iterations;
      return finish(result);
    }
  }
  result.status = SolveStatus::kOptimal;
  result.primal = hull->shift + hull->basis * out.w;
  result.objective_value = objective(result.primal);
  result.iterations = iterations;
  result.primal_residual = out.primal_residual;
  result.dual_residual = out.dual_residual;
  result.gap = out.gap;
  return finish(result);
}

SolveResult SolveConvexQp(const QuadraticForm& objective, std::span<const ConvexSet> sets,
                          const SolverOptions& options) {
  ConvexSet merged(objective.dimension());
  for (const auto& s : sets) merged.Intersect(s);
  return SolveConvexQp(objective, merged, options);
}

}  // namespace mqgcs
