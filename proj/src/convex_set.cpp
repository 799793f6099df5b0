#include "mqgcs/convex_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mqgcs/solver.hpp"

namespace mqgcs {

namespace {

// Artificial bound used to detect unbounded directions.
constexpr double kBoundingLimit = 1e7;

}  // namespace

void ConvexSet::RequireDimension(Eigen::Index n, const char* what) const {
  if (n != dimension_) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (set has " +
                                std::to_string(dimension_) + ", got " + std::to_string(n) +
                                ")");
  }
}

ConvexSet ConvexSet::Box(const Vector& lower, const Vector& upper) {
  if (lower.size() != upper.size()) {
    throw std::invalid_argument("ConvexSet::Box: bound size mismatch");
  }
  const int n = static_cast<int>(lower.size());
  ConvexSet set(n);
  for (int i = 0; i < n; ++i) {
    if (lower(i) > upper(i)) throw std::invalid_argument("ConvexSet::Box: lower > upper");
    Vector e = Vector::Unit(n, i);
    set.AddInequality(e, upper(i));
    set.AddInequality(-e, -lower(i));
  }
  return set;
}

ConvexSet ConvexSet::Point(const Vector& point) {
  const int n = static_cast<int>(point.size());
  ConvexSet set(n);
  for (int i = 0; i < n; ++i) set.AddEquality(Vector::Unit(n, i), point(i));
  return set;
}

ConvexSet ConvexSet::Segment(const Vector& p0, const Vector& p1) {
  if (p0.size() != p1.size()) {
    throw std::invalid_argument("ConvexSet::Segment: endpoint size mismatch");
  }
  const int n = static_cast<int>(p0.size());
  const Vector d = p1 - p0;
  if (d.norm() == 0.0) return Point(p0);
  ConvexSet set(n);
  // Orthogonal complement of d spans the equalities.
  Eigen::JacobiSVD<Matrix> svd(d.transpose(), Eigen::ComputeFullV);
  const Matrix V = svd.matrixV();
  for (int i = 1; i < n; ++i) {
    Vector a = V.col(i);
    set.AddEquality(a, a.dot(p0));
  }
  set.AddInequality(d, d.dot(p1));
  set.AddInequality(-d, -d.dot(p0));
  return set;
}

ConvexSet ConvexSet::Ball(const Vector& center, double radius) {
  if (radius < 0.0) throw std::invalid_argument("ConvexSet::Ball: negative radius");
  const int n = static_cast<int>(center.size());
  ConvexSet set(n);
  QuadraticForm g = QuadraticForm::SquaredDistanceTo(center);
  g -= QuadraticForm::Constant(n, radius * radius);
  set.AddQuadratic(g);
  return set;
}

ConvexSet& ConvexSet::AddEquality(const Vector& a, double b) {
  RequireDimension(a.size(), "ConvexSet::AddEquality");
  equalities_.push_back({a, b});
  return *this;
}

ConvexSet& ConvexSet::AddInequality(const Vector& a, double b) {
  RequireDimension(a.size(), "ConvexSet::AddInequality");
  inequalities_.push_back({a, b});
  return *this;
}

ConvexSet& ConvexSet::AddQuadratic(const QuadraticForm& g) {
  RequireDimension(g.dimension(), "ConvexSet::AddQuadratic");
  if (!g.IsConvex(kPsdTol)) {
    throw std::invalid_argument("ConvexSet::AddQuadratic: constraint is not convex");
  }
  quadratics_.push_back(g);
  return *this;
}

ConvexSet& ConvexSet::Intersect(const ConvexSet& other) {
  RequireDimension(other.dimension(), "ConvexSet::Intersect");
  equalities_.insert(equalities_.end(), other.equalities_.begin(), other.equalities_.end());
  inequalities_.insert(inequalities_.end(), other.inequalities_.begin(),
                       other.inequalities_.end());
  quadratics_.insert(quadratics_.end(), other.quadratics_.begin(), other.quadratics_.end());
  return *this;
}

double ConvexSet::MaxViolation(const Vector& x) const {
  RequireDimension(x.size(), "ConvexSet::MaxViolation");
  double worst = 0.0;
  for (const auto& c : equalities_) worst = std::max(worst, std::abs(c.a.dot(x) - c.b));
  for (const auto& c : inequalities_) worst = std::max(worst, c.a.dot(x) - c.b);
  for (const auto& g : quadratics_) worst = std::max(worst, g(x));
  return worst;
}

bool ConvexSet::Contains(const Vector& x, double tol) const {
  if (tol < 0.0) throw std::invalid_argument("ConvexSet::Contains: negative tolerance");
  return MaxViolation(x) <= tol;
}

AxisBox ConvexSet::BoundingBox() const {
  const int n = dimension_;
  AxisBox box{Vector(n), Vector(n)};
  if (auto axis = AsAxisBox()) return *axis;
  ConvexSet guarded = *this;
  guarded.Intersect(Box(Vector::Constant(n, -kBoundingLimit), Vector::Constant(n, kBoundingLimit)));
  SolverOptions options;
  options.accuracy = 1e-10;
  for (int i = 0; i < n; ++i) {
    for (double sign : {1.0, -1.0}) {
      const auto objective = QuadraticForm::Affine(sign * Vector::Unit(n, i), 0.0);
      const SolveResult r = SolveConvexQp(objective, guarded, options);
      if (r.status == SolveStatus::kInfeasible) {
        throw std::runtime_error("ConvexSet::BoundingBox: empty set");
      }
      if (!r.optimal()) {
        throw std::runtime_error("ConvexSet::BoundingBox: solver failure");
      }
      const double value = sign * r.objective_value;
      if (std::abs(value) > 0.5 * kBoundingLimit) {
        throw UnboundedSetError("unbounded set: coordinate " + std::to_string(i));
      }
      (sign > 0 ? box.lower : box.upper)(i) = value;
    }
  }
  return box;
}

std::optional<Vector> ConvexSet::SingletonPoint(double tol) const {
  if (equalities_.size() >= static_cast<std::size_t>(dimension_)) {
    Matrix A(equalities_.size(), dimension_);
    Vector b(equalities_.size());
    for (std::size_t i = 0; i < equalities_.size(); ++i) {
      A.row(i) = equalities_[i].a.transpose();
      b(i) = equalities_[i].b;
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(A);
    if (qr.rank() == dimension_) {
      Vector x = qr.solve(b);
      if (MaxViolation(x) <= std::max(tol, 1e-9)) return x;
      return std::nullopt;
    }
  }
  const AxisBox box = BoundingBox();
  if ((box.upper - box.lower).maxCoeff() <= tol) return box.center();
  return std::nullopt;
}

std::optional<AxisBox> ConvexSet::AsAxisBox() const {
  if (!equalities_.empty() || !quadratics_.empty()) return std::nullopt;
  const int n = dimension_;
  const double inf = std::numeric_limits<double>::infinity();
  AxisBox box{Vector::Constant(n, -inf), Vector::Constant(n, inf)};
  for (const auto& c : inequalities_) {
    int nonzero = -1;
    for (int i = 0; i < n; ++i) {
      if (c.a(i) != 0.0) {
        if (nonzero >= 0) return std::nullopt;
        nonzero = i;
      }
    }
    if (nonzero < 0) return std::nullopt;
    const double bound = c.b / c.a(nonzero);
    if (c.a(nonzero) > 0) {
      box.upper(nonzero) = std::min(box.upper(nonzero), bound);
    } else {
      box.lower(nonzero) = std::max(box.lower(nonzero), bound);
    }
  }
  if (!box.lower.allFinite() || !box.upper.allFinite()) return std::nullopt;
  if ((box.upper - box.lower).minCoeff() < 0.0) return std::nullopt;
  return box;
}

ConvexSet ConvexSet::Lift(int ambient, int offset) const {
  if (offset < 0 || offset + dimension_ > ambient) {
    throw std::invalid_argument("ConvexSet::Lift: range out of bounds");
  }
  ConvexSet lifted(ambient);
  auto lift_vec = [&](const Vector& a) {
    Vector out = Vector::Zero(ambient);
    out.segment(offset, dimension_) = a;
    return out;
  };
  for (const auto& c : equalities_) lifted.equalities_.push_back({lift_vec(c.a), c.b});
  for (const auto& c : inequalities_) lifted.inequalities_.push_back({lift_vec(c.a), c.b});
  for (const auto& g : quadratics_) lifted.quadratics_.push_back(g.EmbedAt(ambient, offset));
  return lifted;
}

ConvexSet ConvexSet::ComposeAffine(const Vector& shift, const Matrix& basis) const {
  RequireDimension(shift.size(), "ConvexSet::ComposeAffine");
  ConvexSet out(static_cast<int>(basis.cols()));
  for (const auto& c : equalities_) {
    out.equalities_.push_back({basis.transpose() * c.a, c.b - c.a.dot(shift)});
  }
  for (const auto& c : inequalities_) {
    out.inequalities_.push_back({basis.transpose() * c.a, c.b - c.a.dot(shift)});
  }
  for (const auto& g : quadratics_) out.quadratics_.push_back(g.ComposeAffine(shift, basis));
  return out;
}

std::optional<AffineParametrization> ConvexSet::AffineHull() const {
  const int n = dimension_;
  if (equalities_.empty()) {
    return AffineParametrization{Vector::Zero(n), Matrix::Identity(n, n)};
  }
  Matrix A(equalities_.size(), n);
  Vector b(equalities_.size());
  for (std::size_t i = 0; i < equalities_.size(); ++i) {
    A.row(i) = equalities_[i].a.transpose();
    b(i) = equalities_[i].b;
  }
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(A);
  cod.setThreshold(1e-11);
  AffineParametrization out;
  out.shift = cod.solve(b);
  const double residual = (A * out.shift - b).cwiseAbs().maxCoeff();
  if (residual > 1e-9 * (1.0 + b.cwiseAbs().maxCoeff())) return std::nullopt;
  Eigen::ColPivHouseholderQR<Matrix> qr(A.transpose());
  qr.setThreshold(1e-11);
  const auto rank = qr.rank();
  const Matrix Q = qr.householderQ();
  out.basis = Q.rightCols(n - rank);
  return out;
}

ConvexSet ConvexSet::WithoutEqualities() const {
  ConvexSet out = *this;
  out.equalities_.clear();
  return out;
}

std::vector<Vector> SampleSet(const ConvexSet& set, int count, std::mt19937_64& rng) {
  std::vector<Vector> out;
  if (count <= 0) return out;
  const auto hull = set.AffineHull();
  if (!hull) throw std::runtime_error("SampleSet: empty set");
  const int k = static_cast<int>(hull->basis.cols());
  if (k == 0) {
    if (!set.Contains(hull->shift)) throw std::runtime_error("SampleSet: empty set");
    out.assign(count, hull->shift);
    return out;
  }
  const ConvexSet reduced = set.ComposeAffine(hull->shift, hull->basis).WithoutEqualities();
  const AxisBox box = reduced.BoundingBox();
  std::vector<std::uniform_real_distribution<double>> coord;
  for (int i = 0; i < k; ++i) coord.emplace_back(box.lower(i), box.upper(i));
  auto draw = [&] {
    Vector w(k);
    for (int i = 0; i < k; ++i) w(i) = coord[i](rng);
    return w;
  };
  const long max_tries = 2000L * count;
  for (long tries = 0; tries < max_tries && static_cast<int>(out.size()) < count; ++tries) {
    const Vector w = draw();
    if (reduced.Contains(w, 0.0)) out.push_back(hull->shift + hull->basis * w);
  }
  if (static_cast<int>(out.size()) == count) return out;

  // Thin set: convex combinations of projections of box samples.
  std::vector<Vector> anchors;
  for (int a = 0; a < 2 * k + 2; ++a) {
    const Vector p = draw();
    const SolveResult r = SolveConvexQp(QuadraticForm::SquaredDistanceTo(p), reduced);
    if (r.optimal()) anchors.push_back(r.primal);
  }
  if (anchors.empty()) throw std::runtime_error("SampleSet: empty set");
  std::exponential_distribution<double> expo(1.0);
  while (static_cast<int>(out.size()) < count) {
    Vector w = Vector::Zero(k);
    double total = 0.0;
    for (const auto& a : anchors) {
      const double g = expo(rng);
      w += g * a;
      total += g;
    }
    out.push_back(hull->shift + hull->basis * (w / total));
  }
  return out;
}

}  // namespace mqgcs
