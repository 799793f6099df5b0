#include "mqgcs/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace mqgcs {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kPi = 3.14159265358979323846;

struct Shape {
  enum class Kind { kPoint, kSegment, kPolygon } kind = Kind::kPoint;
  std::vector<Vector> points;
  Vector center;
};

/// Corners of a 2D polytope: pairwise intersections of constraint lines that
/// satisfy all constraints, ordered by angle around their mean.
std::vector<Vector> PolytopeCorners(const ConvexSet& set) {
  const auto& ineqs = set.inequalities();
  std::vector<Vector> corners;
  for (std::size_t i = 0; i < ineqs.size(); ++i) {
    for (std::size_t j = i + 1; j < ineqs.size(); ++j) {
      Eigen::Matrix2d A;
      A.row(0) = ineqs[i].a.transpose();
      A.row(1) = ineqs[j].a.transpose();
      if (std::abs(A.determinant()) < 1e-12) continue;
      const Vector x = A.inverse() * Eigen::Vector2d(ineqs[i].b, ineqs[j].b);
      if (!set.Contains(x, 1e-9)) continue;
      bool duplicate = false;
      for (const auto& c : corners) duplicate = duplicate || (c - x).norm() < 1e-9;
      if (!duplicate) corners.push_back(x);
    }
  }
  Vector mean = Vector::Zero(2);
  for (const auto& c : corners) mean += c;
  if (!corners.empty()) mean /= static_cast<double>(corners.size());
  std::sort(corners.begin(), corners.end(), [&](const Vector& a, const Vector& b) {
    return std::atan2(a(1) - mean(1), a(0) - mean(0)) < std::atan2(b(1) - mean(1), b(0) - mean(0));
  });
  return corners;
}

/// Boundary by casting rays from an interior point.
std::vector<Vector> RayBoundary(const ConvexSet& set, const Vector& center, int rays) {
  std::vector<Vector> out;
  for (int k = 0; k < rays; ++k) {
    const double angle = 2.0 * kPi * k / rays;
    const Vector d{{std::cos(angle), std::sin(angle)}};
    double t = std::numeric_limits<double>::infinity();
    for (const auto& c : set.inequalities()) {
      const double ad = c.a.dot(d);
      if (ad > 1e-12) t = std::min(t, (c.b - c.a.dot(center)) / ad);
    }
    for (const auto& g : set.quadratics()) {
      // g(center + s d) = alpha s^2 + beta s + gamma <= 0.
      const double alpha = d.dot(g.quadratic() * d);
      const double beta = g.Gradient(center).dot(d);
      const double gamma = g(center);
      if (alpha > 1e-15) {
        const double disc = std::max(0.0, beta * beta - 4.0 * alpha * gamma);
        t = std::min(t, (-beta + std::sqrt(disc)) / (2.0 * alpha));
      } else if (beta > 1e-15) {
        t = std::min(t, -gamma / beta);
      }
    }
    if (std::isfinite(t)) out.push_back(center + std::max(0.0, t) * d);
  }
  return out;
}

Shape ShapeOf(const GcsVertex& v) {
  Shape shape;
  const ConvexSet& set = v.set;
  if (const auto p = set.SingletonPoint()) {
    shape.kind = Shape::Kind::kPoint;
    shape.points = {*p};
    shape.center = *p;
    return shape;
  }
  const auto hull = set.AffineHull();
  if (!hull) throw std::invalid_argument("RenderSvg: X_" + v.id + " is empty");
  if (hull->basis.cols() == 1) {
    const AxisBox range = set.ComposeAffine(hull->shift, hull->basis).WithoutEqualities().BoundingBox();
    shape.kind = Shape::Kind::kSegment;
    shape.points = {hull->shift + hull->basis * range.lower, hull->shift + hull->basis * range.upper};
    shape.center = 0.5 * (shape.points[0] + shape.points[1]);
    return shape;
  }
  shape.kind = Shape::Kind::kPolygon;
  if (set.quadratics().empty()) {
    shape.points = PolytopeCorners(set);
  }
  if (shape.points.size() < 3) {
    std::mt19937_64 rng(Fnv1a64(v.id));
    Vector center = Vector::Zero(2);
    const auto samples = SampleSet(set, 16, rng);
    for (const auto& s : samples) center += s;
    center /= static_cast<double>(samples.size());
    shape.points = RayBoundary(set, center, 96);
  }
  Vector center = Vector::Zero(2);
  for (const auto& p : shape.points) center += p;
  shape.center = center / static_cast<double>(std::max<std::size_t>(1, shape.points.size()));
  return shape;
}

std::string Num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", std::abs(x) < 5e-3 ? 0.0 : x);
  return buf;
}

/// Marching squares on one grid; returns line segments at `level`.
std::vector<std::pair<Vector, Vector>> ContourSegments(const BoundGrid& g, double level) {
  std::vector<std::pair<Vector, Vector>> segs;
  auto at = [&](int i, int j) { return Vector{{g.xs(i), g.ys(j)}}; };
  auto cross = [&](int i0, int j0, int i1, int j1) {
    const double a = g.values(i0, j0), b = g.values(i1, j1);
    const double s = (level - a) / (b - a);
    return Vector(at(i0, j0) + s * (at(i1, j1) - at(i0, j0)));
  };
  for (int i = 0; i + 1 < g.xs.size(); ++i) {
    for (int j = 0; j + 1 < g.ys.size(); ++j) {
      const double v[4] = {g.values(i, j), g.values(i + 1, j), g.values(i + 1, j + 1),
                           g.values(i, j + 1)};
      if (std::isnan(v[0]) || std::isnan(v[1]) || std::isnan(v[2]) || std::isnan(v[3])) continue;
      // Crossings on the four cell edges, in order bottom, right, top, left.
      std::vector<Vector> hits;
      if ((v[0] < level) != (v[1] < level)) hits.push_back(cross(i, j, i + 1, j));
      if ((v[1] < level) != (v[2] < level)) hits.push_back(cross(i + 1, j, i + 1, j + 1));
      if ((v[2] < level) != (v[3] < level)) hits.push_back(cross(i + 1, j + 1, i, j + 1));
      if ((v[3] < level) != (v[0] < level)) hits.push_back(cross(i, j + 1, i, j));
      for (std::size_t k = 0; k + 1 < hits.size(); k += 2) segs.emplace_back(hits[k], hits[k + 1]);
    }
  }
  return segs;
}

}  // namespace

BoundGrid SampleBoundGrid(const GcsGraph& graph, const LowerBoundCertificate& cert,
                          const std::string& vertex, int resolution, const std::optional<Vector>& x_t) {
  if (resolution < 2) throw std::invalid_argument("SampleBoundGrid: resolution must be >= 2");
  const ConvexSet& set = graph.vertex(vertex).set;
  const AxisBox box = set.BoundingBox();
  BoundGrid g;
  g.vertex = vertex;
  g.xs = Vector::LinSpaced(resolution, box.lower(0), box.upper(0));
  g.ys = Vector::LinSpaced(resolution, box.lower(1), box.upper(1));
  g.values = Matrix::Constant(resolution, resolution, kNaN);
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      const Vector x{{g.xs(i), g.ys(j)}};
      if (set.Contains(x)) g.values(i, j) = EvaluateBound(graph, cert, vertex, x, x_t);
    }
  }
  return g;
}

std::string RenderSvg(const Scenario& scenario, const RenderOptions& options) {
  const GcsGraph& graph = scenario.graph;
  for (const auto& v : graph.vertices()) {
    if (v.dimension() != 2) {
      throw std::invalid_argument("RenderSvg: vertex '" + v.id + "' is not two-dimensional");
    }
  }
  std::vector<Shape> shapes;
  Vector lo = Vector::Constant(2, std::numeric_limits<double>::infinity());
  Vector hi = -lo;
  for (const auto& v : graph.vertices()) {
    shapes.push_back(ShapeOf(v));
    for (const auto& p : shapes.back().points) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
  }
  if (shapes.empty()) {
    lo = Vector::Zero(2);
    hi = Vector::Ones(2);
  }
  const Vector pad = 0.05 * (hi - lo).cwiseMax(Vector::Ones(2));
  lo -= pad;
  hi += pad;
  const double scale = options.width_px / (hi(0) - lo(0));
  const double height = scale * (hi(1) - lo(1));
  auto X = [&](const Vector& p) { return Num(scale * (p(0) - lo(0))); };
  auto Y = [&](const Vector& p) { return Num(scale * (hi(1) - p(1))); };

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << Num(options.width_px)
      << "\" height=\"" << Num(height) << "\" viewBox=\"0 0 " << Num(options.width_px) << " "
      << Num(height) << "\">\n";
  out << "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" "
         "markerWidth=\"6\" markerHeight=\"6\" orient=\"auto-start-reverse\">"
         "<path d=\"M 0 0 L 10 5 L 0 10 z\" fill=\"#c0392b\"/></marker></defs>\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  out << "<g id=\"sets\">\n";
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    const Shape& s = shapes[i];
    const std::string& id = graph.vertices()[i].id;
    switch (s.kind) {
      case Shape::Kind::kPoint:
        out << "<circle data-vertex=\"" << id << "\" cx=\"" << X(s.center) << "\" cy=\""
            << Y(s.center) << "\" r=\"4\" fill=\"#16a085\"/>\n";
        break;
      case Shape::Kind::kSegment:
        out << "<line data-vertex=\"" << id << "\" x1=\"" << X(s.points[0]) << "\" y1=\""
            << Y(s.points[0]) << "\" x2=\"" << X(s.points[1]) << "\" y2=\"" << Y(s.points[1])
            << "\" stroke=\"#16a085\" stroke-width=\"3\"/>\n";
        break;
      case Shape::Kind::kPolygon:
        out << "<polygon data-vertex=\"" << id << "\" points=\"";
        for (std::size_t k = 0; k < s.points.size(); ++k) {
          out << (k ? " " : "") << X(s.points[k]) << "," << Y(s.points[k]);
        }
        out << "\" fill=\"#a3e4d7\" fill-opacity=\"0.5\" stroke=\"#16a085\"/>\n";
        break;
    }
    out << "<text x=\"" << X(s.center) << "\" y=\"" << Y(s.center)
        << "\" font-size=\"12\" text-anchor=\"middle\">" << id << "</text>\n";
  }
  out << "</g>\n<g id=\"edges\">\n";
  for (const auto& e : graph.edges()) {
    if (!graph.HasVertex(e.tail) || !graph.HasVertex(e.head)) continue;
    const Vector& a = shapes[graph.IndexOf(e.tail)].center;
    const Vector& b = shapes[graph.IndexOf(e.head)].center;
    out << "<line x1=\"" << X(a) << "\" y1=\"" << Y(a) << "\" x2=\"" << X(b) << "\" y2=\"" << Y(b)
        << "\" stroke=\"#c0392b\" stroke-opacity=\"0.5\" marker-end=\"url(#arrow)\"/>\n";
  }
  out << "</g>\n";

  if (options.cert != nullptr) {
    out << "<g id=\"contours\">\n";
    for (std::size_t i = 0; i < shapes.size(); ++i) {
      const std::string& id = graph.vertices()[i].id;
      if (shapes[i].kind != Shape::Kind::kPolygon || options.cert->bounds.count(id) == 0) continue;
      const BoundGrid g = SampleBoundGrid(graph, *options.cert, id, options.grid_resolution,
                                          options.target_point);
      double vmin = std::numeric_limits<double>::infinity(), vmax = -vmin;
      for (Eigen::Index k = 0; k < g.values.size(); ++k) {
        const double v = g.values.data()[k];
        if (std::isnan(v)) continue;
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
      }
      if (!(vmax > vmin)) continue;
      for (int l = 1; l <= options.contour_levels; ++l) {
        const double level = vmin + (vmax - vmin) * l / (options.contour_levels + 1);
        const auto segs = ContourSegments(g, level);
        if (segs.empty()) continue;
        out << "<path data-vertex=\"" << id << "\" data-level=\"" << Num(level) << "\" d=\"";
        for (const auto& [p, q] : segs) {
          out << "M" << X(p) << " " << Y(p) << "L" << X(q) << " " << Y(q);
        }
        out << "\" fill=\"none\" stroke=\"#8e44ad\" stroke-width=\"0.8\"/>\n";
      }
    }
    out << "</g>\n";
  }

  if (!options.trajectories.empty()) {
    out << "<g id=\"trajectories\">\n";
    for (const auto& traj : options.trajectories) {
      out << "<polyline points=\"";
      for (std::size_t k = 0; k < traj.points.size(); ++k) {
        if (traj.points[k].size() != 2) {
          throw std::invalid_argument("RenderSvg: trajectory point is not two-dimensional");
        }
        out << (k ? " " : "") << X(traj.points[k]) << "," << Y(traj.points[k]);
      }
      out << "\" fill=\"none\" stroke=\"#2471a3\" stroke-width=\"2\"/>\n";
      for (const auto& p : traj.points) {
        out << "<circle cx=\"" << X(p) << "\" cy=\"" << Y(p) << "\" r=\"2.5\" fill=\"#2471a3\"/>\n";
      }
    }
    out << "</g>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace mqgcs
