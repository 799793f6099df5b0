#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mqgcs/scenario_io.hpp"
#include "mqgcs/synthesis.hpp"

namespace mqgcs {

/// Values of one vertex bound on a regular grid over the vertex set's
/// bounding box; NaN at grid points outside the set.
struct BoundGrid {
  std::string vertex;
  Vector xs;      // grid abscissae
  Vector ys;      // grid ordinates
  Matrix values;  // values(i, j) at (xs(i), ys(j))
};

/// Evaluates EvaluateBound at every grid point inside X_v. `resolution` is
/// the number of grid points per axis (>= 2).
BoundGrid SampleBoundGrid(const GcsGraph& graph, const LowerBoundCertificate& cert,
                          const std::string& vertex, int resolution,
                          const std::optional<Vector>& x_t = std::nullopt);

struct RenderOptions {
  /// Draws contour lines of every bound when set.
  const LowerBoundCertificate* cert = nullptr;
  /// Joint-mode certificates are drawn at this target point.
  std::optional<Vector> target_point;
  std::vector<Trajectory> trajectories;
  int grid_resolution = 41;
  int contour_levels = 6;
  double width_px = 720.0;
};

/// Deterministic SVG of a planar scenario: vertex sets (points, segments,
/// polygons), edges, bound contours and trajectories. Throws
/// std::invalid_argument when some vertex is not two-dimensional.
std::string RenderSvg(const Scenario& scenario, const RenderOptions& options = {});

}  // namespace mqgcs
