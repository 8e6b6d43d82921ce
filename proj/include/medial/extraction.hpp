#pragma once

// Approximate medial axes of planar polygons sampled along their boundary,
// from the Voronoi diagram of the sample points.

#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "medial/medial_graph.hpp"

namespace medial {

inline constexpr std::size_t kMinBoundaryPoints = 16;
inline constexpr double kDefaultPruneRatio = 0.5;

/// Closed, simple, counterclockwise boundary polyline (the closing segment is
/// implicit).
class BoundarySample {
 public:
  /// Drops a repeated closing point, reorients clockwise input and checks
  /// simplicity. Throws TooFewPoints or NotSimple.
  explicit BoundarySample(std::vector<Eigen::Vector2d> points);

  const std::vector<Eigen::Vector2d>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  const Eigen::Vector2d& operator[](std::size_t i) const { return points_[i]; }

  double signed_area() const;
  bool contains(const Eigen::Vector2d& p) const;
  double min_spacing() const;

 private:
  std::vector<Eigen::Vector2d> points_;
};

/// {"points": [[x, y], ...]}
BoundarySample parse_boundary(std::string_view json_text);

/// Axis-aligned rectangle centred at the origin, corners included, the
/// remaining samples spread over the sides in proportion to their length.
BoundarySample sample_rectangle(double width, double height, std::size_t count);

/// Ellipse with semi-axes a (along x) and b, uniform in the angle parameter.
BoundarySample sample_ellipse(double a, double b, std::size_t count);

struct FootPoint {
  Eigen::Vector2d point;
  double distance;
};

/// Local minima of the distance from p to the boundary polyline, nearest first.
std::vector<FootPoint> boundary_foot_points(const BoundarySample& boundary, const Eigen::Vector2d& p);

/// Voronoi skeleton: interior Voronoi edges whose two generating samples are
/// at least prune_ratio * (local radius) apart, merged at coincident
/// vertices, restricted to the largest connected piece and chained into
/// curves. Degree-1 vertices are edges, degree >= 3 branches. Radii and radial
/// vectors come from the nearest foot points on the boundary polyline: two at
/// curve points, one per incident curve at vertices.
MedialGraph extract_medial_2d(const BoundarySample& boundary, double prune_ratio = kDefaultPruneRatio);

}  // namespace medial
