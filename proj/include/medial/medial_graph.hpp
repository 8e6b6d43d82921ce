#pragma once

// Discrete medial axes: vertices joined by polyline curves that carry radii
// and the (multi-valued) radial vectors at every point. JSON layout:
//
//   {"ambient_dim": n,
//    "vertices": [{"id": 0, "position": [...], "kind": "branch"}, ...],
//    "curves": [{"id": 0, "polyline": [0, [x, y], ..., 1],
//                "radii": [...], "radial_vectors": [[[ux, uy], ...], ...]}]}
//
// Polyline entries are vertex ids or inline points.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "medial/branch_geometry.hpp"

namespace medial {

enum class VertexKind { Regular, Branch, Edge };

const char* to_string(VertexKind kind);

struct GraphVertex {
  int id;
  Eigen::VectorXd position;
  VertexKind kind;
};

struct PolylineNode {
  std::optional<int> vertex;  // set when the node refers to a graph vertex
  Eigen::VectorXd point;      // always resolved
};

struct MedialCurve {
  int id;
  std::vector<PolylineNode> polyline;
  std::vector<double> radii;
  std::vector<std::vector<Eigen::VectorXd>> radial_vectors;
};

struct CurveIncidence {
  std::size_t curve;  // index into MedialGraph::curves
  bool at_start;      // the vertex is polyline.front()
};

struct MedialGraph {
  int ambient_dim = 2;
  std::vector<GraphVertex> vertices;
  std::vector<MedialCurve> curves;

  const GraphVertex* find_vertex(int id) const;
  std::vector<CurveIncidence> incidences(int vertex_id) const;
};

/// Exact equality of every stored value.
bool operator==(const GraphVertex& a, const GraphVertex& b);
bool operator==(const PolylineNode& a, const PolylineNode& b);
bool operator==(const MedialCurve& a, const MedialCurve& b);
bool operator==(const MedialGraph& a, const MedialGraph& b);

struct GraphValidationOptions {
  double radius_rel_tol = 1e-6;
  /// Bound on |t . (U_1 - U_2)| / (2 r) at smooth points, i.e. the difference
  /// of the cosines of the two radial vectors with the unit tangent, halved.
  /// The tangent is the best of the central and one-sided chords.
  double smooth_tol = 0.05;
};

/// Throws InvariantViolation naming the offending vertex or curve point.
void validate_medial_graph(const MedialGraph& graph, const GraphValidationOptions& options = {});

/// Largest smooth-point violation, as measured by `smooth_tol`.
double max_smooth_violation(const MedialGraph& graph);

MedialGraph parse_medial_graph(std::string_view json_text, const GraphValidationOptions& options = {});
std::string serialize_medial_graph(const MedialGraph& graph);

inline constexpr int kTangentWindow = 5;

/// Tangent rays at a branch vertex by total-least-squares fits over the
/// `window` polyline points nearest the vertex on each incident curve, with
/// the radial vectors stored at the vertex.
BranchConfig2D branch_config_from_graph(const MedialGraph& graph, int vertex_id, int window = kTangentWindow);

/// Planar graph of a single branch vertex with straight curves along the
/// rays of `config`: radius `radius` everywhere, radial vectors normal to
/// each curve, and the configuration's radial vectors at the vertex.
MedialGraph make_branch_graph(const BranchConfig2D& config, double radius = 1.0, double length = 1.0,
                              int points_per_curve = 11);

}  // namespace medial
