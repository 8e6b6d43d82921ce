#pragma once

// Deterministic SVG diagrams of branch configurations and medial graphs.

#include <string>

#include "medial/branch_geometry.hpp"
#include "medial/medial_graph.hpp"

namespace medial {

/// Tangent rays as <line> elements, radial vectors as arrow-tipped paths and
/// the angles between consecutive rays as labelled arcs (radians, 4 decimals).
std::string render_svg(const BranchConfig2D& config);

/// Curves as polylines, vertices as dots coloured by kind (first two
/// coordinates of each point).
std::string render_svg(const MedialGraph& graph);

/// Writes `content` to `path`; throws IoError.
void write_text_file(const std::string& path, const std::string& content);

void emit_svg(const BranchConfig2D& config, const std::string& path);
void emit_svg(const MedialGraph& graph, const std::string& path);

}  // namespace medial
