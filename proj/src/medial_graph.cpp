#include "medial/medial_graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include <json.hpp>

#include "medial/errors.hpp"

namespace medial {

namespace {

using nlohmann::json;

[[noreturn]] void schema(const std::string& what) { throw Error(ErrorCode::SchemaError, what); }
[[noreturn]] void violation(const std::string& what) { throw Error(ErrorCode::InvariantViolation, what); }

bool same(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return a.size() == b.size() && a == b; }

std::string where(const MedialCurve& c, std::size_t k) {
  return "curve " + std::to_string(c.id) + ", point " + std::to_string(k);
}

std::string number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_vector(std::string& out, const Eigen::VectorXd& v) {
  out += '[';
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += number(v[i]);
  }
  out += ']';
}

Eigen::VectorXd read_point(const json& j, int n, const std::string& what) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) schema(what + " must be an array of " + std::to_string(n) + " numbers");
  Eigen::VectorXd p(n);
  for (int i = 0; i < n; ++i) {
    if (!j[i].is_number()) schema(what + " must contain numbers");
    p[i] = j[i].get<double>();
  }
  return p;
}

VertexKind parse_kind(const json& j, int id) {
  if (j == "regular") return VertexKind::Regular;
  if (j == "branch") return VertexKind::Branch;
  if (j == "edge") return VertexKind::Edge;
  schema("vertex " + std::to_string(id) + ": kind must be regular, branch or edge");
}

}  // namespace

const char* to_string(VertexKind kind) {
  switch (kind) {
    case VertexKind::Regular: return "regular";
    case VertexKind::Branch: return "branch";
    case VertexKind::Edge: return "edge";
  }
  return "regular";
}

bool operator==(const GraphVertex& a, const GraphVertex& b) {
  return a.id == b.id && a.kind == b.kind && same(a.position, b.position);
}

bool operator==(const PolylineNode& a, const PolylineNode& b) { return a.vertex == b.vertex && same(a.point, b.point); }

bool operator==(const MedialCurve& a, const MedialCurve& b) {
  if (a.id != b.id || a.polyline != b.polyline || a.radii != b.radii ||
      a.radial_vectors.size() != b.radial_vectors.size())
    return false;
  for (std::size_t k = 0; k < a.radial_vectors.size(); ++k) {
    if (a.radial_vectors[k].size() != b.radial_vectors[k].size()) return false;
    for (std::size_t m = 0; m < a.radial_vectors[k].size(); ++m)
      if (!same(a.radial_vectors[k][m], b.radial_vectors[k][m])) return false;
  }
  return true;
}

bool operator==(const MedialGraph& a, const MedialGraph& b) {
  return a.ambient_dim == b.ambient_dim && a.vertices == b.vertices && a.curves == b.curves;
}

const GraphVertex* MedialGraph::find_vertex(int id) const {
  for (const auto& v : vertices)
    if (v.id == id) return &v;
  return nullptr;
}

std::vector<CurveIncidence> MedialGraph::incidences(int vertex_id) const {
  std::vector<CurveIncidence> out;
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const auto& poly = curves[c].polyline;
    if (poly.empty()) continue;
    if (poly.front().vertex == vertex_id) out.push_back({c, true});
    if (poly.size() > 1 && poly.back().vertex == vertex_id) out.push_back({c, false});
  }
  return out;
}

namespace {

// Asymmetry of the two radial vectors at interior point k, against the best of
// the central, backward and forward chords. A lone kink next to a pruned
// endpoint skews one chord but not the others. Negative if every chord is
// degenerate.
double smooth_violation_at(const MedialCurve& c, std::size_t k) {
  const Eigen::VectorXd diff = c.radial_vectors[k][0] - c.radial_vectors[k][1];
  double best = -1.0;
  for (auto [a, b] : {std::pair{k - 1, k + 1}, std::pair{k - 1, k}, std::pair{k, k + 1}}) {
    const Eigen::VectorXd chord = c.polyline[b].point - c.polyline[a].point;
    if (chord.norm() == 0.0) continue;
    const double v = std::abs(chord.normalized().dot(diff)) / (2.0 * c.radii[k]);
    best = best < 0.0 ? v : std::min(best, v);
  }
  return best;
}

}  // namespace

double max_smooth_violation(const MedialGraph& graph) {
  double worst = 0.0;
  for (const auto& c : graph.curves)
    for (std::size_t k = 1; k + 1 < c.polyline.size(); ++k)
      if (c.radial_vectors[k].size() == 2) worst = std::max(worst, smooth_violation_at(c, k));
  return worst;
}

void validate_medial_graph(const MedialGraph& graph, const GraphValidationOptions& options) {
  const int n = graph.ambient_dim;
  if (n < 2) violation("ambient_dim must be at least 2");

  std::set<int> vertex_ids;
  for (const auto& v : graph.vertices) {
    if (!vertex_ids.insert(v.id).second) violation("vertex " + std::to_string(v.id) + ": duplicate id");
    if (v.position.size() != n || !v.position.allFinite())
      violation("vertex " + std::to_string(v.id) + ": position must be a finite " + std::to_string(n) + "-vector");
  }

  std::set<int> curve_ids;
  for (const auto& c : graph.curves) {
    const std::string cid = "curve " + std::to_string(c.id);
    if (!curve_ids.insert(c.id).second) violation(cid + ": duplicate id");
    if (c.polyline.size() < 2) violation(cid + ": polyline needs at least two points");
    if (c.radii.size() != c.polyline.size() || c.radial_vectors.size() != c.polyline.size())
      violation(cid + ": radii and radial_vectors must have one entry per polyline point");
    for (std::size_t k = 0; k < c.polyline.size(); ++k) {
      const auto& node = c.polyline[k];
      if (node.vertex) {
        const GraphVertex* v = graph.find_vertex(*node.vertex);
        if (!v) violation(where(c, k) + ": unknown vertex " + std::to_string(*node.vertex));
        if (!same(v->position, node.point)) violation(where(c, k) + ": point differs from its vertex");
      }
      if (node.point.size() != n || !node.point.allFinite())
        violation(where(c, k) + ": point must be a finite " + std::to_string(n) + "-vector");
      const double r = c.radii[k];
      if (!(r > 0.0) || !std::isfinite(r)) violation(where(c, k) + ": radius " + number(r) + " is not positive");
      if (c.radial_vectors[k].empty()) violation(where(c, k) + ": no radial vectors");
      for (const auto& U : c.radial_vectors[k]) {
        if (U.size() != n || !U.allFinite()) violation(where(c, k) + ": radial vector has the wrong dimension");
        if (std::abs(U.norm() - r) > options.radius_rel_tol * r)
          violation(where(c, k) + ": |radial vector| = " + number(U.norm()) + " differs from radius " + number(r));
      }
    }
    for (std::size_t k = 1; k + 1 < c.polyline.size(); ++k) {
      if (c.radial_vectors[k].size() != 2) continue;
      const double v = smooth_violation_at(c, k);
      if (v < 0.0) violation(where(c, k) + ": repeated polyline points");
      if (v > options.smooth_tol)
        violation(where(c, k) + ": radial vectors are not symmetric about the tangent (" + number(v) + ")");
    }
  }

  for (const auto& v : graph.vertices)
    if (v.kind == VertexKind::Branch && graph.incidences(v.id).size() < 3)
      violation("vertex " + std::to_string(v.id) + ": branch vertex has fewer than 3 incident curves");
}

MedialGraph parse_medial_graph(std::string_view json_text, const GraphValidationOptions& options) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    schema(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) schema("document must be a JSON object");
  for (const char* key : {"ambient_dim", "vertices", "curves"})
    if (!doc.contains(key)) schema(std::string("missing '") + key + "'");
  if (!doc["ambient_dim"].is_number_integer()) schema("'ambient_dim' must be an integer");
  if (!doc["vertices"].is_array() || !doc["curves"].is_array()) schema("'vertices' and 'curves' must be arrays");

  MedialGraph g;
  g.ambient_dim = doc["ambient_dim"].get<int>();
  if (g.ambient_dim < 2) schema("'ambient_dim' must be at least 2");
  const int n = g.ambient_dim;

  for (const json& jv : doc["vertices"]) {
    if (!jv.is_object() || !jv.contains("id") || !jv["id"].is_number_integer() || !jv.contains("position") ||
        !jv.contains("kind"))
      schema("vertices need an integer 'id', a 'position' and a 'kind'");
    const int id = jv["id"].get<int>();
    g.vertices.push_back({id, read_point(jv["position"], n, "vertex " + std::to_string(id) + " position"),
                          parse_kind(jv["kind"], id)});
  }

  for (const json& jc : doc["curves"]) {
    if (!jc.is_object() || !jc.contains("id") || !jc["id"].is_number_integer())
      schema("curves need an integer 'id'");
    MedialCurve c;
    c.id = jc["id"].get<int>();
    const std::string cid = "curve " + std::to_string(c.id);
    for (const char* key : {"polyline", "radii", "radial_vectors"})
      if (!jc.contains(key) || !jc[key].is_array()) schema(cid + ": '" + key + "' must be an array");
    for (const json& node : jc["polyline"]) {
      if (node.is_number_integer()) {
        const int vid = node.get<int>();
        const GraphVertex* v = g.find_vertex(vid);
        if (!v) throw Error(ErrorCode::InvariantViolation, cid + ": unknown vertex " + std::to_string(vid));
        c.polyline.push_back({vid, v->position});
      } else {
        c.polyline.push_back({std::nullopt, read_point(node, n, cid + " polyline point")});
      }
    }
    for (const json& r : jc["radii"]) {
      if (!r.is_number()) schema(cid + ": radii must be numbers");
      c.radii.push_back(r.get<double>());
    }
    for (const json& point : jc["radial_vectors"]) {
      if (!point.is_array()) schema(cid + ": radial_vectors entries must be arrays of vectors");
      std::vector<Eigen::VectorXd> us;
      for (const json& u : point) us.push_back(read_point(u, n, cid + " radial vector"));
      c.radial_vectors.push_back(std::move(us));
    }
    g.curves.push_back(std::move(c));
  }

  validate_medial_graph(g, options);
  return g;
}

std::string serialize_medial_graph(const MedialGraph& graph) {
  std::string out = "{\n  \"ambient_dim\": " + std::to_string(graph.ambient_dim) + ",\n  \"vertices\": [";
  for (std::size_t i = 0; i < graph.vertices.size(); ++i) {
    const auto& v = graph.vertices[i];
    out += i ? ",\n    " : "\n    ";
    out += "{\"id\": " + std::to_string(v.id) + ", \"position\": ";
    write_vector(out, v.position);
    out += std::string(", \"kind\": \"") + to_string(v.kind) + "\"}";
  }
  out += graph.vertices.empty() ? "],\n  \"curves\": [" : "\n  ],\n  \"curves\": [";
  for (std::size_t i = 0; i < graph.curves.size(); ++i) {
    const auto& c = graph.curves[i];
    out += i ? ",\n    " : "\n    ";
    out += "{\"id\": " + std::to_string(c.id) + ",\n     \"polyline\": [";
    for (std::size_t k = 0; k < c.polyline.size(); ++k) {
      if (k) out += ", ";
      if (c.polyline[k].vertex)
        out += std::to_string(*c.polyline[k].vertex);
      else
        write_vector(out, c.polyline[k].point);
    }
    out += "],\n     \"radii\": [";
    for (std::size_t k = 0; k < c.radii.size(); ++k) out += (k ? ", " : "") + number(c.radii[k]);
    out += "],\n     \"radial_vectors\": [";
    for (std::size_t k = 0; k < c.radial_vectors.size(); ++k) {
      out += k ? ", [" : "[";
      for (std::size_t m = 0; m < c.radial_vectors[k].size(); ++m) {
        if (m) out += ", ";
        write_vector(out, c.radial_vectors[k][m]);
      }
      out += ']';
    }
    out += "]}";
  }
  out += graph.curves.empty() ? "]\n}\n" : "\n  ]\n}\n";
  return out;
}

BranchConfig2D branch_config_from_graph(const MedialGraph& graph, int vertex_id, int window) {
  if (graph.ambient_dim != 2) throw Error(ErrorCode::InvalidValue, "branch configurations need a planar graph");
  const GraphVertex* v = graph.find_vertex(vertex_id);
  if (!v) throw Error(ErrorCode::NotABranch, "no vertex " + std::to_string(vertex_id));
  if (v->kind != VertexKind::Branch) throw Error(ErrorCode::NotABranch, "vertex " + std::to_string(vertex_id) + " is " + to_string(v->kind));
  const auto inc = graph.incidences(vertex_id);
  if (inc.size() != 3 && inc.size() != 4)
    throw Error(ErrorCode::NotABranch,
                "vertex " + std::to_string(vertex_id) + " has " + std::to_string(inc.size()) + " incident curves");
  if (window < 2) throw Error(ErrorCode::InvalidValue, "tangent window must be at least 2");

  std::vector<Eigen::Vector2d> rays;
  const std::vector<Eigen::VectorXd>* stored = nullptr;
  for (const auto& [ci, at_start] : inc) {
    const auto& c = graph.curves[ci];
    const std::size_t m = std::min<std::size_t>(window, c.polyline.size());
    if (m < 2)
      throw Error(ErrorCode::InsufficientPolylinePoints, "curve " + std::to_string(c.id) + " is too short");
    Eigen::MatrixXd pts(m, 2);
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t idx = at_start ? k : c.polyline.size() - 1 - k;
      pts.row(k) = c.polyline[idx].point.transpose();
    }
    const Eigen::RowVector2d centroid = pts.colwise().mean();
    const Eigen::MatrixXd centered = pts.rowwise() - centroid;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
    if (!(svd.singularValues()[0] > 0.0))
      throw Error(ErrorCode::InsufficientPolylinePoints, "curve " + std::to_string(c.id) + " has coincident points");
    Eigen::Vector2d dir = svd.matrixV().col(0);
    const Eigen::Vector2d outward = (pts.row(m - 1) - pts.row(0)).transpose();
    if (dir.dot(outward) < 0.0) dir = -dir;
    rays.push_back(dir);

    const auto& at_vertex = c.radial_vectors[at_start ? 0 : c.polyline.size() - 1];
    if (!stored && at_vertex.size() == inc.size()) stored = &at_vertex;
  }

  std::vector<Eigen::Vector2d> radials;
  if (stored)
    for (const auto& U : *stored) radials.emplace_back(U[0], U[1]);
  return BranchConfig2D(rays, radials);
}

MedialGraph make_branch_graph(const BranchConfig2D& config, double radius, double length, int points_per_curve) {
  if (!(radius > 0.0) || !(length > 0.0) || points_per_curve < 2)
    throw Error(ErrorCode::InvalidValue, "radius and length must be positive, with at least 2 points per curve");
  MedialGraph g;
  g.ambient_dim = 2;
  g.vertices.push_back({0, Eigen::Vector2d::Zero(), VertexKind::Branch});

  std::vector<Eigen::VectorXd> at_branch;
  for (const auto& U : config.radial_vectors()) at_branch.push_back(Eigen::VectorXd(radius * U.normalized()));

  const auto& rays = config.tangent_rays();
  for (std::size_t i = 0; i < rays.size(); ++i) {
    const int end_id = static_cast<int>(i) + 1;
    const Eigen::Vector2d d = rays[i];
    const Eigen::Vector2d normal(-d.y(), d.x());
    g.vertices.push_back({end_id, Eigen::VectorXd(length * d), VertexKind::Edge});

    MedialCurve c;
    c.id = static_cast<int>(i);
    for (int k = 0; k < points_per_curve; ++k) {
      const bool first = k == 0, last = k == points_per_curve - 1;
      PolylineNode node;
      if (first) node = {0, g.vertices[0].position};
      else if (last) node = {end_id, g.vertices.back().position};
      else node = {std::nullopt, Eigen::VectorXd(length * k / (points_per_curve - 1) * d)};
      c.polyline.push_back(node);
      c.radii.push_back(radius);
      if (first)
        c.radial_vectors.push_back(at_branch.empty() ? std::vector<Eigen::VectorXd>{radius * normal, -radius * normal}
                                                     : at_branch);
      else if (last)
        c.radial_vectors.push_back({Eigen::VectorXd(radius * d)});
      else
        c.radial_vectors.push_back({Eigen::VectorXd(radius * normal), Eigen::VectorXd(-radius * normal)});
    }
    g.curves.push_back(std::move(c));
  }
  return g;
}

}  // namespace medial
