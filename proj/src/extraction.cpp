#include "medial/extraction.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>

#include <boost/polygon/voronoi.hpp>
#include <json.hpp>

#include "medial/errors.hpp"

namespace medial {

namespace {

double cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

bool segments_intersect(const Eigen::Vector2d& p1, const Eigen::Vector2d& p2, const Eigen::Vector2d& q1,
                        const Eigen::Vector2d& q2) {
  const double d1 = cross(q2 - q1, p1 - q1), d2 = cross(q2 - q1, p2 - q1);
  const double d3 = cross(p2 - p1, q1 - p1), d4 = cross(p2 - p1, q2 - p1);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return true;
  auto on_segment = [](const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& p) {
    return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) && std::min(a.y(), b.y()) <= p.y() &&
           p.y() <= std::max(a.y(), b.y());
  };
  return (d1 == 0 && on_segment(q1, q2, p1)) || (d2 == 0 && on_segment(q1, q2, p2)) ||
         (d3 == 0 && on_segment(p1, p2, q1)) || (d4 == 0 && on_segment(p1, p2, q2));
}

// Parameter in [0, 1] of the point of segment ab closest to p.
double closest_parameter(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& p) {
  const Eigen::Vector2d d = b - a;
  const double len2 = d.squaredNorm();
  return len2 > 0.0 ? std::clamp((p - a).dot(d) / len2, 0.0, 1.0) : 0.0;
}

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

struct SkeletonEdge {
  std::size_t a, b;
};

}  // namespace

BoundarySample::BoundarySample(std::vector<Eigen::Vector2d> points) : points_(std::move(points)) {
  if (points_.size() > 1 && points_.front() == points_.back()) points_.pop_back();
  if (points_.size() < kMinBoundaryPoints)
    throw Error(ErrorCode::TooFewPoints, "boundary needs at least " + std::to_string(kMinBoundaryPoints) + " points");
  for (const auto& p : points_)
    if (!p.allFinite()) throw Error(ErrorCode::InvalidValue, "boundary points must be finite");

  const std::size_t n = points_.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (points_[i] == points_[(i + 1) % n]) throw Error(ErrorCode::NotSimple, "repeated boundary point");
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // adjacent through the closing segment
      if (segments_intersect(points_[i], points_[i + 1], points_[j], points_[(j + 1) % n]))
        throw Error(ErrorCode::NotSimple, "boundary segments " + std::to_string(i) + " and " + std::to_string(j) +
                                              " intersect");
    }
  }
  if (signed_area() < 0.0) std::reverse(points_.begin(), points_.end());
}

double BoundarySample::signed_area() const {
  double a = 0.0;
  for (std::size_t i = 0; i < points_.size(); ++i) a += cross(points_[i], points_[(i + 1) % points_.size()]);
  return 0.5 * a;
}

bool BoundarySample::contains(const Eigen::Vector2d& p) const {
  bool inside = false;
  const std::size_t n = points_.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& a = points_[i];
    const auto& b = points_[j];
    if ((a.y() > p.y()) != (b.y() > p.y()) && p.x() < (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x())
      inside = !inside;
  }
  return inside;
}

double BoundarySample::min_spacing() const {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points_.size(); ++i)
    m = std::min(m, (points_[(i + 1) % points_.size()] - points_[i]).norm());
  return m;
}

BoundarySample parse_boundary(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::SchemaError, std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("points") || !doc["points"].is_array())
    throw Error(ErrorCode::SchemaError, "boundary file needs a 'points' array");
  std::vector<Eigen::Vector2d> pts;
  for (const auto& p : doc["points"]) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
      throw Error(ErrorCode::SchemaError, "boundary points must be [x, y]");
    pts.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  return BoundarySample(std::move(pts));
}

BoundarySample sample_rectangle(double width, double height, std::size_t count) {
  if (!(width > 0.0) || !(height > 0.0)) throw Error(ErrorCode::InvalidValue, "rectangle sides must be positive");
  if (count < kMinBoundaryPoints) throw Error(ErrorCode::TooFewPoints, "too few samples");
  const double w = width / 2, h = height / 2;
  const std::array<Eigen::Vector2d, 4> corners{Eigen::Vector2d(-w, -h), Eigen::Vector2d(w, -h), Eigen::Vector2d(w, h),
                                               Eigen::Vector2d(-w, h)};
  const std::array<double, 4> lengths{width, height, width, height};
  const double perimeter = 2 * (width + height);
  std::vector<Eigen::Vector2d> pts;
  std::size_t used = 0;
  for (int s = 0; s < 4; ++s) {
    // Samples on this side, its start corner included.
    const std::size_t k = s == 3 ? count - used
                                 : std::max<std::size_t>(1, std::llround(count * lengths[s] / perimeter));
    used += k;
    const auto& a = corners[s];
    const auto& b = corners[(s + 1) % 4];
    for (std::size_t i = 0; i < k; ++i) pts.push_back(a + (b - a) * (static_cast<double>(i) / k));
  }
  return BoundarySample(std::move(pts));
}

BoundarySample sample_ellipse(double a, double b, std::size_t count) {
  if (!(a > 0.0) || !(b > 0.0)) throw Error(ErrorCode::InvalidValue, "semi-axes must be positive");
  std::vector<Eigen::Vector2d> pts;
  for (std::size_t i = 0; i < count; ++i) {
    const double t = 2.0 * std::numbers::pi * i / count;
    pts.emplace_back(a * std::cos(t), b * std::sin(t));
  }
  return BoundarySample(std::move(pts));
}

std::vector<FootPoint> boundary_foot_points(const BoundarySample& boundary, const Eigen::Vector2d& p) {
  const std::size_t n = boundary.size();
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = closest_parameter(boundary[i], boundary[(i + 1) % n], p);

  std::vector<FootPoint> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = boundary[i];
    const auto& b = boundary[(i + 1) % n];
    if (t[i] > 0.0 && t[i] < 1.0) {
      const Eigen::Vector2d q = a + t[i] * (b - a);
      out.push_back({q, (q - p).norm()});
    } else if (t[i] == 1.0 && t[(i + 1) % n] == 0.0) {
      out.push_back({b, (b - p).norm()});
    }
  }
  std::sort(out.begin(), out.end(), [](const FootPoint& x, const FootPoint& y) { return x.distance < y.distance; });
  return out;
}

MedialGraph extract_medial_2d(const BoundarySample& boundary, double prune_ratio) {
  if (!(prune_ratio >= 0.0 && prune_ratio < 1.0)) throw Error(ErrorCode::InvalidValue, "prune ratio must be in [0, 1)");
  namespace bp = boost::polygon;

  // Integer sites for the Voronoi construction.
  Eigen::Vector2d lo = boundary[0], hi = boundary[0];
  for (const auto& p : boundary.points()) lo = lo.cwiseMin(p), hi = hi.cwiseMax(p);
  const Eigen::Vector2d centre = 0.5 * (lo + hi);
  const double extent = 0.5 * (hi - lo).maxCoeff();
  const double scale = 1e7 / extent;
  std::vector<bp::point_data<int>> sites;
  for (const auto& p : boundary.points()) {
    const Eigen::Vector2d q = (p - centre) * scale;
    sites.emplace_back(static_cast<int>(std::lround(q.x())), static_cast<int>(std::lround(q.y())));
  }
  bp::voronoi_diagram<double> vd;
  bp::construct_voronoi(sites.begin(), sites.end(), &vd);

  auto to_world = [&](const bp::voronoi_vertex<double>& v) {
    return Eigen::Vector2d(v.x() / scale + centre.x(), v.y() / scale + centre.y());
  };
  auto site_point = [&](const bp::voronoi_cell<double>* c) {
    const auto& s = sites[c->source_index()];
    return Eigen::Vector2d(s.x() / scale + centre.x(), s.y() / scale + centre.y());
  };

  std::map<const bp::voronoi_vertex<double>*, std::size_t> index;
  std::vector<Eigen::Vector2d> nodes;
  auto node_of = [&](const bp::voronoi_vertex<double>* v) {
    auto [it, fresh] = index.emplace(v, nodes.size());
    if (fresh) nodes.push_back(to_world(*v));
    return it->second;
  };

  std::vector<SkeletonEdge> edges;
  for (const auto& e : vd.edges()) {
    if (!e.is_finite() || &e > e.twin()) continue;
    const Eigen::Vector2d p0 = to_world(*e.vertex0()), p1 = to_world(*e.vertex1());
    if (!boundary.contains(p0) || !boundary.contains(p1)) continue;
    const Eigen::Vector2d si = site_point(e.cell()), sj = site_point(e.twin()->cell());
    const double local_radius = (0.5 * (p0 + p1) - si).norm();
    if ((si - sj).norm() < prune_ratio * local_radius) continue;
    edges.push_back({node_of(e.vertex0()), node_of(e.vertex1())});
  }

  MedialGraph graph;
  graph.ambient_dim = 2;
  if (nodes.empty()) return graph;

  // Merge vertices closer than a small fraction of the sampling step.
  const double merge_tol = 1e-3 * boundary.min_spacing();
  DisjointSets merged(nodes.size());
  {
    std::vector<std::size_t> order(nodes.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return nodes[a].x() < nodes[b].x(); });
    for (std::size_t i = 0; i < order.size(); ++i)
      for (std::size_t j = i + 1; j < order.size() && nodes[order[j]].x() - nodes[order[i]].x() <= merge_tol; ++j)
        if ((nodes[order[i]] - nodes[order[j]]).norm() <= merge_tol) merged.unite(order[i], order[j]);
  }
  std::vector<std::size_t> rep(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) rep[i] = merged.find(i);

  std::map<std::pair<std::size_t, std::size_t>, bool> unique_edges;
  for (const auto& e : edges) {
    std::size_t a = rep[e.a], b = rep[e.b];
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    unique_edges[{a, b}] = true;
  }

  // Largest connected piece by total length.
  DisjointSets comp(nodes.size());
  for (const auto& [ab, _] : unique_edges) comp.unite(ab.first, ab.second);
  std::map<std::size_t, double> comp_length;
  std::map<std::size_t, std::size_t> comp_nodes;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (rep[i] == i) ++comp_nodes[comp.find(i)];
  for (const auto& [ab, _] : unique_edges) comp_length[comp.find(ab.first)] += (nodes[ab.first] - nodes[ab.second]).norm();
  std::size_t best = comp.find(rep[0]);
  for (const auto& [c, count] : comp_nodes) {
    const double len = comp_length.count(c) ? comp_length[c] : 0.0;
    const double best_len = comp_length.count(best) ? comp_length[best] : 0.0;
    if (len > best_len || (len == best_len && count > comp_nodes[best])) best = c;
  }

  std::map<std::size_t, std::vector<std::size_t>> adj;
  for (const auto& [ab, _] : unique_edges) {
    if (comp.find(ab.first) != best) continue;
    adj[ab.first].push_back(ab.second);
    adj[ab.second].push_back(ab.first);
  }

  auto radials_at = [&](const Eigen::Vector2d& p, std::size_t count, double& radius) {
    const auto feet = boundary_foot_points(boundary, p);
    radius = feet.front().distance;
    std::vector<Eigen::VectorXd> us;
    for (std::size_t k = 0; k < std::min(count, feet.size()); ++k)
      us.push_back(Eigen::VectorXd(radius * (feet[k].point - p).normalized()));
    return us;
  };

  std::map<std::size_t, int> vertex_id;
  auto add_vertex = [&](std::size_t node, VertexKind kind) {
    auto [it, fresh] = vertex_id.emplace(node, static_cast<int>(graph.vertices.size()));
    if (fresh) graph.vertices.push_back({it->second, nodes[node], kind});
    return it->second;
  };

  if (adj.empty()) {
    // The skeleton degenerates to a point.
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (rep[i] == i && comp.find(i) == best) {
        add_vertex(i, VertexKind::Edge);
        break;
      }
    return graph;
  }

  for (const auto& [node, nbrs] : adj)
    if (nbrs.size() != 2) add_vertex(node, nbrs.size() == 1 ? VertexKind::Edge : VertexKind::Branch);

  std::map<std::pair<std::size_t, std::size_t>, bool> used;
  auto mark = [&](std::size_t a, std::size_t b) { used[{std::min(a, b), std::max(a, b)}] = true; };
  auto is_used = [&](std::size_t a, std::size_t b) { return used.count({std::min(a, b), std::max(a, b)}) > 0; };

  auto trace = [&](std::size_t start, std::size_t next) {
    std::vector<std::size_t> chain{start};
    std::size_t prev = start, cur = next;
    mark(prev, cur);
    while (true) {
      chain.push_back(cur);
      if (vertex_id.count(cur) && cur != start) break;
      if (cur == start) break;
      const auto& nb = adj[cur];
      std::size_t nxt = nb[0] == prev ? nb[1] : nb[0];
      if (is_used(cur, nxt)) break;
      mark(cur, nxt);
      prev = cur;
      cur = nxt;
    }
    return chain;
  };

  std::vector<std::vector<std::size_t>> chains;
  for (const auto& [node, nbrs] : adj) {
    if (!vertex_id.count(node)) continue;
    for (std::size_t nb : nbrs)
      if (!is_used(node, nb)) chains.push_back(trace(node, nb));
  }
  for (const auto& [node, nbrs] : adj) {
    if (is_used(node, nbrs[0])) continue;
    add_vertex(node, VertexKind::Regular);
    chains.push_back(trace(node, nbrs[0]));
  }

  for (const auto& chain : chains) {
    MedialCurve c;
    c.id = static_cast<int>(graph.curves.size());
    for (std::size_t k = 0; k < chain.size(); ++k) {
      const std::size_t node = chain[k];
      const bool end = k == 0 || k + 1 == chain.size();
      std::size_t want = 2;
      if (end && vertex_id.count(node)) {
        const std::size_t deg = adj[node].size();
        want = deg == 2 ? 2 : deg;
      }
      double radius = 0.0;
      auto us = radials_at(nodes[node], want, radius);
      if (end && vertex_id.count(node))
        c.polyline.push_back({vertex_id[node], nodes[node]});
      else
        c.polyline.push_back({std::nullopt, nodes[node]});
      c.radii.push_back(radius);
      c.radial_vectors.push_back(std::move(us));
    }
    graph.curves.push_back(std::move(c));
  }
  return graph;
}

}  // namespace medial
