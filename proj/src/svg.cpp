#include "medial/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>

#include "medial/errors.hpp"

namespace medial {

namespace {

constexpr double kSize = 400.0;
constexpr double kRayLength = 150.0;
constexpr double kRadialLength = 110.0;
constexpr double kArcRadius = 36.0;
constexpr double kLabelRadius = 58.0;

std::string fmt(const char* pattern, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, a);
  return buf;
}

// Fixed-precision coordinate; "-0.00" is folded to "0.00" for stable output.
std::string coord(double v) {
  std::string s = fmt("%.2f", v);
  return s == "-0.00" ? "0.00" : s;
}

std::string point(double x, double y) { return coord(x) + "," + coord(y); }

std::string header() {
  const std::string size = coord(kSize);
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + size + "\" height=\"" + size +
         "\" viewBox=\"0 0 " + size + " " + size + "\">\n"
         "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

}  // namespace

std::string render_svg(const BranchConfig2D& config) {
  const double c = kSize / 2;
  auto sx = [&](double x) { return c + x; };
  auto sy = [&](double y) { return c - y; };

  std::string out = header();
  out += "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" markerWidth=\"8\" "
         "markerHeight=\"8\" orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\" fill=\"#c0392b\"/></marker></defs>\n";

  const auto& rays = config.tangent_rays();
  for (const auto& r : rays)
    out += "<line x1=\"" + coord(c) + "\" y1=\"" + coord(c) + "\" x2=\"" + coord(sx(kRayLength * r.x())) +
           "\" y2=\"" + coord(sy(kRayLength * r.y())) + "\" stroke=\"black\" stroke-width=\"2\"/>\n";

  double longest = 0.0;
  for (const auto& u : config.radial_vectors()) longest = std::max(longest, u.norm());
  for (const auto& u : config.radial_vectors()) {
    const Eigen::Vector2d tip = kRadialLength * u / longest;
    out += "<path d=\"M" + point(c, c) + " L" + point(sx(tip.x()), sy(tip.y())) +
           "\" stroke=\"#c0392b\" stroke-width=\"1.5\" fill=\"none\" marker-end=\"url(#arrow)\"/>\n";
  }

  const auto& angles = config.angles();
  for (std::size_t i = 0; i < rays.size(); ++i) {
    const double a0 = std::atan2(rays[i].y(), rays[i].x());
    const double a1 = a0 + angles[i];
    const double mid = 0.5 * (a0 + a1);
    const int large = angles[i] > std::numbers::pi ? 1 : 0;
    out += "<path d=\"M" + point(sx(kArcRadius * std::cos(a0)), sy(kArcRadius * std::sin(a0))) + " A" +
           coord(kArcRadius) + "," + coord(kArcRadius) + " 0 " + std::to_string(large) + " 0 " +
           point(sx(kArcRadius * std::cos(a1)), sy(kArcRadius * std::sin(a1))) +
           "\" stroke=\"#2c3e50\" fill=\"none\"/>\n";
    out += "<text x=\"" + coord(sx(kLabelRadius * std::cos(mid))) + "\" y=\"" + coord(sy(kLabelRadius * std::sin(mid))) +
           "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">" + fmt("%.4f", angles[i]) +
           "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string render_svg(const MedialGraph& graph) {
  Eigen::Vector2d lo = Eigen::Vector2d::Constant(std::numeric_limits<double>::infinity());
  Eigen::Vector2d hi = -lo;
  auto grow = [&](const Eigen::VectorXd& p) {
    const Eigen::Vector2d q = p.head<2>();
    lo = lo.cwiseMin(q);
    hi = hi.cwiseMax(q);
  };
  for (const auto& v : graph.vertices) grow(v.position);
  for (const auto& cv : graph.curves)
    for (const auto& n : cv.polyline) grow(n.point);

  std::string out = header();
  if (!lo.allFinite()) return out + "</svg>\n";
  const double span = std::max((hi - lo).maxCoeff(), 1e-12);
  const double scale = 0.8 * kSize / span;
  const Eigen::Vector2d mid = 0.5 * (lo + hi);
  auto sx = [&](double x) { return kSize / 2 + scale * (x - mid.x()); };
  auto sy = [&](double y) { return kSize / 2 - scale * (y - mid.y()); };

  for (const auto& cv : graph.curves) {
    out += "<polyline points=\"";
    for (std::size_t k = 0; k < cv.polyline.size(); ++k) {
      if (k) out += ' ';
      out += point(sx(cv.polyline[k].point[0]), sy(cv.polyline[k].point[1]));
    }
    out += "\" stroke=\"black\" stroke-width=\"1.5\" fill=\"none\"/>\n";
  }
  for (const auto& v : graph.vertices) {
    const char* colour = v.kind == VertexKind::Branch ? "#c0392b" : v.kind == VertexKind::Edge ? "#2980b9" : "#7f8c8d";
    out += "<circle cx=\"" + coord(sx(v.position[0])) + "\" cy=\"" + coord(sy(v.position[1])) + "\" r=\"4\" fill=\"" +
           colour + "\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot write " + path);
  f << content;
  if (!f) throw Error(ErrorCode::IoError, "write failed for " + path);
}

void emit_svg(const BranchConfig2D& config, const std::string& path) { write_text_file(path, render_svg(config)); }

void emit_svg(const MedialGraph& graph, const std::string& path) { write_text_file(path, render_svg(graph)); }

}  // namespace medial
