#include "medial/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <numeric>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "medial/errors.hpp"
#include "medial/extraction.hpp"
#include "medial/medial_graph.hpp"
#include "medial/polynomial.hpp"
#include "medial/rigidity.hpp"
#include "medial/shape_operator.hpp"
#include "medial/svg.hpp"

namespace medial {

namespace {

using nlohmann::json;
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class Format { Human, Machine };

std::string num(double v, int digits = 17) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

/// Ordered key/value report. Machine mode prints key=value with 17
/// significant digits; human mode aligns keys and adds degrees to angles.
class Report {
 public:
  void number(const std::string& key, double v) { add(key, num(v), num(v, 10)); }
  void angle(const std::string& key, double v) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "%.10g rad (%.6f deg)", v, v * 180.0 / kPi);
    add(key, num(v), buf);
  }
  void projective(const std::string& key, const ProjectiveScalard& z) {
    if (z.is_infinite()) add(key, "inf", "inf");
    else number(key, z.value());
  }
  void numbers(const std::string& key, const std::vector<double>& vs) {
    std::string m, h;
    for (std::size_t i = 0; i < vs.size(); ++i) {
      m += (i ? "," : "") + num(vs[i]);
      h += (i ? ", " : "") + num(vs[i], 10);
    }
    add(key, m, h);
  }
  void text(const std::string& key, const std::string& v) { add(key, v, v); }
  void flag(const std::string& key, bool v) { add(key, v ? "true" : "false", v ? "yes" : "no"); }
  void integer(const std::string& key, long long v) { add(key, std::to_string(v), std::to_string(v)); }

  void print(std::ostream& out, Format format) const {
    std::size_t width = 0;
    for (const auto& e : entries_) width = std::max(width, e.key.size());
    for (const auto& e : entries_) {
      if (format == Format::Machine)
        out << e.key << '=' << e.machine << '\n';
      else
        out << e.key << std::string(width + 2 - e.key.size(), ' ') << e.human << '\n';
    }
  }

 private:
  struct Entry {
    std::string key, machine, human;
  };
  void add(const std::string& key, std::string machine, std::string human) {
    entries_.push_back({key, std::move(machine), std::move(human)});
  }
  std::vector<Entry> entries_;
};

std::vector<double> to_vector(const Eigen::MatrixXd& m) {
  std::vector<double> v;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) v.push_back(m(i, j));
  return v;
}

std::string lower(std::string_view s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

double parse_plain(const std::string& s, std::string_view original) {
  if (s.empty()) throw Error(ErrorCode::InvalidValue, "cannot parse number '" + std::string(original) + "'");
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(v))
    throw Error(ErrorCode::InvalidValue, "cannot parse number '" + std::string(original) + "'");
  return v;
}

json load_json(const std::string& path) {
  try {
    return json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SchemaError, path + ": malformed JSON: " + e.what());
  }
}

Eigen::VectorXd json_vector(const json& j, const std::string& what) {
  if (!j.is_array()) throw Error(ErrorCode::SchemaError, what + " must be an array of numbers");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw Error(ErrorCode::SchemaError, what + " must be an array of numbers");
    v[i] = j[i].get<double>();
  }
  return v;
}

std::vector<Eigen::Vector2d> json_planar_list(const json& j, const std::string& what) {
  if (!j.is_array()) throw Error(ErrorCode::SchemaError, what + " must be a list of [x, y]");
  std::vector<Eigen::Vector2d> out;
  for (const auto& p : j) {
    const Eigen::VectorXd v = json_vector(p, what);
    if (v.size() != 2) throw Error(ErrorCode::SchemaError, what + " entries must be [x, y]");
    out.emplace_back(v[0], v[1]);
  }
  return out;
}

// {"ambient_dim": n, "axis": [[...], ...] (n-2 vectors), "normals": [4 vectors]}
HyperplanePencild pencil_from_json(const json& doc) {
  if (!doc.contains("ambient_dim") || !doc["ambient_dim"].is_number_integer() || !doc.contains("normals"))
    throw Error(ErrorCode::SchemaError, "pencil needs 'ambient_dim' and 'normals'");
  const int n = doc["ambient_dim"].get<int>();
  Eigen::MatrixXd axis(n, std::max(0, n - 2));
  if (n > 2) {
    if (!doc.contains("axis") || !doc["axis"].is_array() || static_cast<int>(doc["axis"].size()) != n - 2)
      throw Error(ErrorCode::SchemaError, "pencil 'axis' must list n-2 vectors");
    for (int c = 0; c < n - 2; ++c) {
      const Eigen::VectorXd col = json_vector(doc["axis"][c], "axis vector");
      if (col.size() != n) throw Error(ErrorCode::SchemaError, "axis vectors must have n entries");
      axis.col(c) = col;
    }
  }
  if (!doc["normals"].is_array() || doc["normals"].size() != 4)
    throw Error(ErrorCode::SchemaError, "pencil 'normals' must list four vectors");
  std::array<Eigen::VectorXd, 4> normals;
  for (int i = 0; i < 4; ++i) normals[i] = json_vector(doc["normals"][i], "normal");
  return HyperplanePencild(n, axis, normals);
}

// {"tangent_rays": [[x, y], ...], "radial_vectors": [[x, y], ...]}
BranchConfig2D config_from_json(const json& doc) {
  if (!doc.contains("tangent_rays")) throw Error(ErrorCode::SchemaError, "configuration needs 'tangent_rays'");
  std::vector<Eigen::Vector2d> radials;
  if (doc.contains("radial_vectors")) radials = json_planar_list(doc["radial_vectors"], "radial_vectors");
  return BranchConfig2D(json_planar_list(doc["tangent_rays"], "tangent_rays"), radials);
}

int first_branch_vertex(const MedialGraph& g) {
  for (const auto& v : g.vertices)
    if (v.kind == VertexKind::Branch) return v.id;
  throw Error(ErrorCode::NotABranch, "graph has no branch vertex");
}

std::vector<double> parse_reals(const std::vector<std::string>& items) {
  std::vector<double> out;
  for (const auto& s : items) out.push_back(parse_real(s));
  return out;
}

AngleTriple triple_arg(const std::vector<std::string>& items) {
  if (items.size() != 3) throw Error(ErrorCode::InvalidValue, "expected three angles");
  const auto v = parse_reals(items);
  return angle_triple_from_input({v[0], v[1], v[2]});
}

AngleQuad quad_arg(const std::vector<std::string>& items) {
  if (items.size() != 4) throw Error(ErrorCode::InvalidValue, "expected four angles");
  const auto v = parse_reals(items);
  return angle_quad_from_input({v[0], v[1], v[2], v[3]});
}

void report_theta(Report& r, const std::array<double, 3>& t) {
  for (int i = 0; i < 3; ++i) r.angle("theta_" + std::to_string(i + 1), t[i]);
}

struct Settings {
  Format format = Format::Human;
  std::optional<double> tol;
  double step = kDefaultStep;
};

// ---- subcommands -----------------------------------------------------------

int cmd_cross_ratio(const std::vector<std::string>& values, bool slopes, const std::string& pencil_path,
                    const Settings& s, std::ostream& out) {
  Report r;
  double lambda;
  if (!pencil_path.empty()) {
    if (!values.empty()) throw Error(ErrorCode::InvalidValue, "give either four values or --pencil");
    lambda = hyperplane_cross_ratio(pencil_from_json(load_json(pencil_path)));
    r.text("input", "pencil");
    r.number("cross_ratio", lambda);
  } else {
    if (values.size() != 4) throw Error(ErrorCode::InvalidValue, "expected four values");
    std::array<ProjectiveScalard, 4> z;
    for (int i = 0; i < 4; ++i) z[i] = parse_projective(values[i]);
    if (slopes) {
      lambda = line_cross_ratio_projective(LinePencil2Dd::from_slopes(z));
      r.text("input", "slopes");
      r.number("cross_ratio", lambda);
    } else {
      const ProjectiveScalard c = cross_ratio(z[0], z[1], z[2], z[3]);
      r.text("input", "points");
      r.projective("cross_ratio", c);
      if (c.is_infinite()) {
        r.print(out, s.format);
        return kExitOk;
      }
      lambda = c.value();
    }
  }
  r.numbers("orbit", orbit(lambda).values);
  r.print(out, s.format);
  return kExitOk;
}

int cmd_orbit(const std::string& value, const Settings& s, std::ostream& out) {
  const double lambda = parse_real(value);
  const auto o = orbit(lambda);
  Report r;
  r.number("lambda", lambda);
  r.integer("size", static_cast<long long>(o.values.size()));
  r.numbers("orbit", o.values);
  r.print(out, s.format);
  return kExitOk;
}

int cmd_y_angles(const std::vector<std::string>& values, const Settings& s, std::ostream& out) {
  const AngleTriple theta = triple_arg(values);
  const auto alpha = solve_y_branch_angles(theta);
  double residual = 0.0;
  for (int i = 0; i < 3; ++i)
    residual = std::max(residual, std::abs(theta[i] - alpha[(i + 1) % 3] - alpha[(i + 2) % 3]));
  Report r;
  report_theta(r, theta.theta());
  for (int i = 0; i < 3; ++i) r.angle("alpha_" + std::to_string(i + 1), alpha[i]);
  r.number("residual", residual);
  r.print(out, s.format);
  return kExitOk;
}

int cmd_x_check(const std::vector<std::string>& values, const std::optional<std::string>& t_text, const Settings& s,
                std::ostream& out) {
  const AngleQuad theta = quad_arg(values);
  const auto compat = check_x_branch_compatibility(theta);
  Report r;
  for (int i = 0; i < 4; ++i) r.angle("theta_" + std::to_string(i + 1), theta[i]);
  r.flag("compatible", compat.compatible);
  r.number("residual", compat.residual);
  if (compat.compatible && t_text) {
    const double t = parse_real(*t_text);
    const auto member = x_branch_beta_family(theta, t);
    r.angle("t", t);
    for (int i = 0; i < 4; ++i) r.angle("beta_" + std::to_string(i + 1), member.beta[i]);
    double residual = 0.0;
    for (int i = 0; i < 4; ++i) residual = std::max(residual, std::abs(theta[i] - member.beta[i] - member.beta[(i + 1) % 4]));
    r.number("beta_residual", residual);
    r.flag("admissible", member.admissible);
  }
  r.print(out, s.format);
  return compat.compatible ? kExitOk : kExitObstruction;
}

int cmd_triple(const std::vector<std::string>& values, const Settings& s, std::ostream& out) {
  const AngleTriple theta = triple_arg(values);
  const auto t = triple_cross_ratio(theta);
  Report r;
  report_theta(r, theta.theta());
  for (int row = 0; row < 3; ++row) {
    const std::string k = std::to_string(row + 1);
    r.integer("sector_" + k, kTripleRowSectors[row]);
    r.number("lambda_" + k, t.lambdas[row]);
    r.numbers("orbit_" + k, t.orbits[row].values);
  }
  r.print(out, s.format);
  return kExitOk;
}

struct CompareInput {
  std::optional<BranchConfig2D> config;
  std::optional<HyperplanePencild> pencil;
};

CompareInput load_compare_input(const std::string& path, std::optional<int> vertex) {
  const json doc = load_json(path);
  if (doc.is_object() && doc.contains("vertices")) {
    const MedialGraph g = parse_medial_graph(doc.dump());
    return {branch_config_from_graph(g, vertex ? *vertex : first_branch_vertex(g)), std::nullopt};
  }
  if (doc.is_object() && doc.contains("normals")) return {std::nullopt, pencil_from_json(doc)};
  if (doc.is_object() && doc.contains("tangent_rays")) return {config_from_json(doc), std::nullopt};
  throw Error(ErrorCode::SchemaError, path + ": expected a medial graph, a pencil or a configuration");
}

int cmd_compare(const std::string& a_path, const std::string& b_path, std::optional<int> va, std::optional<int> vb,
                bool reflections, const Settings& s, std::ostream& out) {
  const double tol = s.tol.value_or(1e-9);
  const CompareInput a = load_compare_input(a_path, va);
  const CompareInput b = load_compare_input(b_path, vb);
  auto pencil_of = [](const CompareInput& in) {
    return in.pencil ? *in.pencil : tangent_pencil(*in.config);
  };
  const std::size_t ka = a.pencil ? 4 : a.config->sheet_count();
  const std::size_t kb = b.pencil ? 4 : b.config->sheet_count();

  Report r;
  r.number("tol", tol);
  if (ka != kb) {
    r.text("kind", "mismatch");
    r.integer("sheets_a", static_cast<long long>(ka));
    r.integer("sheets_b", static_cast<long long>(kb));
    r.flag("matched", false);
    r.number("obstruction", std::numeric_limits<double>::infinity());
    r.print(out, s.format);
    return kExitObstruction;
  }
  bool matched;
  if (ka == 3) {
    const AngleTriple ta = a.config->angle_triple(), tb = b.config->angle_triple();
    const auto cmp = compare_y_branch(ta, tb, tol, reflections);
    const auto la = triple_cross_ratio(ta), lb = triple_cross_ratio(tb);
    r.text("kind", "y-branch");
    report_theta(r, ta.theta());
    r.numbers("lambdas_a", {la.lambdas.begin(), la.lambdas.end()});
    r.numbers("lambdas_b", {lb.lambdas.begin(), lb.lambdas.end()});
    r.numbers("relabeling", {double(cmp.relabeling[0] + 1), double(cmp.relabeling[1] + 1), double(cmp.relabeling[2] + 1)});
    r.numbers("row_distances", {cmp.row_distances.begin(), cmp.row_distances.end()});
    r.number("obstruction", cmp.obstruction);
    r.flag("matched", cmp.matched);
    matched = cmp.matched;
  } else {
    const auto cmp = compare_four_sheet(pencil_of(a), pencil_of(b), tol);
    r.text("kind", "four-sheet");
    r.number("chi_a", cmp.a.cross_ratio);
    r.number("chi_b", cmp.b.cross_ratio);
    r.numbers("orbit_a", cmp.a.orbit.values);
    r.numbers("orbit_b", cmp.b.orbit.values);
    r.number("obstruction", cmp.distance);
    r.flag("matched", !cmp.obstructed);
    matched = !cmp.obstructed;
  }
  r.print(out, s.format);
  return matched ? kExitOk : kExitObstruction;
}

int cmd_rank(const std::vector<std::string>& values, int scan, int collisions, int stencil, double radius,
             int samples, std::uint64_t seed, const Settings& s, std::ostream& out) {
  Report r;
  if (scan > 0) {
    const auto entries = rank_scan(scan, s.step);
    long long evaluated = 0, rank2 = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& e : entries) {
      if (!e.evaluated) continue;
      ++evaluated;
      if (e.rank2) ++rank2;
      worst = std::min(worst, e.singular_values[1] / e.singular_values[0]);
    }
    r.integer("divisions", scan);
    r.integer("points", static_cast<long long>(entries.size()));
    r.integer("evaluated", evaluated);
    r.integer("rank2", rank2);
    r.number("min_ratio", worst);
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const auto& e = entries[i];
      r.numbers("point_" + std::to_string(i), {e.theta[0], e.theta[1], e.theta[2], e.evaluated ? 1.0 : 0.0,
                                                e.rank2 ? 1.0 : 0.0, e.singular_values[0], e.singular_values[1]});
    }
    r.print(out, s.format);
    return kExitOk;
  }
  if (collisions > 0) {
    const double min_distance = radius > 0.0 ? radius : 0.05;
    const auto c = collision_scan(static_cast<std::size_t>(collisions), min_distance, seed);
    r.integer("samples", static_cast<long long>(c.samples));
    r.integer("pairs", static_cast<long long>(c.pairs));
    r.number("min_param_distance", min_distance);
    r.number("min_value_distance", c.min_value_distance);
    r.numbers("closest_a", {c.closest_a[0], c.closest_a[1], c.closest_a[2]});
    r.numbers("closest_b", {c.closest_b[0], c.closest_b[1], c.closest_b[2]});
    r.print(out, s.format);
    return kExitOk;
  }

  const AngleTriple theta = triple_arg(values);
  if (stencil != 3 && stencil != 5) throw Error(ErrorCode::InvalidValue, "--stencil must be 3 or 5");
  const auto cert = triple_map_jacobian(theta, s.step, stencil == 3 ? Stencil::Central3 : Stencil::Central5);
  report_theta(r, theta.theta());
  r.number("step", s.step);
  r.numbers("jacobian", to_vector(cert.jacobian));
  r.numbers("singular_values", {cert.singular_values[0], cert.singular_values[1]});
  r.number("ratio", cert.singular_values[1] / cert.singular_values[0]);
  r.flag("rank2", cert.rank2);
  if (radius > 0.0) {
    const auto probe = local_uniqueness_probe(theta, radius, static_cast<std::size_t>(samples), seed);
    r.number("probe_radius", radius);
    r.integer("probe_evaluated", static_cast<long long>(probe.evaluated));
    r.number("probe_min_separation", probe.min_separation);
    r.flag("probe_injective", probe.injective);
  }
  r.print(out, s.format);
  return kExitOk;
}

int cmd_distort(const std::vector<std::string>& files, const std::optional<std::string>& alpha_text,
                std::vector<int> pins, const Settings& s, std::ostream& out) {
  std::optional<BranchConfig2D> source, target;
  Report r;
  if (alpha_text) {
    if (!files.empty()) throw Error(ErrorCode::InvalidValue, "give either two configuration files or --alpha");
    const double alpha = parse_real(*alpha_text);
    source = BranchConfig2D({{1, 0}, {0, 1}, {-1, 0}, {0, -1}});
    target = BranchConfig2D({{1, 0}, {std::cos(alpha), std::sin(alpha)}, {-1, 0}, {std::cos(alpha), -std::sin(alpha)}});
    r.angle("alpha", alpha);
  } else {
    if (files.size() != 2) throw Error(ErrorCode::InvalidValue, "expected source and target configuration files");
    source = config_from_json(load_json(files[0]));
    target = config_from_json(load_json(files[1]));
  }
  if (pins.empty()) pins = {0, 1};
  const auto rep = linear_distortion_analysis(*source, *target, pins);
  const std::size_t k = source->sheet_count();
  r.integer("sheet_count", static_cast<long long>(k));
  r.numbers("pinned", std::vector<double>(pins.begin(), pins.end()));
  r.numbers("linear_map", to_vector(rep.linear_map));
  r.integer("matched_curves", static_cast<long long>(rep.matched_curves));
  for (std::size_t i = 0; i < k; ++i) {
    const std::string idx = std::to_string(i + 1);
    r.numbers("image_" + idx, {rep.image_tangents[i].x(), rep.image_tangents[i].y()});
    r.numbers("target_" + idx, {target->tangent_rays()[i].x(), target->tangent_rays()[i].y()});
    r.angle("angle_error_" + idx, rep.angle_errors[i]);
    r.angle("line_angle_error_" + idx, rep.line_angle_errors[i]);
  }
  r.print(out, s.format);
  return rep.matched_curves == k ? kExitOk : kExitObstruction;
}

int cmd_shape_check(const std::vector<std::string>& files, const std::vector<std::string>& u_text, bool radial_line,
                    const Settings& s, std::ostream& out) {
  if (files.size() != 3) throw Error(ErrorCode::InvalidValue, "expected patch1, diffeo and patch2 files");
  const MedialSheetPatch p1 = parse_patch(read_text_file(files[0]));
  const DiffeoPatch phi = parse_diffeo(read_text_file(files[1]));
  const MedialSheetPatch p2 = parse_patch(read_text_file(files[2]));
  if (phi.ambient_dim != p1.ambient_dim || p2.ambient_dim != p1.ambient_dim)
    throw Error(ErrorCode::BasisMismatch, "patches and map live in different dimensions");

  Eigen::VectorXd u = 0.5 * (p1.domain_lo + p1.domain_hi);
  if (!u_text.empty()) {
    const auto v = parse_reals(u_text);
    if (static_cast<int>(v.size()) != p1.parameter_dim())
      throw Error(ErrorCode::BasisMismatch, "--u needs " + std::to_string(p1.parameter_dim()) + " values");
    u = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  }
  const Eigen::MatrixXd basis = coordinate_basis(p1, u);
  const double tol = s.tol.value_or(0.0);

  Report r;
  r.numbers("u", std::vector<double>(u.data(), u.data() + u.size()));
  bool pass;
  if (radial_line) {
    const auto res = radial_line_variant(p1, phi, p2, u, basis, tol);
    r.text("variant", "radial-line");
    r.number("sigma_tilde", res.sigma_tilde);
    r.number("residual", res.residual);
    r.number("tolerance", res.tolerance);
    r.flag("pass", res.pass);
    pass = res.pass;
  } else {
    const auto rep = check_compatibility(p1, phi, p2, u, basis, tol);
    r.text("variant", "radial-vector");
    r.numbers("u2", std::vector<double>(rep.u2.data(), rep.u2.data() + rep.u2.size()));
    r.numbers("s1", to_vector(rep.s1.matrix));
    r.numbers("s2", to_vector(rep.s2.matrix));
    r.numbers("q", to_vector(rep.q.matrix));
    r.number("sigma", rep.q.sigma);
    r.number("residual", rep.residual);
    r.number("tolerance", rep.tolerance);
    r.flag("pass", rep.pass);
    pass = rep.pass;
  }
  r.print(out, s.format);
  return pass ? kExitOk : kExitObstruction;
}

int cmd_extract(const std::string& path, double prune, const std::string& out_path, const Settings& s,
                std::ostream& out) {
  const BoundarySample boundary = parse_boundary(read_text_file(path));
  const MedialGraph g = extract_medial_2d(boundary, prune);
  if (out_path.empty()) {
    out << serialize_medial_graph(g);
    return kExitOk;
  }
  write_text_file(out_path, serialize_medial_graph(g));
  Report r;
  long long branches = 0, edges = 0;
  for (const auto& v : g.vertices) {
    if (v.kind == VertexKind::Branch) ++branches;
    if (v.kind == VertexKind::Edge) ++edges;
  }
  r.integer("boundary_points", static_cast<long long>(boundary.size()));
  r.number("prune_ratio", prune);
  r.integer("vertices", static_cast<long long>(g.vertices.size()));
  r.integer("branch_vertices", branches);
  r.integer("edge_vertices", edges);
  r.integer("curves", static_cast<long long>(g.curves.size()));
  r.number("smooth_violation", max_smooth_violation(g));
  for (const auto& v : g.vertices) {
    if (v.kind != VertexKind::Branch) continue;
    const auto config = branch_config_from_graph(g, v.id);
    const std::string key = "vertex_" + std::to_string(v.id);
    r.numbers(key + "_position", {v.position[0], v.position[1]});
    r.numbers(key + "_angles", config.angles());
    if (config.has_radials()) r.number(key + "_blum_violation", validate_blum_config(config, 0.0).max_violation);
  }
  r.text("output", out_path);
  r.print(out, s.format);
  return kExitOk;
}

int cmd_render(const std::string& input, const std::vector<std::string>& theta_text,
               const std::optional<std::string>& t_text, std::optional<int> vertex, const std::string& out_path,
               const Settings& s, std::ostream& out) {
  if (out_path.empty()) throw Error(ErrorCode::InvalidValue, "--out is required");
  Report r;
  if (!theta_text.empty()) {
    if (!input.empty()) throw Error(ErrorCode::InvalidValue, "give either an input file or --theta");
    if (theta_text.size() == 3) {
      emit_svg(make_y_branch_config(triple_arg(theta_text)), out_path);
      r.text("rendered", "y-branch");
    } else {
      const AngleQuad q = quad_arg(theta_text);
      if (!t_text) throw Error(ErrorCode::InvalidValue, "four angles need --t");
      emit_svg(make_x_branch_config(q, parse_real(*t_text)), out_path);
      r.text("rendered", "x-branch");
    }
  } else {
    if (input.empty()) throw Error(ErrorCode::InvalidValue, "nothing to render");
    const json doc = load_json(input);
    if (doc.is_object() && doc.contains("vertices")) {
      const MedialGraph g = parse_medial_graph(doc.dump());
      if (vertex) {
        emit_svg(branch_config_from_graph(g, *vertex), out_path);
        r.text("rendered", "branch-configuration");
      } else {
        emit_svg(g, out_path);
        r.text("rendered", "graph");
      }
    } else {
      emit_svg(config_from_json(doc), out_path);
      r.text("rendered", "configuration");
    }
  }
  r.text("output", out_path);
  r.print(out, s.format);
  return kExitOk;
}

}  // namespace

double parse_real(std::string_view text) {
  const std::string s = lower(text);
  const auto pi_at = s.find("pi");
  if (pi_at == std::string::npos) {
    const auto slash = s.find('/');
    if (slash == std::string::npos) return parse_plain(s, text);
    const double den = parse_plain(s.substr(slash + 1), text);
    if (den == 0.0) throw Error(ErrorCode::InvalidValue, "division by zero in '" + std::string(text) + "'");
    return parse_plain(s.substr(0, slash), text) / den;
  }
  std::string coef = s.substr(0, pi_at);
  if (!coef.empty() && coef.back() == '*') coef.pop_back();
  double c = 1.0;
  if (coef == "-") c = -1.0;
  else if (coef == "+" || coef.empty()) c = 1.0;
  else c = parse_plain(coef, text);
  const std::string rest = s.substr(pi_at + 2);
  double value = c * kPi;
  if (!rest.empty()) {
    if (rest[0] != '/') throw Error(ErrorCode::InvalidValue, "cannot parse number '" + std::string(text) + "'");
    const double den = parse_plain(rest.substr(1), text);
    if (den == 0.0) throw Error(ErrorCode::InvalidValue, "division by zero in '" + std::string(text) + "'");
    value /= den;
  }
  return value;
}

ProjectiveScalard parse_projective(std::string_view text) {
  const std::string s = lower(text);
  if (s == "inf" || s == "infinity" || s == "+inf" || s == "-inf") return ProjectiveScalard::infinity();
  return parse_real(text);
}

AngleTriple angle_triple_from_input(const std::array<double, 3>& t) {
  if (std::abs(t[0] + t[1] + t[2] - kTwoPi) <= kAngleSumTol) return AngleTriple(t[0], t[1], t[2]);
  return AngleTriple::from_rounded(t[0], t[1], t[2], kAngleInputSlack);
}

AngleQuad angle_quad_from_input(const std::array<double, 4>& t) {
  if (std::abs(t[0] + t[1] + t[2] + t[3] - kTwoPi) <= kAngleSumTol) return AngleQuad(t[0], t[1], t[2], t[3]);
  return AngleQuad::from_rounded(t[0], t[1], t[2], t[3], kAngleInputSlack);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cross-ratio and shape-operator invariants of medial axes", "medrig"};
  app.require_subcommand(1);
  app.fallthrough();

  Settings settings;
  std::string format = "human";
  double tol = 0.0;
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"human", "machine"}));
  auto* tol_opt = app.add_option("--tol", tol, "Matching tolerance (command-specific default)");
  app.add_option("--step", settings.step, "Finite-difference step")->capture_default_str();

  std::vector<std::string> values, files;
  std::string pencil, out_path;
  bool slopes = false, reflections = false, radial_line = false;
  std::string t_text, alpha_text, a_path, b_path, input;
  std::vector<std::string> u_text, theta_text;
  std::vector<int> pins;
  int vertex_a = -1, vertex_b = -1, vertex = -1, scan = 0, collisions = 0, stencil = 3, samples = 500;
  double radius = 0.0, prune = kDefaultPruneRatio;
  std::uint64_t seed = 1;

  auto* cr = app.add_subcommand("cross-ratio", "Cross ratio of four points, four slopes or a hyperplane pencil");
  cr->add_option("values", values, "z1 z2 z3 z4 (inf allowed)");
  cr->add_flag("--slopes", slopes, "Treat the values as slopes of lines through a point");
  cr->add_option("--pencil", pencil, "Hyperplane pencil JSON file");

  auto* orb = app.add_subcommand("orbit", "The six cross ratios of a reordered 4-tuple");
  orb->add_option("lambda", values, "Cross ratio")->required()->expected(1);

  auto* ya = app.add_subcommand("y-angles", "Radial angles at a Y-branch");
  ya->add_option("theta", values, "theta_1 theta_2 theta_3")->required()->expected(3);

  auto* xc = app.add_subcommand("x-check", "Compatibility and radial angles at an X-branch");
  xc->add_option("theta", values, "theta_1 .. theta_4")->required()->expected(4);
  auto* t_opt = xc->add_option("--t", t_text, "Free parameter of the radial family");

  auto* tr = app.add_subcommand("triple", "Triple of radial cross ratios at a Y-branch");
  tr->add_option("theta", values, "theta_1 theta_2 theta_3")->required()->expected(3);

  auto* cmp = app.add_subcommand("compare", "Obstruction report for two branch points");
  cmp->add_option("a", a_path, "Graph, pencil or configuration file")->required();
  cmp->add_option("b", b_path, "Graph, pencil or configuration file")->required();
  auto* va_opt = cmp->add_option("--vertex-a", vertex_a, "Branch vertex id in the first graph");
  auto* vb_opt = cmp->add_option("--vertex-b", vertex_b, "Branch vertex id in the second graph");
  cmp->add_flag("--reflections", reflections, "Also allow orientation-reversing relabelings");

  auto* rk = app.add_subcommand("rank", "Rank certificate of the triple cross-ratio map");
  rk->add_option("theta", values, "theta_1 theta_2 theta_3");
  rk->add_option("--scan", scan, "Grid scan with this many divisions per axis");
  rk->add_option("--collisions", collisions, "Random collision search with this many samples");
  rk->add_option("--stencil", stencil, "3- or 5-point central differences");
  rk->add_option("--radius", radius, "Probe radius (local uniqueness) or minimum separation (collisions)");
  rk->add_option("--samples", samples, "Probe samples");
  rk->add_option("--seed", seed, "Random seed");

  auto* ds = app.add_subcommand("distort", "Linear map pinned on two or three rays of a four-sheet branch");
  ds->add_option("files", files, "Source and target configuration files");
  auto* alpha_opt = ds->add_option("--alpha", alpha_text, "Built-in cross configuration with upper ray at alpha");
  ds->add_option("--pin", pins, "Pinned ray index (0-based), repeatable");

  auto* sc = app.add_subcommand("shape-check", "Compatibility of radial shape operators under a diffeomorphism");
  sc->add_option("files", files, "patch1 diffeo patch2")->required()->expected(3);
  sc->add_option("--u", u_text, "Parameter point on patch1 (default: domain centre)");
  sc->add_flag("--radial-line", radial_line, "Use the pushed radial field d phi(U)");

  auto* ex = app.add_subcommand("extract", "Medial graph of a sampled polygon");
  ex->add_option("boundary", input, "Boundary JSON file")->required();
  ex->add_option("--prune", prune, "Prune ratio in [0, 1)")->capture_default_str();
  ex->add_option("--out", out_path, "Write the graph here and print a summary");

  auto* rd = app.add_subcommand("render", "SVG of a configuration or graph");
  rd->add_option("input", input, "Graph or configuration file");
  rd->add_option("--theta", theta_text, "Angles of a synthetic Y- (3) or X-branch (4)");
  auto* rt_opt = rd->add_option("--t", t_text, "Radial family parameter for --theta with four angles");
  auto* v_opt = rd->add_option("--vertex", vertex, "Render the configuration at this branch vertex");
  rd->add_option("--out", out_path, "SVG path")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }

  settings.format = format == "machine" ? Format::Machine : Format::Human;
  if (tol_opt->count()) {
    if (!(tol > 0.0)) {
      err << "error: --tol must be positive\n";
      return kExitError;
    }
    settings.tol = tol;
  }

  try {
    if (cr->parsed()) return cmd_cross_ratio(values, slopes, pencil, settings, out);
    if (orb->parsed()) return cmd_orbit(values.at(0), settings, out);
    if (ya->parsed()) return cmd_y_angles(values, settings, out);
    if (xc->parsed()) return cmd_x_check(values, t_opt->count() ? std::optional(t_text) : std::nullopt, settings, out);
    if (tr->parsed()) return cmd_triple(values, settings, out);
    if (cmp->parsed())
      return cmd_compare(a_path, b_path, va_opt->count() ? std::optional(vertex_a) : std::nullopt,
                         vb_opt->count() ? std::optional(vertex_b) : std::nullopt, reflections, settings, out);
    if (rk->parsed()) return cmd_rank(values, scan, collisions, stencil, radius, samples, seed, settings, out);
    if (ds->parsed())
      return cmd_distort(files, alpha_opt->count() ? std::optional(alpha_text) : std::nullopt, pins, settings, out);
    if (sc->parsed()) return cmd_shape_check(files, u_text, radial_line, settings, out);
    if (ex->parsed()) return cmd_extract(input, prune, out_path, settings, out);
    if (rd->parsed())
      return cmd_render(input, theta_text, rt_opt->count() ? std::optional(t_text) : std::nullopt,
                        v_opt->count() ? std::optional(vertex) : std::nullopt, out_path, settings, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  err << "error: no subcommand\n";
  return kExitError;
}

}  // namespace medial
