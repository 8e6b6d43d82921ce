#include "medial/polynomial.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "medial/errors.hpp"

namespace medial {

namespace {

using nlohmann::json;

// x^e with 0^0 = 1.
double ipow(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

// The monomial differentiated with respect to variables a and b (either may
// be -1 for no differentiation).
double differentiated_term(const Monomial& m, const Eigen::VectorXd& x, int a, int b) {
  std::vector<int> e = m.exponents;
  double c = m.coef;
  for (int var : {a, b}) {
    if (var < 0) continue;
    if (e[var] == 0) return 0.0;
    c *= e[var];
    --e[var];
  }
  for (std::size_t j = 0; j < e.size(); ++j) c *= ipow(x[j], e[j]);
  return c;
}

[[noreturn]] void schema(const std::string& what) { throw Error(ErrorCode::SchemaError, what); }

PolynomialMap parse_map(const json& coords, int variables, int outputs, int degree, const std::string& field) {
  if (!coords.is_array() || static_cast<int>(coords.size()) != outputs)
    schema("'" + field + "' must list " + std::to_string(outputs) + " coordinate polynomials");
  std::vector<Polynomial> comps;
  for (std::size_t k = 0; k < coords.size(); ++k) {
    const json& terms = coords[k];
    if (!terms.is_array()) schema("'" + field + "[" + std::to_string(k) + "]' must be an array of terms");
    std::vector<Monomial> monos;
    for (const json& t : terms) {
      if (!t.is_object() || !t.contains("coef") || !t.contains("exp") || !t["coef"].is_number() ||
          !t["exp"].is_array())
        schema("terms of '" + field + "' need a numeric 'coef' and an 'exp' array");
      Monomial m{t["coef"].get<double>(), {}};
      for (const json& e : t["exp"]) {
        if (!e.is_number_integer() || e.get<int>() < 0) schema("exponents must be non-negative integers");
        m.exponents.push_back(e.get<int>());
      }
      if (static_cast<int>(m.exponents.size()) != variables)
        schema("term of '" + field + "' has " + std::to_string(m.exponents.size()) + " exponents, expected " +
               std::to_string(variables));
      if (std::accumulate(m.exponents.begin(), m.exponents.end(), 0) > degree)
        schema("term of '" + field + "' exceeds the declared degree");
      monos.push_back(std::move(m));
    }
    comps.emplace_back(variables, std::move(monos));
  }
  return PolynomialMap(std::move(comps));
}

json parse_document(std::string_view text, const std::string& type) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    schema(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) schema("document must be a JSON object");
  if (!doc.contains("type") || doc["type"] != type) schema("expected \"type\": \"" + type + "\"");
  for (const char* key : {"ambient_dim", "degree"})
    if (!doc.contains(key) || !doc[key].is_number_integer()) schema(std::string("missing integer '") + key + "'");
  if (doc["ambient_dim"].get<int>() < 2) schema("'ambient_dim' must be at least 2");
  if (doc["degree"].get<int>() < 0) schema("'degree' must be non-negative");
  return doc;
}

}  // namespace

Polynomial::Polynomial(int variables, std::vector<Monomial> terms) : variables_(variables), terms_(std::move(terms)) {
  if (variables < 1) throw Error(ErrorCode::InvalidValue, "polynomial needs at least one variable");
  for (const auto& t : terms_) {
    if (static_cast<int>(t.exponents.size()) != variables)
      throw Error(ErrorCode::InvalidValue, "monomial exponent count differs from the variable count");
    for (int e : t.exponents)
      if (e < 0) throw Error(ErrorCode::InvalidValue, "negative exponent");
  }
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& t : terms_) d = std::max(d, std::accumulate(t.exponents.begin(), t.exponents.end(), 0));
  return d;
}

double Polynomial::operator()(const Eigen::VectorXd& x) const {
  double s = 0.0;
  for (const auto& t : terms_) s += differentiated_term(t, x, -1, -1);
  return s;
}

Eigen::VectorXd Polynomial::gradient(const Eigen::VectorXd& x) const {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(variables_);
  for (const auto& t : terms_)
    for (int a = 0; a < variables_; ++a) g[a] += differentiated_term(t, x, a, -1);
  return g;
}

Eigen::MatrixXd Polynomial::hessian(const Eigen::VectorXd& x) const {
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(variables_, variables_);
  for (const auto& t : terms_)
    for (int a = 0; a < variables_; ++a)
      for (int b = a; b < variables_; ++b) H(a, b) += differentiated_term(t, x, a, b);
  H.triangularView<Eigen::StrictlyLower>() = H.transpose().eval();
  return H;
}

PolynomialMap::PolynomialMap(std::vector<Polynomial> components) : components_(std::move(components)) {
  if (components_.empty()) throw Error(ErrorCode::InvalidValue, "polynomial map needs at least one component");
  for (const auto& c : components_)
    if (c.variables() != components_.front().variables())
      throw Error(ErrorCode::InvalidValue, "components disagree on the number of variables");
}

Eigen::VectorXd PolynomialMap::operator()(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y(outputs());
  for (int k = 0; k < outputs(); ++k) y[k] = components_[k](x);
  return y;
}

Eigen::MatrixXd PolynomialMap::jacobian(const Eigen::VectorXd& x) const {
  Eigen::MatrixXd J(outputs(), variables());
  for (int k = 0; k < outputs(); ++k) J.row(k) = components_[k].gradient(x).transpose();
  return J;
}

std::vector<Eigen::MatrixXd> PolynomialMap::hessians(const Eigen::VectorXd& x) const {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(components_.size());
  for (const auto& c : components_) out.push_back(c.hessian(x));
  return out;
}

MedialSheetPatch make_polynomial_patch(PolynomialMap position, PolynomialMap radial, Eigen::VectorXd domain_lo,
                                       Eigen::VectorXd domain_hi) {
  const int n = position.outputs();
  if (radial.outputs() != n || position.variables() != n - 1 || radial.variables() != n - 1)
    throw Error(ErrorCode::InvalidValue, "patch maps must go from (n-1)-space to n-space");
  if (domain_lo.size() != n - 1 || domain_hi.size() != n - 1)
    throw Error(ErrorCode::InvalidValue, "domain box has the wrong dimension");
  auto pos = std::make_shared<const PolynomialMap>(std::move(position));
  auto rad = std::make_shared<const PolynomialMap>(std::move(radial));
  MedialSheetPatch patch;
  patch.ambient_dim = n;
  patch.domain_lo = std::move(domain_lo);
  patch.domain_hi = std::move(domain_hi);
  patch.position = [pos](const Eigen::VectorXd& u) { return (*pos)(u); };
  patch.radial = [rad](const Eigen::VectorXd& u) { return (*rad)(u); };
  patch.position_jacobian = [pos](const Eigen::VectorXd& u) { return pos->jacobian(u); };
  patch.radial_jacobian = [rad](const Eigen::VectorXd& u) { return rad->jacobian(u); };
  return patch;
}

DiffeoPatch make_polynomial_diffeo(PolynomialMap map) {
  if (map.outputs() != map.variables()) throw Error(ErrorCode::InvalidValue, "diffeomorphism must be square");
  auto m = std::make_shared<const PolynomialMap>(std::move(map));
  DiffeoPatch phi;
  phi.ambient_dim = m->outputs();
  phi.map = [m](const Eigen::VectorXd& x) { return (*m)(x); };
  phi.jacobian = [m](const Eigen::VectorXd& x) { return m->jacobian(x); };
  phi.hessian = [m](const Eigen::VectorXd& x) { return m->hessians(x); };
  return phi;
}

MedialSheetPatch parse_patch(std::string_view json_text) {
  const json doc = parse_document(json_text, "medial_patch");
  const int n = doc["ambient_dim"].get<int>();
  const int degree = doc["degree"].get<int>();
  if (!doc.contains("domain") || !doc["domain"].is_array() || static_cast<int>(doc["domain"].size()) != n - 1)
    schema("'domain' must list " + std::to_string(n - 1) + " intervals");
  Eigen::VectorXd lo(n - 1), hi(n - 1);
  for (int i = 0; i < n - 1; ++i) {
    const json& iv = doc["domain"][i];
    if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number())
      schema("domain intervals must be [lo, hi]");
    lo[i] = iv[0].get<double>();
    hi[i] = iv[1].get<double>();
    if (!(lo[i] < hi[i])) schema("domain interval " + std::to_string(i) + " is empty");
  }
  for (const char* key : {"position", "radial"})
    if (!doc.contains(key)) schema(std::string("missing '") + key + "'");
  return make_polynomial_patch(parse_map(doc["position"], n - 1, n, degree, "position"),
                               parse_map(doc["radial"], n - 1, n, degree, "radial"), lo, hi);
}

DiffeoPatch parse_diffeo(std::string_view json_text) {
  const json doc = parse_document(json_text, "diffeo");
  const int n = doc["ambient_dim"].get<int>();
  if (!doc.contains("map")) schema("missing 'map'");
  return make_polynomial_diffeo(parse_map(doc["map"], n, n, doc["degree"].get<int>(), "map"));
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace medial
