#pragma once

// Multivariate polynomials with exact gradients and Hessians, used to load
// medial sheet patches and diffeomorphisms from coefficient files.

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "medial/shape_operator.hpp"

namespace medial {

struct Monomial {
  double coef;
  std::vector<int> exponents;
};

class Polynomial {
 public:
  Polynomial(int variables, std::vector<Monomial> terms);

  int variables() const { return variables_; }
  int degree() const;
  const std::vector<Monomial>& terms() const { return terms_; }

  double operator()(const Eigen::VectorXd& x) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const;

 private:
  int variables_;
  std::vector<Monomial> terms_;
};

/// A polynomial map R^m -> R^k, one polynomial per output coordinate.
class PolynomialMap {
 public:
  explicit PolynomialMap(std::vector<Polynomial> components);

  int variables() const { return components_.front().variables(); }
  int outputs() const { return static_cast<int>(components_.size()); }
  const std::vector<Polynomial>& components() const { return components_; }

  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const;  // k x m
  std::vector<Eigen::MatrixXd> hessians(const Eigen::VectorXd& x) const;

 private:
  std::vector<Polynomial> components_;
};

/// Patch with analytic derivatives from polynomial position and radial maps.
MedialSheetPatch make_polynomial_patch(PolynomialMap position, PolynomialMap radial, Eigen::VectorXd domain_lo,
                                       Eigen::VectorXd domain_hi);

DiffeoPatch make_polynomial_diffeo(PolynomialMap map);

// File format (JSON):
//   {"type": "medial_patch", "ambient_dim": n, "degree": d,
//    "domain": [[lo, hi], ...],                       (n-1 intervals)
//    "position": [[{"coef": c, "exp": [e1, ...]}, ...], ...],  (n coordinates)
//    "radial":   [...]}
//   {"type": "diffeo", "ambient_dim": n, "degree": d, "map": [...]}
// Every term must have total degree <= d.
MedialSheetPatch parse_patch(std::string_view json_text);
DiffeoPatch parse_diffeo(std::string_view json_text);

std::string read_text_file(const std::string& path);

}  // namespace medial
