#pragma once

// Second-order comparison of medial sheets: radial shape operators on
// parameterized sheets, the radial distortion operator of a diffeomorphism,
// the scale function, and the compatibility residual
//   S_{v'} = sigma (S_v + Q_v),   v' = d phi(v).
//
// Tangent bases are given in ambient coordinates as n x (n-1) matrices whose
// columns lie in the tangent space of the sheet.

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace medial {

using VectorField = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using JacobianField = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;
/// One symmetric n x n Hessian per output coordinate.
using HessianField = std::function<std::vector<Eigen::MatrixXd>(const Eigen::VectorXd&)>;

inline constexpr double kPatchStep = 1e-5;
inline constexpr double kHessianStep = 1e-4;
inline constexpr double kImmersionTol = 1e-8;
inline constexpr double kDiffeoDetTol = 1e-10;
inline constexpr double kLocateTol = 1e-10;
inline constexpr double kOnTargetTol = 1e-8;
inline constexpr double kRadialLineTol = 1e-6;
inline constexpr double kAnalyticTol = 1e-9;
inline constexpr double kNumericTol = 1e-4;

/// A medial sheet x(u) over a parameter box in (n-1)-space carrying a radial
/// field U(u). Jacobians are optional; missing ones are replaced by central
/// differences with step kPatchStep.
struct MedialSheetPatch {
  int ambient_dim = 2;
  Eigen::VectorXd domain_lo, domain_hi;
  VectorField position;
  VectorField radial;
  JacobianField position_jacobian;  // n x (n-1)
  JacobianField radial_jacobian;    // n x (n-1)

  int parameter_dim() const { return ambient_dim - 1; }
  bool analytic() const { return bool(position_jacobian) && bool(radial_jacobian); }
  bool contains(const Eigen::VectorXd& u, double slack = 0.0) const;

  Eigen::MatrixXd jacobian_at(const Eigen::VectorXd& u) const;
  Eigen::MatrixXd radial_jacobian_at(const Eigen::VectorXd& u) const;
};

struct DiffeoPatch {
  int ambient_dim = 2;
  VectorField map;
  JacobianField jacobian;
  HessianField hessian;

  bool analytic() const { return bool(jacobian) && bool(hessian); }
  Eigen::MatrixXd jacobian_at(const Eigen::VectorXd& x) const;
  std::vector<Eigen::MatrixXd> hessian_at(const Eigen::VectorXd& x) const;
};

struct RadialShapeMatrix {
  Eigen::MatrixXd basis;   // n x (n-1), ambient tangent vectors
  Eigen::MatrixXd matrix;  // (n-1) x (n-1), column i is S(v_i) in the basis
};

struct DistortionMatrix {
  Eigen::MatrixXd matrix;
  double sigma;
};

/// S(v) = -proj_U(d_v U_1): the derivative of the unit radial field along v,
/// projected onto the tangent space along the radial line, negated.
RadialShapeMatrix radial_shape_matrix(const MedialSheetPatch& patch, const Eigen::VectorXd& u,
                                      const Eigen::MatrixXd& basis);

/// Arc-length style basis: the columns of the position Jacobian.
Eigen::MatrixXd coordinate_basis(const MedialSheetPatch& patch, const Eigen::VectorXd& u);

/// Parameter of the point of `patch` closest to y: grid search followed by
/// damped Gauss-Newton. Throws PointNotOnTarget if y is farther than
/// kOnTargetTol from the sheet.
Eigen::VectorXd locate_on_patch(const MedialSheetPatch& patch, const Eigen::VectorXd& y);

enum class SigmaConvention {
  RadiusRatio,         // r(x) / r'(phi(x))
  InverseRadiusRatio,  // r'(phi(x)) / r(x); wrong on purpose, kept as a tripwire
};

double scale_sigma(const MedialSheetPatch& patch1, const DiffeoPatch& phi, const MedialSheetPatch& patch2,
                   const Eigen::VectorXd& u, SigmaConvention convention = SigmaConvention::RadiusRatio);

/// Q(v) = -d phi^{-1} proj_{U'}(d^2 phi(v, U_1)), in the basis v.
DistortionMatrix distortion_matrix(const MedialSheetPatch& patch1, const DiffeoPatch& phi,
                                   const MedialSheetPatch& patch2, const Eigen::VectorXd& u,
                                   const Eigen::MatrixXd& basis,
                                   SigmaConvention convention = SigmaConvention::RadiusRatio);

struct CompatibilityResult {
  double residual;  // max |S' - sigma (S + Q)|
  bool pass;
};

/// Compares S2 with sigma (S1 + Q). If `image_basis` is given, S2 must have
/// been computed in that basis.
CompatibilityResult verify_compatibility(const RadialShapeMatrix& s1, const DistortionMatrix& q,
                                         const RadialShapeMatrix& s2, double tol,
                                         const std::optional<Eigen::MatrixXd>& image_basis = std::nullopt);

struct CompatibilityReport {
  RadialShapeMatrix s1, s2;
  DistortionMatrix q;
  Eigen::VectorXd u2;
  double residual;
  double tolerance;
  bool pass;
};

/// Full pipeline at u: S1 in `basis`, S2 in d phi(basis) at the image point,
/// Q and sigma, then the residual. A non-positive `tol` selects kAnalyticTol
/// when every derivative is analytic and kNumericTol otherwise.
CompatibilityReport check_compatibility(const MedialSheetPatch& patch1, const DiffeoPatch& phi,
                                        const MedialSheetPatch& patch2, const Eigen::VectorXd& u,
                                        const Eigen::MatrixXd& basis, double tol = 0.0,
                                        SigmaConvention convention = SigmaConvention::RadiusRatio);

struct RadialLineResult {
  double residual;
  double sigma_tilde;  // |U| / |d phi(U)|
  double tolerance;
  bool pass;
};

/// Replaces the target radial field by the pushed field d phi(U), which only
/// has to span the same line as U', and re-runs the comparison with the
/// matching scale factor.
RadialLineResult radial_line_variant(const MedialSheetPatch& patch1, const DiffeoPatch& phi,
                                     const MedialSheetPatch& patch2, const Eigen::VectorXd& u,
                                     const Eigen::MatrixXd& basis, double tol = 0.0);

}  // namespace medial
