#include "medial/shape_operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "medial/errors.hpp"

namespace medial {

namespace {

Eigen::MatrixXd central_jacobian(const VectorField& f, const Eigen::VectorXd& u, double h) {
  const Eigen::VectorXd f0 = f(u);
  Eigen::MatrixXd J(f0.size(), u.size());
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    Eigen::VectorXd up = u, um = u;
    up[j] += h;
    um[j] -= h;
    J.col(j) = (f(up) - f(um)) / (2.0 * h);
  }
  return J;
}

double min_singular_value(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

double relative_conditioning(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  return s[0] > 0.0 ? s(s.size() - 1) / s[0] : 0.0;
}

void check_patch_point(const MedialSheetPatch& patch, const Eigen::VectorXd& u) {
  if (patch.ambient_dim < 2) throw Error(ErrorCode::InvalidValue, "ambient dimension must be at least 2");
  if (u.size() != patch.parameter_dim())
    throw Error(ErrorCode::BasisMismatch, "parameter point has the wrong dimension");
  if (!patch.contains(u, 1e-12)) throw Error(ErrorCode::OutOfRange, "parameter point outside the patch domain");
}

// Parameter coordinates (in the columns of Jx) of the projection of each
// column of W onto span(Jx) along the line of U.
Eigen::MatrixXd project_along(const Eigen::MatrixXd& Jx, const Eigen::VectorXd& U, const Eigen::MatrixXd& W) {
  const Eigen::Index n = Jx.rows();
  Eigen::MatrixXd M(n, n);
  M << Jx, U;
  if (relative_conditioning(M) < 1e-10)
    throw Error(ErrorCode::ProjectionSingular, "radial vector lies in the tangent space");
  const Eigen::MatrixXd coeffs = M.partialPivLu().solve(W);
  return coeffs.topRows(n - 1);
}

// Coordinates of the columns of `vectors` in `basis` (least squares).
Eigen::MatrixXd in_basis(const Eigen::MatrixXd& basis, const Eigen::MatrixXd& vectors) {
  return basis.colPivHouseholderQr().solve(vectors);
}

void check_basis(const MedialSheetPatch& patch, const Eigen::MatrixXd& Jx, const Eigen::MatrixXd& basis,
                 Eigen::MatrixXd& param_coords) {
  const int n = patch.ambient_dim;
  if (basis.rows() != n || basis.cols() != n - 1)
    throw Error(ErrorCode::BasisMismatch, "tangent basis must be n x (n-1)");
  param_coords = Jx.colPivHouseholderQr().solve(basis);
  const double miss = (Jx * param_coords - basis).norm();
  if (miss > 1e-8 * (1.0 + basis.norm()))
    throw Error(ErrorCode::InvalidValue, "basis vectors are not tangent to the sheet");
  if (relative_conditioning(param_coords) < 1e-12)
    throw Error(ErrorCode::InvalidValue, "basis vectors are linearly dependent");
}

Eigen::MatrixXd unit_radial_jacobian(const Eigen::VectorXd& U, const Eigen::MatrixXd& dU) {
  const double r = U.norm();
  const Eigen::VectorXd U1 = U / r;
  const Eigen::MatrixXd P = Eigen::MatrixXd::Identity(U.size(), U.size()) - U1 * U1.transpose();
  return P * dU / r;
}

Eigen::VectorXd radial_at(const MedialSheetPatch& patch, const Eigen::VectorXd& u) {
  const Eigen::VectorXd U = patch.radial(u);
  if (U.size() != patch.ambient_dim) throw Error(ErrorCode::BasisMismatch, "radial vector has the wrong dimension");
  if (!(U.norm() > 0.0)) throw Error(ErrorCode::InvalidValue, "radius must be positive");
  return U;
}

Eigen::MatrixXd immersion_jacobian(const MedialSheetPatch& patch, const Eigen::VectorXd& u) {
  const Eigen::MatrixXd Jx = patch.jacobian_at(u);
  if (Jx.rows() != patch.ambient_dim || Jx.cols() != patch.parameter_dim())
    throw Error(ErrorCode::BasisMismatch, "position Jacobian has the wrong shape");
  if (min_singular_value(Jx) <= kImmersionTol) throw Error(ErrorCode::NotImmersion, "sheet is not immersed here");
  return Jx;
}

Eigen::MatrixXd checked_diffeo_jacobian(const DiffeoPatch& phi, const Eigen::VectorXd& x) {
  const Eigen::MatrixXd D = phi.jacobian_at(x);
  if (D.rows() != x.size() || D.cols() != x.size())
    throw Error(ErrorCode::BasisMismatch, "map Jacobian has the wrong shape");
  if (!(std::abs(D.determinant()) > kDiffeoDetTol))
    throw Error(ErrorCode::NotImmersion, "derivative of the map is singular");
  return D;
}

// Q in `basis`, given the target tangent space and target radial line.
Eigen::MatrixXd distortion_core(const DiffeoPatch& phi, const Eigen::VectorXd& x, const Eigen::VectorXd& U1,
                                const Eigen::MatrixXd& target_tangent, const Eigen::VectorXd& target_radial,
                                const Eigen::MatrixXd& basis) {
  const Eigen::MatrixXd D = checked_diffeo_jacobian(phi, x);
  const std::vector<Eigen::MatrixXd> H = phi.hessian_at(x);
  const Eigen::Index n = x.size();
  if (static_cast<Eigen::Index>(H.size()) != n) throw Error(ErrorCode::BasisMismatch, "need one Hessian per output");

  Eigen::MatrixXd second(n, basis.cols());
  for (Eigen::Index i = 0; i < basis.cols(); ++i)
    for (Eigen::Index k = 0; k < n; ++k) second(k, i) = basis.col(i).dot(H[k] * U1);

  const Eigen::MatrixXd a = project_along(target_tangent, target_radial, second);
  const Eigen::MatrixXd pulled = -D.partialPivLu().solve(target_tangent * a);
  return in_basis(basis, pulled);
}

double radius_ratio(double r1, double r2, SigmaConvention convention) {
  return convention == SigmaConvention::RadiusRatio ? r1 / r2 : r2 / r1;
}

}  // namespace

bool MedialSheetPatch::contains(const Eigen::VectorXd& u, double slack) const {
  if (u.size() != domain_lo.size() || u.size() != domain_hi.size()) return false;
  for (Eigen::Index i = 0; i < u.size(); ++i)
    if (!(u[i] >= domain_lo[i] - slack && u[i] <= domain_hi[i] + slack)) return false;
  return true;
}

Eigen::MatrixXd MedialSheetPatch::jacobian_at(const Eigen::VectorXd& u) const {
  return position_jacobian ? position_jacobian(u) : central_jacobian(position, u, kPatchStep);
}

Eigen::MatrixXd MedialSheetPatch::radial_jacobian_at(const Eigen::VectorXd& u) const {
  return radial_jacobian ? radial_jacobian(u) : central_jacobian(radial, u, kPatchStep);
}

Eigen::MatrixXd DiffeoPatch::jacobian_at(const Eigen::VectorXd& x) const {
  return jacobian ? jacobian(x) : central_jacobian(map, x, kPatchStep);
}

std::vector<Eigen::MatrixXd> DiffeoPatch::hessian_at(const Eigen::VectorXd& x) const {
  if (hessian) return hessian(x);
  const Eigen::Index n = x.size();
  const double h = kHessianStep;
  std::vector<Eigen::MatrixXd> H(n, Eigen::MatrixXd::Zero(n, n));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      auto at = [&](double si, double sj) {
        Eigen::VectorXd y = x;
        y[i] += si * h;
        y[j] += sj * h;
        return map(y);
      };
      const Eigen::VectorXd d = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * h * h);
      for (Eigen::Index k = 0; k < n; ++k) H[k](i, j) = d[k];
    }
  }
  // The mixed stencil is symmetric in (i, j); only the upper half was filled.
  for (auto& m : H) m.triangularView<Eigen::StrictlyLower>() = m.transpose().eval();
  return H;
}

Eigen::MatrixXd coordinate_basis(const MedialSheetPatch& patch, const Eigen::VectorXd& u) {
  check_patch_point(patch, u);
  return immersion_jacobian(patch, u);
}

RadialShapeMatrix radial_shape_matrix(const MedialSheetPatch& patch, const Eigen::VectorXd& u,
                                      const Eigen::MatrixXd& basis) {
  check_patch_point(patch, u);
  const Eigen::MatrixXd Jx = immersion_jacobian(patch, u);
  const Eigen::VectorXd U = radial_at(patch, u);
  Eigen::MatrixXd C;
  check_basis(patch, Jx, basis, C);

  const Eigen::MatrixXd dU1 = unit_radial_jacobian(U, patch.radial_jacobian_at(u));
  const Eigen::MatrixXd A = project_along(Jx, U, dU1 * C);
  return {basis, -C.partialPivLu().solve(A)};
}

Eigen::VectorXd locate_on_patch(const MedialSheetPatch& patch, const Eigen::VectorXd& y) {
  const int d = patch.parameter_dim();
  if (y.size() != patch.ambient_dim) throw Error(ErrorCode::BasisMismatch, "point has the wrong dimension");
  for (int i = 0; i < d; ++i)
    if (!std::isfinite(patch.domain_lo[i]) || !std::isfinite(patch.domain_hi[i]) ||
        !(patch.domain_lo[i] <= patch.domain_hi[i]))
      throw Error(ErrorCode::InvalidValue, "patch domain must be a finite box");

  const int per_axis = std::clamp(static_cast<int>(std::pow(4096.0, 1.0 / d)), 2, 33);
  Eigen::VectorXd best = 0.5 * (patch.domain_lo + patch.domain_hi);
  double best_dist = (patch.position(best) - y).norm();
  std::vector<int> idx(d, 0);
  for (;;) {
    Eigen::VectorXd u(d);
    for (int i = 0; i < d; ++i)
      u[i] = patch.domain_lo[i] + (patch.domain_hi[i] - patch.domain_lo[i]) * idx[i] / (per_axis - 1);
    const double dist = (patch.position(u) - y).norm();
    if (dist < best_dist) best_dist = dist, best = u;
    int k = 0;
    while (k < d && ++idx[k] == per_axis) idx[k++] = 0;
    if (k == d) break;
  }

  auto clamp_box = [&](Eigen::VectorXd u) {
    return u.cwiseMax(patch.domain_lo).cwiseMin(patch.domain_hi).eval();
  };
  Eigen::VectorXd u = best;
  double dist = best_dist;
  for (int iter = 0; iter < 50 && dist > 0.0; ++iter) {
    const Eigen::VectorXd residual = y - patch.position(u);
    const Eigen::VectorXd delta = patch.jacobian_at(u).completeOrthogonalDecomposition().solve(residual);
    double alpha = 1.0;
    Eigen::VectorXd trial = clamp_box(u + delta);
    double trial_dist = (patch.position(trial) - y).norm();
    while (trial_dist > dist && alpha > 1e-4) {
      alpha *= 0.5;
      trial = clamp_box(u + alpha * delta);
      trial_dist = (patch.position(trial) - y).norm();
    }
    if (trial_dist > dist) break;
    const double moved = (trial - u).norm();
    u = trial;
    dist = trial_dist;
    if (moved < kLocateTol * (1.0 + u.norm())) break;
  }
  if (dist > kOnTargetTol) throw Error(ErrorCode::PointNotOnTarget, "image point is not on the target sheet");
  return u;
}

double scale_sigma(const MedialSheetPatch& patch1, const DiffeoPatch& phi, const MedialSheetPatch& patch2,
                   const Eigen::VectorXd& u, SigmaConvention convention) {
  check_patch_point(patch1, u);
  const Eigen::VectorXd u2 = locate_on_patch(patch2, phi.map(patch1.position(u)));
  return radius_ratio(radial_at(patch1, u).norm(), radial_at(patch2, u2).norm(), convention);
}

DistortionMatrix distortion_matrix(const MedialSheetPatch& patch1, const DiffeoPatch& phi,
                                   const MedialSheetPatch& patch2, const Eigen::VectorXd& u,
                                   const Eigen::MatrixXd& basis, SigmaConvention convention) {
  check_patch_point(patch1, u);
  const Eigen::MatrixXd Jx = immersion_jacobian(patch1, u);
  Eigen::MatrixXd C;
  check_basis(patch1, Jx, basis, C);
  const Eigen::VectorXd x = patch1.position(u);
  const Eigen::VectorXd U = radial_at(patch1, u);
  const Eigen::VectorXd u2 = locate_on_patch(patch2, phi.map(x));
  const Eigen::VectorXd U2 = radial_at(patch2, u2);
  const Eigen::MatrixXd J2 = immersion_jacobian(patch2, u2);
  return {distortion_core(phi, x, U / U.norm(), J2, U2, basis), radius_ratio(U.norm(), U2.norm(), convention)};
}

CompatibilityResult verify_compatibility(const RadialShapeMatrix& s1, const DistortionMatrix& q,
                                         const RadialShapeMatrix& s2, double tol,
                                         const std::optional<Eigen::MatrixXd>& image_basis) {
  const auto rows = s1.matrix.rows(), cols = s1.matrix.cols();
  if (rows != cols || q.matrix.rows() != rows || q.matrix.cols() != cols || s2.matrix.rows() != rows ||
      s2.matrix.cols() != cols)
    throw Error(ErrorCode::BasisMismatch, "shape and distortion matrices have different sizes");
  if (image_basis) {
    if (image_basis->rows() != s2.basis.rows() || image_basis->cols() != s2.basis.cols() ||
        (*image_basis - s2.basis).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + image_basis->cwiseAbs().maxCoeff()))
      throw Error(ErrorCode::BasisMismatch, "target shape matrix is not in the image basis");
  }
  if (!(q.sigma > 0.0)) throw Error(ErrorCode::InvalidValue, "scale must be positive");
  const double residual = (s2.matrix - q.sigma * (s1.matrix + q.matrix)).cwiseAbs().maxCoeff();
  return {residual, residual < tol};
}

CompatibilityReport check_compatibility(const MedialSheetPatch& patch1, const DiffeoPatch& phi,
                                        const MedialSheetPatch& patch2, const Eigen::VectorXd& u,
                                        const Eigen::MatrixXd& basis, double tol, SigmaConvention convention) {
  if (!(tol > 0.0)) tol = patch1.analytic() && patch2.analytic() && phi.analytic() ? kAnalyticTol : kNumericTol;
  const RadialShapeMatrix s1 = radial_shape_matrix(patch1, u, basis);
  const Eigen::VectorXd x = patch1.position(u);
  const Eigen::MatrixXd image_basis = checked_diffeo_jacobian(phi, x) * basis;
  const Eigen::VectorXd u2 = locate_on_patch(patch2, phi.map(x));
  const RadialShapeMatrix s2 = radial_shape_matrix(patch2, u2, image_basis);
  const DistortionMatrix q = distortion_matrix(patch1, phi, patch2, u, basis, convention);
  const CompatibilityResult r = verify_compatibility(s1, q, s2, tol, image_basis);
  return {s1, s2, q, u2, r.residual, tol, r.pass};
}

RadialLineResult radial_line_variant(const MedialSheetPatch& patch1, const DiffeoPatch& phi,
                                     const MedialSheetPatch& patch2, const Eigen::VectorXd& u,
                                     const Eigen::MatrixXd& basis, double tol) {
  if (!(tol > 0.0)) tol = patch1.analytic() && phi.analytic() ? kAnalyticTol : kNumericTol;
  check_patch_point(patch1, u);
  const Eigen::VectorXd x = patch1.position(u);
  const Eigen::VectorXd U = radial_at(patch1, u);
  const Eigen::MatrixXd D = checked_diffeo_jacobian(phi, x);
  const Eigen::VectorXd pushed = D * U;

  const Eigen::VectorXd U2 = radial_at(patch2, locate_on_patch(patch2, phi.map(x)));
  const Eigen::VectorXd a = U2.normalized();
  const double sine = (pushed - pushed.dot(a) * a).norm() / pushed.norm();
  if (!(std::asin(std::min(1.0, sine)) <= kRadialLineTol))
    throw Error(ErrorCode::RadialLineNotPreserved, "d phi(U) leaves the target radial line");

  // Target sheet parameterized through patch1, carrying the pushed field.
  MedialSheetPatch image;
  image.ambient_dim = patch1.ambient_dim;
  image.domain_lo = patch1.domain_lo;
  image.domain_hi = patch1.domain_hi;
  image.position = [&](const Eigen::VectorXd& v) { return Eigen::VectorXd(phi.map(patch1.position(v))); };
  image.radial = [&](const Eigen::VectorXd& v) {
    return Eigen::VectorXd(phi.jacobian_at(patch1.position(v)) * patch1.radial(v));
  };
  if (patch1.analytic() && phi.analytic()) {
    image.position_jacobian = [&](const Eigen::VectorXd& v) {
      return Eigen::MatrixXd(phi.jacobian(patch1.position(v)) * patch1.position_jacobian(v));
    };
    image.radial_jacobian = [&](const Eigen::VectorXd& v) {
      const Eigen::VectorXd y = patch1.position(v);
      const Eigen::VectorXd Uv = patch1.radial(v);
      const Eigen::MatrixXd Jv = patch1.position_jacobian(v);
      const auto H = phi.hessian(y);
      Eigen::MatrixXd out = phi.jacobian(y) * patch1.radial_jacobian(v);
      for (Eigen::Index k = 0; k < out.rows(); ++k) out.row(k) += (H[k] * Uv).transpose() * Jv;
      return out;
    };
  }

  const Eigen::MatrixXd image_basis = D * basis;
  const RadialShapeMatrix s1 = radial_shape_matrix(patch1, u, basis);
  const RadialShapeMatrix s2 = radial_shape_matrix(image, u, image_basis);
  const Eigen::MatrixXd Jimage = immersion_jacobian(image, u);
  const double sigma_tilde = U.norm() / pushed.norm();
  const DistortionMatrix q{distortion_core(phi, x, U / U.norm(), Jimage, pushed, basis), sigma_tilde};
  const CompatibilityResult r = verify_compatibility(s1, q, s2, tol, image_basis);
  return {r.residual, sigma_tilde, tol, r.pass};
}

}  // namespace medial
