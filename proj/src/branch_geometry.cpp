#include "medial/branch_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "medial/errors.hpp"
#include "medial/projective.hpp"

namespace medial {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kRayTieTol = 1e-9;
constexpr double kSheetTol = 1e-9;

template <std::size_t N>
void check_angles(const std::array<double, N>& theta) {
  for (std::size_t i = 0; i < N; ++i) {
    if (!std::isfinite(theta[i]) || !(theta[i] > 0.0) || !(theta[i] < kPi))
      throw Error(ErrorCode::OutOfRange, "angle " + std::to_string(i + 1) + " is outside (0, pi)");
  }
  const double sum = std::accumulate(theta.begin(), theta.end(), 0.0);
  if (std::abs(sum - kTwoPi) > kAngleSumTol)
    throw Error(ErrorCode::NotAllowable, "angles sum to " + std::to_string(sum) + ", not 2 pi");
}

template <std::size_t N>
std::array<double, N> spread_excess(std::array<double, N> theta, double slack) {
  const double sum = std::accumulate(theta.begin(), theta.end(), 0.0);
  const double excess = sum - kTwoPi;
  if (std::abs(excess) > slack)
    throw Error(ErrorCode::NotAllowable, "angles sum to " + std::to_string(sum) + ", not 2 pi");
  for (auto& t : theta) t -= excess / static_cast<double>(N);
  // Close the last rounding gap on the final entry.
  double head = 0.0;
  for (std::size_t i = 0; i + 1 < N; ++i) head += theta[i];
  theta[N - 1] = kTwoPi - head;
  return theta;
}

}  // namespace

AngleTriple::AngleTriple(double t1, double t2, double t3) : theta_{t1, t2, t3} { check_angles(theta_); }

AngleTriple AngleTriple::from_rounded(double t1, double t2, double t3, double slack) {
  const auto t = spread_excess(std::array<double, 3>{t1, t2, t3}, slack);
  return AngleTriple(t[0], t[1], t[2]);
}

AngleTriple AngleTriple::rotated(int shift) const {
  const int s = ((shift % 3) + 3) % 3;
  return AngleTriple(theta_[s], theta_[(s + 1) % 3], theta_[(s + 2) % 3]);
}

AngleQuad::AngleQuad(double t1, double t2, double t3, double t4) : theta_{t1, t2, t3, t4} { check_angles(theta_); }

AngleQuad AngleQuad::from_rounded(double t1, double t2, double t3, double t4, double slack) {
  const auto t = spread_excess(std::array<double, 4>{t1, t2, t3, t4}, slack);
  return AngleQuad(t[0], t[1], t[2], t[3]);
}

std::array<double, 3> solve_y_branch_angles(const AngleTriple& theta) {
  return {kPi - theta[0], kPi - theta[1], kPi - theta[2]};
}

XBranchCompatibility check_x_branch_compatibility(const AngleQuad& theta) {
  const double residual = std::abs(theta[0] + theta[2] - theta[1] - theta[3]);
  return {residual < kXBranchTol, residual};
}

BetaFamilyMember x_branch_beta_family(const AngleQuad& theta, double t) {
  const auto compat = check_x_branch_compatibility(theta);
  if (!compat.compatible)
    throw Error(ErrorCode::Incompatible, "theta_1 + theta_3 != theta_2 + theta_4 (residual " +
                                             std::to_string(compat.residual) + ")");
  BetaFamilyMember out;
  out.beta = {theta[3] - t, theta[0] - theta[3] + t, theta[2] - t, t};
  // beta_i < theta_i is equivalent to beta_{i+1} > 0.
  out.admissible = std::all_of(out.beta.begin(), out.beta.end(), [](double b) { return b > 0.0; });
  return out;
}

double ccw_angle(const Eigen::Vector2d& from, const Eigen::Vector2d& to) {
  double a = std::atan2(from.x() * to.y() - from.y() * to.x(), from.dot(to));
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a -= kTwoPi;
  return a;
}

Eigen::Vector2d unit_at(double angle) { return {std::cos(angle), std::sin(angle)}; }

BranchConfig2D::BranchConfig2D(std::vector<Eigen::Vector2d> rays, std::vector<Eigen::Vector2d> radials) {
  const std::size_t k = rays.size();
  if (k != 3 && k != 4) throw Error(ErrorCode::InvalidConfig, "a branch needs 3 or 4 tangent rays");
  for (auto& r : rays) {
    const double len = r.norm();
    if (!(len > 0.0) || !std::isfinite(len)) throw Error(ErrorCode::InvalidConfig, "zero tangent ray");
    r /= len;
  }

  std::vector<std::pair<double, Eigen::Vector2d>> polar;
  polar.reserve(k);
  for (const auto& r : rays) polar.emplace_back(ccw_angle(rays.front(), r), r);
  polar.front().first = 0.0;
  std::stable_sort(polar.begin(), polar.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 0; i < k; ++i) {
    const double next = i + 1 < k ? polar[i + 1].first : kTwoPi;
    if (next - polar[i].first < kRayTieTol) throw Error(ErrorCode::DegenerateSheet, "two tangent rays coincide");
  }

  rays_.reserve(k);
  angles_.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    rays_.push_back(polar[i].second);
    if (i + 1 < k) angles_.push_back(polar[i + 1].first - polar[i].first);
  }
  angles_.push_back(kTwoPi - polar[k - 1].first);

  if (radials.empty()) return;
  if (radials.size() != k) throw Error(ErrorCode::InvalidConfig, "need exactly one radial vector per sector");
  radials_.assign(k, Eigen::Vector2d::Zero());
  std::vector<int> filled(k, 0);
  for (auto u : radials) {
    const double len = u.norm();
    if (!(len > 0.0) || !std::isfinite(len)) throw Error(ErrorCode::InvalidConfig, "zero radial vector");
    u /= len;
    const double rel = ccw_angle(rays_.front(), u);
    std::size_t sector = k - 1;
    for (std::size_t i = 0; i + 1 < k; ++i) {
      if (rel < polar[i + 1].first) {
        sector = i;
        break;
      }
    }
    const double start = polar[sector].first;
    const double end = sector + 1 < k ? polar[sector + 1].first : kTwoPi;
    if (!(rel > start) || !(rel < end))
      throw Error(ErrorCode::InvalidConfig, "radial vector lies on a tangent ray");
    if (filled[sector]++) throw Error(ErrorCode::InvalidConfig, "two radial vectors in one sector");
    radials_[sector] = u;
  }
}

AngleTriple BranchConfig2D::angle_triple() const {
  if (sheet_count() != 3) throw Error(ErrorCode::InvalidConfig, "not a three-sheet branch");
  return AngleTriple(angles_[0], angles_[1], kTwoPi - angles_[0] - angles_[1]);
}

AngleQuad BranchConfig2D::angle_quad() const {
  if (sheet_count() != 4) throw Error(ErrorCode::InvalidConfig, "not a four-sheet branch");
  return AngleQuad(angles_[0], angles_[1], angles_[2], kTwoPi - angles_[0] - angles_[1] - angles_[2]);
}

double BranchConfig2D::radial_offset(std::size_t i) const {
  if (!has_radials()) throw Error(ErrorCode::InvalidConfig, "configuration has no radial vectors");
  return ccw_angle(rays_.at(i), radials_.at(i));
}

BranchConfig2D make_y_branch_config(const AngleTriple& theta, double start_angle) {
  const auto alpha = solve_y_branch_angles(theta);
  std::vector<Eigen::Vector2d> rays, radials;
  double at = start_angle;
  for (int i = 0; i < 3; ++i) {
    rays.push_back(unit_at(at));
    radials.push_back(unit_at(at + alpha[(i + 1) % 3]));
    at += theta[i];
  }
  return BranchConfig2D(std::move(rays), std::move(radials));
}

BranchConfig2D make_x_branch_config(const AngleQuad& theta, double t, double start_angle) {
  const auto member = x_branch_beta_family(theta, t);
  std::vector<Eigen::Vector2d> rays, radials;
  double at = start_angle;
  for (int i = 0; i < 4; ++i) {
    rays.push_back(unit_at(at));
    radials.push_back(unit_at(at + member.beta[i]));
    at += theta[i];
  }
  return BranchConfig2D(std::move(rays), std::move(radials));
}

BlumValidation validate_blum_config(const BranchConfig2D& config, double tol) {
  if (!config.has_radials()) throw Error(ErrorCode::InvalidConfig, "configuration has no radial vectors");
  const std::size_t k = config.sheet_count();
  const auto& rays = config.tangent_rays();
  const auto& radials = config.radial_vectors();
  double worst = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double ccw_side = ccw_angle(rays[i], radials[i]);
    const double cw_side = ccw_angle(radials[(i + k - 1) % k], rays[i]);
    worst = std::max(worst, std::abs(ccw_side - cw_side));
  }
  return {worst < tol, worst};
}

void validate(const StratumPointData& data) {
  const int n = data.ambient_dim;
  if (n < 2) throw Error(ErrorCode::InvalidConfig, "ambient dimension must be at least 2");
  const auto& T = data.stratum_tangent;
  if (!(T.size() == 0 && n == 2) && (T.rows() != n || T.cols() != n - 2))
    throw Error(ErrorCode::InvalidConfig, "stratum tangent must be an n x (n-2) basis");
  if (T.cols() > 0 && !(T.transpose() * T).isApprox(Eigen::MatrixXd::Identity(T.cols(), T.cols()), kSheetTol))
    throw Error(ErrorCode::InvalidConfig, "stratum tangent basis is not orthonormal");
  const std::size_t k = data.sheet_normals.size();
  if (k != 3 && k != 4) throw Error(ErrorCode::InvalidConfig, "expected 3 or 4 sheets");
  if (data.sheet_directions.size() != k || data.radial_vectors.size() != k)
    throw Error(ErrorCode::InvalidConfig, "need one direction and one radial vector per sheet");
  for (std::size_t i = 0; i < k; ++i) {
    const auto& nu = data.sheet_normals[i];
    if (nu.size() != n || data.sheet_directions[i].size() != n || data.radial_vectors[i].size() != n)
      throw Error(ErrorCode::InvalidConfig, "vector of wrong dimension on sheet " + std::to_string(i));
    const double len = nu.norm();
    if (!(len > 0.0)) throw Error(ErrorCode::InvalidConfig, "zero sheet normal");
    for (Eigen::Index c = 0; c < T.cols(); ++c)
      if (std::abs(T.col(c).dot(nu) / len) > kSheetTol)
        throw Error(ErrorCode::InvalidConfig, "sheet " + std::to_string(i) + " does not contain the stratum tangent");
    const auto& d = data.sheet_directions[i];
    if (std::abs(d.dot(nu)) > kSheetTol * len * d.norm())
      throw Error(ErrorCode::InvalidConfig, "sheet direction " + std::to_string(i) + " leaves its hyperplane");
  }
}

Eigen::Matrix<double, Eigen::Dynamic, 2> transverse_plane_basis(const Eigen::MatrixXd& stratum_tangent, int ambient_dim) {
  Eigen::MatrixXd axis = stratum_tangent;
  if (axis.size() == 0) axis.resize(ambient_dim, 0);
  Eigen::Matrix<double, Eigen::Dynamic, 2> plane = axis_complement<double>(axis, ambient_dim);
  Eigen::MatrixXd frame(ambient_dim, ambient_dim);
  frame << axis, plane;
  if (frame.determinant() < 0.0) plane.col(1) *= -1.0;
  return plane;
}

BranchConfig2D reduce_to_transverse_plane(const StratumPointData& data) {
  validate(data);
  const auto plane = transverse_plane_basis(data.stratum_tangent, data.ambient_dim);
  const std::size_t k = data.sheet_normals.size();

  std::vector<Eigen::Vector2d> rays, radials;
  for (std::size_t i = 0; i < k; ++i) {
    const Eigen::Vector2d w = plane.transpose() * data.sheet_normals[i].normalized();
    if (w.norm() < kSheetTol) throw Error(ErrorCode::DegenerateSheet, "sheet tangent equals the stratum tangent");
    Eigen::Vector2d trace(-w.y(), w.x());
    const Eigen::Vector2d side = plane.transpose() * data.sheet_directions[i];
    const double along = side.dot(trace);
    if (std::abs(along) < kSheetTol * std::max(1.0, side.norm()))
      throw Error(ErrorCode::DegenerateSheet, "sheet direction has no component along its trace");
    rays.push_back(along > 0.0 ? trace.normalized() : Eigen::Vector2d(-trace.normalized()));

    const Eigen::Vector2d u = plane.transpose() * data.radial_vectors[i];
    if (u.norm() < kSheetTol) throw Error(ErrorCode::InvalidConfig, "radial vector lies in the stratum tangent");
    radials.push_back(u.normalized());
  }
  return BranchConfig2D(std::move(rays), std::move(radials));
}

}  // namespace medial
