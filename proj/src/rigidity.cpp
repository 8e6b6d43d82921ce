#include "medial/rigidity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "medial/errors.hpp"

namespace medial {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kRightAngleCos = 1e-14;
constexpr double kPinTol = 1e-9;

ProjectiveScalard tangent_of(double angle) {
  if (std::abs(std::cos(angle)) <= kRightAngleCos) return ProjectiveScalard::infinity();
  return std::tan(angle);
}

ProjectiveScalard negated(const ProjectiveScalard& z) { return z.is_infinite() ? z : ProjectiveScalard(-z.value()); }

double cross_ratio_of(const std::array<ProjectiveScalard, 4>& z) { return cross_ratio(z[0], z[1], z[2], z[3]).value(); }

double det2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

}  // namespace

FourSheetInvariant chi_four_sheet(const HyperplanePencild& pencil) {
  const double lambda = hyperplane_cross_ratio(pencil);
  return {lambda, orbit(lambda)};
}

std::array<ProjectiveScalard, 4> radial_pencil_slopes(const AngleTriple& theta, int sector) {
  if (sector < 1 || sector > 3) throw Error(ErrorCode::InvalidValue, "sector index must be 1, 2 or 3");
  const int j = sector - 1;
  const ProjectiveScalard own = tangent_of(theta[j]);
  const ProjectiveScalard prev = tangent_of(theta[(j + 2) % 3]);
  const ProjectiveScalard next = tangent_of(theta[(j + 1) % 3]);
  std::array<ProjectiveScalard, 4> slopes{ProjectiveScalard(0.0), negated(own), prev, next};
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b)
      if (detail::coincide(slopes[a], slopes[b], kSlopeCoincidenceTol))
        throw Error(ErrorCode::DegenerateTriple, "two lines of the radial pencil of sector " +
                                                     std::to_string(sector) + " coincide");
  return slopes;
}

double TripleCrossRatio::for_sector(int sector) const {
  for (int row = 0; row < 3; ++row)
    if (kTripleRowSectors[row] == sector) return lambdas[row];
  throw Error(ErrorCode::InvalidValue, "sector index must be 1, 2 or 3");
}

TripleCrossRatio triple_cross_ratio(const AngleTriple& theta) {
  TripleCrossRatio out;
  for (int row = 0; row < 3; ++row) {
    out.lambdas[row] = cross_ratio_of(radial_pencil_slopes(theta, kTripleRowSectors[row]));
    out.orbits[row] = orbit(out.lambdas[row]);
  }
  return out;
}

std::array<double, 3> slope_cross_ratios(const Eigen::Vector3d& b) {
  const ProjectiveScalard zero(0.0);
  return {cross_ratio(zero, ProjectiveScalard(-b[0]), ProjectiveScalard(b[2]), ProjectiveScalard(b[1])).value(),
          cross_ratio(zero, ProjectiveScalard(-b[1]), ProjectiveScalard(b[0]), ProjectiveScalard(b[2])).value(),
          cross_ratio(zero, ProjectiveScalard(-b[2]), ProjectiveScalard(b[1]), ProjectiveScalard(b[0])).value()};
}

YBranchComparison compare_y_branch(const AngleTriple& theta_a, const AngleTriple& theta_b, double tol,
                                   bool allow_reflections) {
  const auto ta = triple_cross_ratio(theta_a);
  const auto tb = triple_cross_ratio(theta_b);

  std::vector<std::array<int, 3>> relabelings{{0, 1, 2}, {1, 2, 0}, {2, 0, 1}};
  if (allow_reflections) {
    relabelings.push_back({0, 2, 1});
    relabelings.push_back({2, 1, 0});
    relabelings.push_back({1, 0, 2});
  }

  YBranchComparison best{};
  best.obstruction = std::numeric_limits<double>::infinity();
  for (const auto& perm : relabelings) {
    std::array<double, 3> d{};
    for (int j = 0; j < 3; ++j) d[j] = orbit_distance(ta.orbits[j], tb.orbits[perm[j]]);
    const double worst = *std::max_element(d.begin(), d.end());
    if (worst < best.obstruction) {
      best.obstruction = worst;
      best.relabeling = perm;
      best.row_distances = d;
    }
  }
  best.matched = best.obstruction < tol;
  return best;
}

FourSheetComparison compare_four_sheet(const HyperplanePencild& a, const HyperplanePencild& b, double tol) {
  FourSheetComparison out{false, 0.0, chi_four_sheet(a), chi_four_sheet(b)};
  out.distance = orbit_distance(out.a.orbit, out.b.orbit);
  out.obstructed = !(out.distance < tol);
  return out;
}

HyperplanePencild tangent_pencil(const BranchConfig2D& config) {
  if (config.sheet_count() != 4) throw Error(ErrorCode::InvalidConfig, "tangent pencil needs four sheets");
  std::array<Eigen::VectorXd, 4> normals;
  for (int i = 0; i < 4; ++i) {
    const auto& r = config.tangent_rays()[i];
    normals[i] = Eigen::Vector2d(-r.y(), r.x());
  }
  return HyperplanePencild(2, Eigen::MatrixXd(2, 0), normals);
}

DistortionReport linear_distortion_analysis(const BranchConfig2D& source, const BranchConfig2D& target,
                                            std::span<const int> pinned) {
  const std::size_t k = source.sheet_count();
  if (target.sheet_count() != k) throw Error(ErrorCode::InvalidConfig, "source and target sheet counts differ");
  if (pinned.size() != 2 && pinned.size() != 3) throw Error(ErrorCode::InvalidConfig, "pin two or three rays");
  for (std::size_t a = 0; a < pinned.size(); ++a) {
    if (pinned[a] < 0 || static_cast<std::size_t>(pinned[a]) >= k)
      throw Error(ErrorCode::InvalidConfig, "pinned index out of range");
    for (std::size_t b = a + 1; b < pinned.size(); ++b)
      if (pinned[a] == pinned[b]) throw Error(ErrorCode::InvalidConfig, "pinned indices repeat");
  }

  const auto& src = source.tangent_rays();
  const auto& dst = target.tangent_rays();
  Eigen::Matrix2d D, T;
  D << src[pinned[0]], src[pinned[1]];
  T << dst[pinned[0]], dst[pinned[1]];
  if (std::abs(D.determinant()) < kPinTol || std::abs(T.determinant()) < kPinTol)
    throw Error(ErrorCode::PinnedDegenerate, "pinned rays are parallel");

  Eigen::Vector2d scale(1.0, 1.0);
  if (pinned.size() == 3) {
    const Eigen::Vector2d c = D.inverse() * src[pinned[2]];
    const Eigen::Vector2d e = T.inverse() * dst[pinned[2]];
    if (std::abs(det2(src[pinned[2]], src[pinned[0]])) < kPinTol ||
        std::abs(det2(src[pinned[2]], src[pinned[1]])) < kPinTol ||
        std::abs(det2(dst[pinned[2]], dst[pinned[0]])) < kPinTol ||
        std::abs(det2(dst[pinned[2]], dst[pinned[1]])) < kPinTol)
      throw Error(ErrorCode::PinnedDegenerate, "third pinned ray is parallel to another pin");
    scale = Eigen::Vector2d(e.x() / c.x(), e.y() / c.y());
  }

  DistortionReport report;
  report.linear_map = T * scale.asDiagonal() * D.inverse();
  report.matched_curves = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const Eigen::Vector2d image = (report.linear_map * src[i]).normalized();
    const double err = std::atan2(std::abs(det2(image, dst[i])), image.dot(dst[i]));
    report.image_tangents.push_back(image);
    report.angle_errors.push_back(err);
    report.line_angle_errors.push_back(std::min(err, kPi - err));
    if (err < kPinTol) ++report.matched_curves;
  }
  return report;
}

bool on_excluded_locus(const AngleTriple& theta, double tol) {
  for (int i = 0; i < 3; ++i) {
    if (std::abs(theta[i] - kPi / 2) <= tol) return true;
    for (int j = i + 1; j < 3; ++j)
      if (std::abs(theta[i] - theta[j]) <= tol) return true;
  }
  return false;
}

Eigen::Vector3d log_triple_map(double theta1, double theta2) {
  const auto t = triple_cross_ratio(AngleTriple(theta1, theta2, kTwoPi - theta1 - theta2));
  return {std::log(std::abs(t.lambdas[0])), std::log(std::abs(t.lambdas[1])), std::log(std::abs(t.lambdas[2]))};
}

RankCertificate triple_map_jacobian(const AngleTriple& theta, double step, Stencil stencil) {
  if (on_excluded_locus(theta)) throw Error(ErrorCode::ExcludedLocus, "right angle or repeated angle");
  if (!(step > 0.0)) throw Error(ErrorCode::InvalidValue, "finite-difference step must be positive");

  const double t1 = theta[0], t2 = theta[1];
  auto at = [](double a, double b) { return log_triple_map(a, b); };
  Eigen::Matrix<double, 3, 2> J;
  if (stencil == Stencil::Central3) {
    J.col(0) = (at(t1 + step, t2) - at(t1 - step, t2)) / (2.0 * step);
    J.col(1) = (at(t1, t2 + step) - at(t1, t2 - step)) / (2.0 * step);
  } else {
    J.col(0) = (-at(t1 + 2 * step, t2) + 8.0 * at(t1 + step, t2) - 8.0 * at(t1 - step, t2) + at(t1 - 2 * step, t2)) /
               (12.0 * step);
    J.col(1) = (-at(t1, t2 + 2 * step) + 8.0 * at(t1, t2 + step) - 8.0 * at(t1, t2 - step) + at(t1, t2 - 2 * step)) /
               (12.0 * step);
  }

  Eigen::JacobiSVD<Eigen::Matrix<double, 3, 2>> svd(J);
  const Eigen::Vector2d sv = svd.singularValues();
  const bool rank2 = sv[1] > kRankRelativeTol * sv[0] && sv[1] > kRankAbsoluteTol;
  return {theta, J, sv, rank2};
}

UniquenessProbe local_uniqueness_probe(const AngleTriple& theta, double radius, std::size_t samples,
                                       std::uint64_t seed) {
  UniquenessProbe out{true, std::numeric_limits<double>::infinity(), 0};
  if (!(radius > 0.0) || samples == 0) return out;

  const auto centre = triple_cross_ratio(theta);
  const Eigen::Vector3d centre_values(centre.lambdas[0], centre.lambdas[1], centre.lambdas[2]);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (std::size_t s = 0; s < samples; ++s) {
    const double r = radius * std::sqrt(unit(rng));
    const double phi = kTwoPi * unit(rng);
    const double t1 = theta[0] + r * std::cos(phi);
    const double t2 = theta[1] + r * std::sin(phi);
    const double t3 = kTwoPi - t1 - t2;
    const Eigen::Vector3d dtheta(t1 - theta[0], t2 - theta[1], t3 - theta[2]);
    if (dtheta.norm() == 0.0) continue;
    try {
      const auto t = triple_cross_ratio(AngleTriple(t1, t2, t3));
      const Eigen::Vector3d values(t.lambdas[0], t.lambdas[1], t.lambdas[2]);
      const double gap = (values - centre_values).norm();
      if (gap < kCollisionTol) out.injective = false;
      out.min_separation = std::min(out.min_separation, gap / dtheta.norm());
      ++out.evaluated;
    } catch (const Error&) {
      // Neighbour left the allowable region or hit a degenerate pencil.
    }
  }
  return out;
}

AngleTriple sample_allowable_triple(std::mt19937_64& rng, double margin) {
  std::uniform_real_distribution<double> angle(margin, kPi - margin);
  for (;;) {
    const double t1 = angle(rng), t2 = angle(rng);
    const double t3 = kTwoPi - t1 - t2;
    if (!(t3 > margin && t3 < kPi - margin)) continue;
    const AngleTriple theta(t1, t2, t3);
    if (on_excluded_locus(theta, margin)) continue;
    return theta;
  }
}

std::vector<RankScanEntry> rank_scan(int divisions, double step) {
  if (divisions < 2) throw Error(ErrorCode::InvalidValue, "rank scan needs at least 2 divisions");
  std::vector<RankScanEntry> out;
  for (int i = 1; i < divisions; ++i) {
    for (int j = 1; j < divisions; ++j) {
      const double t1 = kPi * i / divisions, t2 = kPi * j / divisions;
      const double t3 = kTwoPi - t1 - t2;
      if (!(t3 > 0.0 && t3 < kPi)) continue;
      const AngleTriple theta(t1, t2, t3);
      RankScanEntry entry{theta, false, false, Eigen::Vector2d::Zero()};
      if (!on_excluded_locus(theta)) {
        try {
          const auto cert = triple_map_jacobian(theta, step);
          entry = {theta, true, cert.rank2, cert.singular_values};
        } catch (const Error&) {
          // Degenerate pencil inside the stencil; left unevaluated.
        }
      }
      out.push_back(entry);
    }
  }
  return out;
}

CollisionScan collision_scan(std::size_t samples, double min_param_distance, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<AngleTriple> thetas;
  std::vector<Eigen::Vector3d> values;
  while (thetas.size() < samples) {
    const AngleTriple theta = sample_allowable_triple(rng, 1e-3);
    try {
      const auto t = triple_cross_ratio(theta);
      values.emplace_back(t.lambdas[0], t.lambdas[1], t.lambdas[2]);
      thetas.push_back(theta);
    } catch (const Error&) {
    }
  }

  CollisionScan out{samples, 0, std::numeric_limits<double>::infinity(), thetas.empty() ? AngleTriple(2, 2, kTwoPi - 4) : thetas[0],
                    thetas.empty() ? AngleTriple(2, 2, kTwoPi - 4) : thetas[0]};
  for (std::size_t a = 0; a < thetas.size(); ++a) {
    const Eigen::Vector3d ta(thetas[a][0], thetas[a][1], thetas[a][2]);
    for (std::size_t b = a + 1; b < thetas.size(); ++b) {
      const Eigen::Vector3d tb(thetas[b][0], thetas[b][1], thetas[b][2]);
      if ((ta - tb).norm() < min_param_distance) continue;
      ++out.pairs;
      const double d = (values[a] - values[b]).norm();
      if (d < out.min_value_distance) {
        out.min_value_distance = d;
        out.closest_a = thetas[a];
        out.closest_b = thetas[b];
      }
    }
  }
  return out;
}

}  // namespace medial
