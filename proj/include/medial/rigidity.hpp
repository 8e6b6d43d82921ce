#pragma once

// Rigidity invariants at branch points: the cross-ratio map of four sheets
// along a codimension-2 stratum, the triple of cross ratios built from the
// three radial lines at a generic Y-branch, obstruction reports comparing two
// configurations, the linear-distortion analysis of four-branch points, and
// numerical certification that the triple map is an immersion.

#include <array>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "medial/branch_geometry.hpp"
#include "medial/projective.hpp"

namespace medial {

struct FourSheetInvariant {
  double cross_ratio;  // for the pencil's own ordering
  CrossRatioOrbitd orbit;
};

FourSheetInvariant chi_four_sheet(const HyperplanePencild& pencil);

/// Slopes of (L_j, L_{j+1}, L_{j+2}, radial line of sector j) in a frame where
/// L_j is the x-axis, in the mirrored orientation used by the tabulated
/// values: sector 1 gives (0, -tan t1, tan t3, tan t2), sector 2 gives
/// (0, -tan t2, tan t1, tan t3), sector 3 gives (0, -tan t3, tan t2, tan t1).
/// A right angle yields the infinite slope.
std::array<ProjectiveScalard, 4> radial_pencil_slopes(const AngleTriple& theta, int sector);

/// Sector order of the rows of `TripleCrossRatio::lambdas`. The reference
/// table for (2pi/3, 5pi/9, 7pi/9) lists sector 2, then 3, then 1.
inline constexpr std::array<int, 3> kTripleRowSectors{2, 3, 1};

struct TripleCrossRatio {
  std::array<double, 3> lambdas;  // rows in kTripleRowSectors order
  std::array<CrossRatioOrbitd, 3> orbits;

  /// Cross ratio of the radial pencil of `sector` (1..3).
  double for_sector(int sector) const;
};

inline constexpr double kSlopeCoincidenceTol = 1e-10;

TripleCrossRatio triple_cross_ratio(const AngleTriple& theta);

/// The slope-level triple map
///   (b1, b2, b3) -> (R(0,-b1,b3,b2), R(0,-b2,b1,b3), R(0,-b3,b2,b1)),
/// in sector order 1, 2, 3. Homogeneous of degree zero.
std::array<double, 3> slope_cross_ratios(const Eigen::Vector3d& b);

struct YBranchComparison {
  bool matched;
  /// max_j orbit_distance, minimised over the allowed relabelings; zero
  /// (within tol) when matched.
  double obstruction;
  /// Best relabeling: row j of A is compared with row relabeling[j] of B.
  std::array<int, 3> relabeling;
  std::array<double, 3> row_distances;
};

/// Compares the three radial cross-ratio orbits of two Y-branches over the
/// cyclic relabelings of the sheets (and the reflections as well when
/// `allow_reflections`).
YBranchComparison compare_y_branch(const AngleTriple& theta_a, const AngleTriple& theta_b, double tol,
                                   bool allow_reflections = false);

struct FourSheetComparison {
  bool obstructed;
  double distance;  // orbit_distance of the two invariants
  FourSheetInvariant a, b;
};

FourSheetComparison compare_four_sheet(const HyperplanePencild& a, const HyperplanePencild& b, double tol);

/// Cross-ratio pencil of the four tangent lines of a planar four-sheet branch.
HyperplanePencild tangent_pencil(const BranchConfig2D& config);

struct DistortionReport {
  std::size_t matched_curves;
  Eigen::Matrix2d linear_map;
  std::vector<Eigen::Vector2d> image_tangents;  // unit images of every source ray
  std::vector<double> angle_errors;             // ray-to-ray angles, in [0, pi]
  std::vector<double> line_angle_errors;        // line-to-line angles, in [0, pi/2]
};

/// Builds the linear map sending the pinned source rays to the pinned target
/// rays and measures how far the images of the remaining rays land from their
/// targets. With two pins both scale factors are one; a third pin fixes their
/// ratio (the map then preserves the pinned lines, not their orientation).
DistortionReport linear_distortion_analysis(const BranchConfig2D& source, const BranchConfig2D& target,
                                            std::span<const int> pinned);

enum class Stencil { Central3, Central5 };

inline constexpr double kDefaultStep = 1e-5;
inline constexpr double kExcludedLocusTol = 1e-9;
inline constexpr double kRankRelativeTol = 1e-6;
inline constexpr double kRankAbsoluteTol = 1e-8;

struct RankCertificate {
  AngleTriple theta;
  Eigen::Matrix<double, 3, 2> jacobian;  // d ln|lambda_row| / d(theta_1, theta_2)
  Eigen::Vector2d singular_values;       // descending
  bool rank2;
};

/// True when some angle is a right angle or two angles coincide (within tol).
bool on_excluded_locus(const AngleTriple& theta, double tol = kExcludedLocusTol);

/// ln|lambda| of the three rows as a function of (theta_1, theta_2) on the
/// allowable plane theta_3 = 2 pi - theta_1 - theta_2.
Eigen::Vector3d log_triple_map(double theta1, double theta2);

RankCertificate triple_map_jacobian(const AngleTriple& theta, double step = kDefaultStep,
                                    Stencil stencil = Stencil::Central3);

struct UniquenessProbe {
  bool injective;
  /// Minimum over sampled neighbours of |Lambda(t') - Lambda(t)| / |t' - t|;
  /// +infinity when nothing was sampled.
  double min_separation;
  std::size_t evaluated;
};

inline constexpr double kCollisionTol = 1e-10;

UniquenessProbe local_uniqueness_probe(const AngleTriple& theta, double radius, std::size_t samples,
                                       std::uint64_t seed = 1);

struct RankScanEntry {
  AngleTriple theta;
  bool evaluated;  // false on the excluded locus or for degenerate triples
  bool rank2;
  Eigen::Vector2d singular_values;
};

/// Uniform sample of the allowable triangle whose angles stay `margin` away
/// from 0, pi, pi/2 and from each other.
AngleTriple sample_allowable_triple(std::mt19937_64& rng, double margin);

/// Certificates on a grid of (theta_1, theta_2) with `divisions` steps per
/// axis over (0, pi); points outside the allowable region are skipped.
/// Ordered by theta_1, then theta_2.
std::vector<RankScanEntry> rank_scan(int divisions, double step = kDefaultStep);

struct CollisionScan {
  std::size_t samples;
  std::size_t pairs;
  double min_value_distance;  // over pairs at least min_param_distance apart
  AngleTriple closest_a, closest_b;
};

/// Random search for distinct triples with nearly equal cross-ratio triples.
/// Reported as an experiment; no claim is attached to the outcome.
CollisionScan collision_scan(std::size_t samples, double min_param_distance, std::uint64_t seed = 1);

}  // namespace medial
