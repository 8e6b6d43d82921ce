#pragma once

// Angle relations between tangent rays and radial vectors at Y-branch
// (three sheets) and X-branch (four sheets) points, and the reduction of a
// codimension-2 branching stratum in n-space to a planar configuration.

#include <array>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace medial {

inline constexpr double kAngleSumTol = 1e-12;

/// Angles (theta_1, theta_2, theta_3) in (0, pi)^3 with sum 2 pi.
class AngleTriple {
 public:
  AngleTriple(double t1, double t2, double t3);

  /// Accepts a triple whose sum misses 2 pi by at most `slack` (e.g. angles
  /// typed with a few decimals) and removes the excess equally from each
  /// angle. Range checks are applied after the correction.
  static AngleTriple from_rounded(double t1, double t2, double t3, double slack);

  double operator[](std::size_t i) const { return theta_[i]; }
  const std::array<double, 3>& theta() const { return theta_; }

  /// Cyclic relabeling (theta_{1+s}, theta_{2+s}, theta_{3+s}).
  AngleTriple rotated(int shift) const;

 private:
  std::array<double, 3> theta_;
};

/// Angles (theta_1, ..., theta_4) in (0, pi)^4 with sum 2 pi.
class AngleQuad {
 public:
  AngleQuad(double t1, double t2, double t3, double t4);
  static AngleQuad from_rounded(double t1, double t2, double t3, double t4, double slack);

  double operator[](std::size_t i) const { return theta_[i]; }
  const std::array<double, 4>& theta() const { return theta_; }

 private:
  std::array<double, 4> theta_;
};

/// alpha_i = pi - theta_i, the unique solution of
///   theta_1 = alpha_2 + alpha_3, theta_2 = alpha_3 + alpha_1, theta_3 = alpha_1 + alpha_2.
/// Geometrically alpha_{i+1} is the angle from ray L_i to the radial vector
/// of sector i (the sector between L_i and L_{i+1}).
std::array<double, 3> solve_y_branch_angles(const AngleTriple& theta);

struct XBranchCompatibility {
  bool compatible;
  double residual;  // |theta_1 + theta_3 - theta_2 - theta_4|
};

inline constexpr double kXBranchTol = 1e-9;

XBranchCompatibility check_x_branch_compatibility(const AngleQuad& theta);

struct BetaFamilyMember {
  std::array<double, 4> beta;
  /// Every beta_i lies strictly inside (0, theta_i), so each radial vector is
  /// interior to its sector.
  bool admissible;
};

/// beta(t) = (theta_4 - t, theta_1 - theta_4 + t, theta_3 - t, t), the
/// one-parameter family solving theta_i = beta_i + beta_{i+1}. beta_i is the
/// angle from ray L_i to the radial vector of sector i.
BetaFamilyMember x_branch_beta_family(const AngleQuad& theta, double t);

/// Planar branch configuration: k in {3, 4} tangent rays in counterclockwise
/// order and (optionally) one radial vector per sector, where sector i spans
/// from ray i to ray i+1.
class BranchConfig2D {
 public:
  /// Orders the rays counterclockwise starting from `rays[0]` and assigns
  /// each radial vector to the sector containing it. Radials may be empty.
  BranchConfig2D(std::vector<Eigen::Vector2d> rays, std::vector<Eigen::Vector2d> radials = {});

  std::size_t sheet_count() const { return rays_.size(); }
  bool has_radials() const { return !radials_.empty(); }

  const std::vector<Eigen::Vector2d>& tangent_rays() const { return rays_; }
  const std::vector<Eigen::Vector2d>& radial_vectors() const { return radials_; }
  /// Counterclockwise gaps between consecutive rays; they sum to 2 pi.
  const std::vector<double>& angles() const { return angles_; }

  AngleTriple angle_triple() const;
  AngleQuad angle_quad() const;

  /// Angle from ray i counterclockwise to the radial vector of sector i.
  double radial_offset(std::size_t i) const;

 private:
  std::vector<Eigen::Vector2d> rays_;
  std::vector<Eigen::Vector2d> radials_;
  std::vector<double> angles_;
};

/// Counterclockwise angle from `from` to `to` in [0, 2 pi).
double ccw_angle(const Eigen::Vector2d& from, const Eigen::Vector2d& to);

/// Unit vector at polar angle `angle`.
Eigen::Vector2d unit_at(double angle);

/// Y-branch with rays at start, start + theta_1, start + theta_1 + theta_2
/// and radial vectors placed by solve_y_branch_angles.
BranchConfig2D make_y_branch_config(const AngleTriple& theta, double start_angle = 0.0);

/// X-branch with radial vectors from x_branch_beta_family(theta, t).
BranchConfig2D make_x_branch_config(const AngleQuad& theta, double t, double start_angle = 0.0);

struct BlumValidation {
  bool ok;
  double max_violation;
};

/// Worst difference, over all rays, between the angle from the ray to the
/// radial vector on its clockwise side and the angle to the one on its
/// counterclockwise side.
BlumValidation validate_blum_config(const BranchConfig2D& config, double tol);

/// Point data on a codimension-2 branching stratum of a medial axis in
/// n-space. Each sheet is a half-hyperplane: its limiting tangent hyperplane
/// (unit normal) together with the side on which the sheet lies
/// (`sheet_directions[i]`, a vector in the hyperplane not in the stratum).
struct StratumPointData {
  int ambient_dim = 2;
  Eigen::MatrixXd stratum_tangent;  // n x (n-2), orthonormal columns
  std::vector<Eigen::VectorXd> sheet_normals;
  std::vector<Eigen::VectorXd> sheet_directions;
  std::vector<Eigen::VectorXd> radial_vectors;
};

/// Checks sizes, orthonormality and that every sheet contains the stratum.
void validate(const StratumPointData& data);

/// Orthonormal basis (n x 2) of the plane orthogonal to the stratum, oriented
/// so that [stratum_tangent | basis] has positive determinant.
Eigen::Matrix<double, Eigen::Dynamic, 2> transverse_plane_basis(const Eigen::MatrixXd& stratum_tangent, int ambient_dim);

/// Intersects each sheet with the orthogonal plane P, projects radial vectors
/// to P and returns the planar configuration. Rays are ordered
/// counterclockwise starting from the trace of sheet 0.
BranchConfig2D reduce_to_transverse_plane(const StratumPointData& data);

}  // namespace medial
