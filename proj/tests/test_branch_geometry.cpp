#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "generators.hpp"
#include "medial/branch_geometry.hpp"
#include "medial/errors.hpp"

using namespace medial;
using medial::testing::uniform;
using std::numbers::pi;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::IoError;
}

}  // namespace

TEST(AngleTriple, RangeAndSumChecked) {
  EXPECT_EQ(code_of([] { AngleTriple(pi, pi / 2, pi / 2); }), ErrorCode::OutOfRange);
  EXPECT_EQ(code_of([] { AngleTriple(0.0, pi, pi); }), ErrorCode::OutOfRange);
  EXPECT_EQ(code_of([] { AngleTriple(2.0, 2.0, 2.0); }), ErrorCode::NotAllowable);
  EXPECT_NO_THROW(AngleTriple(2 * pi / 3, 2 * pi / 3, 2 * pi / 3));
}

TEST(AngleTriple, RoundedInputIsProjected) {
  const auto t = AngleTriple::from_rounded(2.0943951, 1.7453293, 2.4434610, 1e-6);
  EXPECT_NEAR(t[0] + t[1] + t[2], 2 * pi, 1e-15);
  EXPECT_NEAR(t[0], 2 * pi / 3, 1e-7);
  EXPECT_EQ(code_of([] { AngleTriple::from_rounded(2.0, 2.0, 2.0, 1e-6); }), ErrorCode::NotAllowable);
}

TEST(AngleTriple, Rotation) {
  const AngleTriple t(2 * pi / 3, 5 * pi / 9, 7 * pi / 9);
  const auto r = t.rotated(1);
  EXPECT_DOUBLE_EQ(r[0], t[1]);
  EXPECT_DOUBLE_EQ(r[1], t[2]);
  EXPECT_DOUBLE_EQ(r[2], t[0]);
  EXPECT_DOUBLE_EQ(t.rotated(-1)[0], t[2]);
}

TEST(YBranch, SymmetricBranchGivesEqualAngles) {
  const auto a = solve_y_branch_angles(AngleTriple(2 * pi / 3, 2 * pi / 3, 2 * pi / 3));
  for (double v : a) EXPECT_NEAR(v, pi / 3, 1e-15);
}

TEST(YBranch, ClosedFormMatchesLinearSolve) {
  std::mt19937_64 rng(21);
  Eigen::Matrix3d m;
  m << 0, 1, 1, 1, 0, 1, 1, 1, 0;
  const auto lu = m.partialPivLu();
  for (int k = 0; k < 1000; ++k) {
    const auto theta = medial::testing::random_allowable_triple(rng, 1e-3);
    const auto alpha = solve_y_branch_angles(theta);
    const Eigen::Vector3d solved = lu.solve(Eigen::Vector3d(theta[0], theta[1], theta[2]));
    for (int i = 0; i < 3; ++i) {
      EXPECT_NEAR(alpha[i], solved[i], 1e-12);
      EXPECT_GT(alpha[i], 0.0);
    }
  }
}

TEST(XBranch, CompatibilityResidual) {
  const auto c = check_x_branch_compatibility(AngleQuad(5 * pi / 9, 5 * pi / 9, 5 * pi / 9, pi / 3));
  EXPECT_FALSE(c.compatible);
  EXPECT_NEAR(c.residual, 2 * pi / 9, 1e-15);
  EXPECT_TRUE(check_x_branch_compatibility(AngleQuad(pi / 2, pi / 2, pi / 2, pi / 2)).compatible);
}

TEST(XBranch, BetaFamilySolvesTheSystem) {
  std::mt19937_64 rng(22);
  for (int k = 0; k < 100; ++k) {
    const auto theta = medial::testing::random_compatible_quad(rng);
    const double t = uniform(rng, -1.0, 3.0);
    const auto m = x_branch_beta_family(theta, t);
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(m.beta[i] + m.beta[(i + 1) % 4], theta[i], 1e-12);
    bool inside = true;
    for (int i = 0; i < 4; ++i) inside = inside && m.beta[i] > 0.0 && m.beta[i] < theta[i];
    EXPECT_EQ(m.admissible, inside);
  }
}

TEST(XBranch, IncompatibleQuadHasNoFamily) {
  EXPECT_EQ(code_of([] { x_branch_beta_family(AngleQuad(5 * pi / 9, 5 * pi / 9, 5 * pi / 9, pi / 3), 0.3); }),
            ErrorCode::Incompatible);
}

TEST(BranchConfig, OrdersRaysAndMeasuresAngles) {
  const BranchConfig2D c({unit_at(2.0), unit_at(0.0), unit_at(4.0)});
  EXPECT_NEAR(c.tangent_rays()[0].x(), std::cos(2.0), 1e-15);
  EXPECT_NEAR(c.angles()[0], 2.0, 1e-12);
  EXPECT_NEAR(c.angles()[1], 2 * pi - 4.0, 1e-12);
  EXPECT_NEAR(c.angles()[2], 2.0, 1e-12);
  EXPECT_EQ(code_of([] { BranchConfig2D({unit_at(0), unit_at(1)}); }), ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of([] { BranchConfig2D({unit_at(0), unit_at(0), unit_at(3)}); }), ErrorCode::DegenerateSheet);
  EXPECT_EQ(code_of([] { BranchConfig2D({unit_at(0), unit_at(2), unit_at(4)}, {unit_at(0.5), unit_at(1)}); }),
            ErrorCode::InvalidConfig);
}

TEST(BranchConfig, YBranchIsBlum) {
  std::mt19937_64 rng(23);
  for (int k = 0; k < 200; ++k) {
    const auto theta = medial::testing::random_allowable_triple(rng);
    const auto c = make_y_branch_config(theta, uniform(rng, -pi, pi));
    const auto back = c.angle_triple();
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(back[i], theta[i], 1e-12);
    const auto v = validate_blum_config(c, 1e-9);
    EXPECT_TRUE(v.ok) << v.max_violation;
  }
}

TEST(BranchConfig, XBranchIsBlumForEveryAdmissibleT) {
  std::mt19937_64 rng(24);
  for (int k = 0; k < 200; ++k) {
    const auto theta = medial::testing::random_compatible_quad(rng);
    const double t = uniform(rng, 0.0, std::min(theta[3], theta[0]));
    if (!x_branch_beta_family(theta, t).admissible) continue;
    const auto c = make_x_branch_config(theta, t, uniform(rng, -pi, pi));
    EXPECT_TRUE(validate_blum_config(c, 1e-9).ok);
    EXPECT_NEAR(c.radial_offset(3), t, 1e-12);
  }
}

TEST(BranchConfig, PerturbedRadialBreaksBlum) {
  const auto c = make_y_branch_config(AngleTriple(2 * pi / 3, 5 * pi / 9, 7 * pi / 9));
  auto radials = c.radial_vectors();
  radials[0] = Eigen::Rotation2Dd(0.1) * radials[0];
  const BranchConfig2D bent(c.tangent_rays(), radials);
  const auto v = validate_blum_config(bent, 1e-9);
  EXPECT_FALSE(v.ok);
  EXPECT_NEAR(v.max_violation, 0.1, 1e-12);
}

TEST(Stratum, PlanarDataPassesThrough) {
  const auto c = make_y_branch_config(AngleTriple(2 * pi / 3, 5 * pi / 9, 7 * pi / 9), 0.4);
  StratumPointData d;
  d.ambient_dim = 2;
  d.stratum_tangent = Eigen::MatrixXd(2, 0);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& r = c.tangent_rays()[i];
    d.sheet_normals.push_back(Eigen::Vector2d(-r.y(), r.x()));
    d.sheet_directions.push_back(r);
    d.radial_vectors.push_back(c.radial_vectors()[i]);
  }
  const auto reduced = reduce_to_transverse_plane(d);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(reduced.angles()[i], c.angles()[i], 1e-12);
}

TEST(Stratum, EmbeddedBranchReducesToItsPlanarSection) {
  std::mt19937_64 rng(25);
  for (int n = 3; n <= 5; ++n) {
    for (int k = 0; k < 20; ++k) {
      const auto theta = medial::testing::random_allowable_triple(rng);
      const auto c = make_y_branch_config(theta, uniform(rng, -pi, pi));
      const Eigen::MatrixXd frame = medial::testing::random_orthonormal(rng, n, n);
      StratumPointData d;
      d.ambient_dim = n;
      d.stratum_tangent = frame.leftCols(n - 2);
      Eigen::MatrixXd plane = transverse_plane_basis(d.stratum_tangent, n);
      for (int i = 0; i < 3; ++i) {
        const auto& r = c.tangent_rays()[i];
        Eigen::VectorXd stratum_part = d.stratum_tangent * Eigen::VectorXd::Constant(n - 2, uniform(rng, -1, 1));
        d.sheet_normals.push_back(plane * Eigen::Vector2d(-r.y(), r.x()));
        d.sheet_directions.push_back(plane * r + stratum_part);
        d.radial_vectors.push_back(plane * c.radial_vectors()[i] + stratum_part);
      }
      const auto reduced = reduce_to_transverse_plane(d);
      for (int i = 0; i < 3; ++i) EXPECT_NEAR(reduced.angles()[i], c.angles()[i], 1e-10);
      EXPECT_TRUE(validate_blum_config(reduced, 1e-9).ok);
    }
  }
}

TEST(Stratum, InvalidDataRejected) {
  StratumPointData d;
  d.ambient_dim = 3;
  d.stratum_tangent = Eigen::Vector3d(0, 0, 1);
  for (int i = 0; i < 3; ++i) {
    const Eigen::Vector2d r = unit_at(2 * pi * i / 3);
    d.sheet_normals.push_back(Eigen::Vector3d(-r.y(), r.x(), 0));
    d.sheet_directions.push_back(Eigen::Vector3d(r.x(), r.y(), 0));
    d.radial_vectors.push_back(Eigen::Vector3d(std::cos(2 * pi * i / 3 + pi / 3), std::sin(2 * pi * i / 3 + pi / 3), 0));
  }
  EXPECT_NO_THROW(reduce_to_transverse_plane(d));
  auto bad = d;
  bad.sheet_normals[1] = Eigen::Vector3d(0, 1, 1);
  EXPECT_EQ(code_of([&] { validate(bad); }), ErrorCode::InvalidConfig);
  bad = d;
  bad.stratum_tangent = Eigen::Vector3d(0, 0, 2);
  EXPECT_EQ(code_of([&] { validate(bad); }), ErrorCode::InvalidConfig);
  bad = d;
  bad.sheet_directions[0] = Eigen::Vector3d(0, 0, 1);
  EXPECT_EQ(code_of([&] { reduce_to_transverse_plane(bad); }), ErrorCode::DegenerateSheet);
}

TEST(Angles, CcwAngleRange) {
  EXPECT_NEAR(ccw_angle(unit_at(0), unit_at(pi / 2)), pi / 2, 1e-15);
  EXPECT_NEAR(ccw_angle(unit_at(pi / 2), unit_at(0)), 3 * pi / 2, 1e-15);
  EXPECT_EQ(ccw_angle(unit_at(1), unit_at(1)), 0.0);
}
