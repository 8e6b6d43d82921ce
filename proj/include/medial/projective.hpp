#pragma once

// Cross ratios on the real projective line: scalars extended by a single
// point at infinity, pencils of lines through the origin of the plane, and
// pencils of hyperplanes sharing a codimension-2 axis.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "medial/errors.hpp"

namespace medial {

/// A real number or the (unsigned) point at infinity.
template <typename Scalar>
class ProjectiveScalar {
 public:
  constexpr ProjectiveScalar() = default;

  // Implicit on purpose: finite reals are the common case.
  ProjectiveScalar(Scalar value) {  // NOLINT(google-explicit-constructor)
    using std::isnan;
    using std::isinf;
    if (isnan(value)) throw Error(ErrorCode::InvalidValue, "NaN is not a projective scalar");
    if (isinf(value)) {
      infinite_ = true;
    } else {
      value_ = value;
    }
  }

  static ProjectiveScalar infinity() {
    ProjectiveScalar z;
    z.infinite_ = true;
    return z;
  }

  bool is_infinite() const { return infinite_; }
  bool is_finite() const { return !infinite_; }

  Scalar value() const {
    if (infinite_) throw Error(ErrorCode::InvalidValue, "value() of the point at infinity");
    return value_;
  }

  friend bool operator==(const ProjectiveScalar& a, const ProjectiveScalar& b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
    return a.value_ == b.value_;
  }

 private:
  Scalar value_{0};
  bool infinite_{false};
};

using ProjectiveScalard = ProjectiveScalar<double>;

namespace detail {

template <typename Scalar>
bool coincide(const ProjectiveScalar<Scalar>& a, const ProjectiveScalar<Scalar>& b, Scalar tol) {
  if (a.is_infinite() || b.is_infinite()) return a.is_infinite() && b.is_infinite();
  using std::abs;
  return abs(a.value() - b.value()) <= tol;
}

}  // namespace detail

/// ((z1 - z4)(z3 - z2)) / ((z1 - z2)(z3 - z4)), with the algebraic limit when
/// one argument is infinite. Points closer than `tol` count as coincident.
template <typename Scalar>
ProjectiveScalar<Scalar> cross_ratio(const ProjectiveScalar<Scalar>& z1, const ProjectiveScalar<Scalar>& z2,
                                     const ProjectiveScalar<Scalar>& z3, const ProjectiveScalar<Scalar>& z4,
                                     Scalar tol = Scalar(0)) {
  const std::array<const ProjectiveScalar<Scalar>*, 4> z{&z1, &z2, &z3, &z4};
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (detail::coincide(*z[i], *z[j], tol))
        throw Error(ErrorCode::DuplicatePoint, "cross ratio needs four distinct points");

  if (z1.is_infinite()) return (z3.value() - z2.value()) / (z3.value() - z4.value());
  if (z2.is_infinite()) return (z1.value() - z4.value()) / (z3.value() - z4.value());
  if (z3.is_infinite()) return (z1.value() - z4.value()) / (z1.value() - z2.value());
  if (z4.is_infinite()) return (z3.value() - z2.value()) / (z1.value() - z2.value());
  const Scalar a = z1.value(), b = z2.value(), c = z3.value(), d = z4.value();
  return ((a - d) * (c - b)) / ((a - b) * (c - d));
}

/// Values a cross ratio takes under all reorderings of its four points.
template <typename Scalar>
struct CrossRatioOrbit {
  std::vector<Scalar> values;  // sorted ascending, deduplicated
  Scalar representative{};

  bool contains(Scalar x, Scalar tol = Scalar(1e-9)) const {
    using std::abs;
    return std::any_of(values.begin(), values.end(), [&](Scalar v) { return abs(v - x) <= tol; });
  }
};

using CrossRatioOrbitd = CrossRatioOrbit<double>;

inline constexpr double kOrbitDedupTol = 1e-9;
inline constexpr double kDegenerateCrossRatioTol = 1e-12;

/// The S3 orbit {l, 1/l, 1-l, 1/(1-l), (l-1)/l, l/(l-1)}.
template <typename Scalar>
CrossRatioOrbit<Scalar> orbit(Scalar lambda, Scalar dedup_tol = Scalar(kOrbitDedupTol)) {
  using std::abs;
  if (!(abs(lambda) > Scalar(kDegenerateCrossRatioTol)) || !(abs(lambda - 1) > Scalar(kDegenerateCrossRatioTol)))
    throw Error(ErrorCode::DegenerateCrossRatio, "cross ratio 0 or 1 comes from coincident points");

  std::array<Scalar, 6> raw{lambda,
                            Scalar(1) / lambda,
                            Scalar(1) - lambda,
                            Scalar(1) / (Scalar(1) - lambda),
                            (lambda - Scalar(1)) / lambda,
                            lambda / (lambda - Scalar(1))};
  std::sort(raw.begin(), raw.end());
  CrossRatioOrbit<Scalar> out;
  out.representative = lambda;
  for (Scalar v : raw)
    if (out.values.empty() || abs(v - out.values.back()) > dedup_tol) out.values.push_back(v);
  return out;
}

/// Hausdorff distance between the two value sets.
template <typename Scalar>
Scalar orbit_distance(const CrossRatioOrbit<Scalar>& a, const CrossRatioOrbit<Scalar>& b) {
  using std::abs;
  auto directed = [](const std::vector<Scalar>& from, const std::vector<Scalar>& to) {
    Scalar worst(0);
    for (Scalar x : from) {
      Scalar best = std::numeric_limits<Scalar>::infinity();
      for (Scalar y : to) best = std::min(best, Scalar(abs(x - y)));
      worst = std::max(worst, best);
    }
    return worst;
  };
  if (a.values.empty() || b.values.empty()) return std::numeric_limits<Scalar>::infinity();
  return std::max(directed(a.values, b.values), directed(b.values, a.values));
}

inline constexpr double kParallelTol = 1e-9;

/// Four ordered lines through the origin of the plane, given by direction
/// vectors (sign and length are irrelevant).
template <typename Scalar>
class LinePencil2D {
 public:
  using Vector2 = Eigen::Matrix<Scalar, 2, 1>;

  explicit LinePencil2D(const std::array<Vector2, 4>& directions) : directions_(directions) {
    for (const auto& d : directions_)
      if (!(d.norm() > Scalar(0))) throw Error(ErrorCode::InvalidPencil, "zero line direction");
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        if (sin_between(directions_[i], directions_[j]) < Scalar(kParallelTol))
          throw Error(ErrorCode::DuplicatePoint, "two lines of the pencil are parallel");
  }

  /// Lines y = a x; an infinite slope is the vertical line.
  static LinePencil2D from_slopes(const std::array<ProjectiveScalar<Scalar>, 4>& slopes) {
    std::array<Vector2, 4> d;
    for (int i = 0; i < 4; ++i)
      d[i] = slopes[i].is_infinite() ? Vector2(0, 1) : Vector2(1, slopes[i].value());
    return LinePencil2D(d);
  }

  const std::array<Vector2, 4>& directions() const { return directions_; }
  const Vector2& operator[](int i) const { return directions_[i]; }

  template <typename Derived>
  LinePencil2D transformed(const Eigen::MatrixBase<Derived>& map) const {
    std::array<Vector2, 4> d;
    for (int i = 0; i < 4; ++i) d[i] = map * directions_[i];
    return LinePencil2D(d);
  }

  static Scalar sin_between(const Vector2& a, const Vector2& b) {
    using std::abs;
    return abs(a.x() * b.y() - a.y() * b.x()) / (a.norm() * b.norm());
  }

 private:
  std::array<Vector2, 4> directions_;
};

using LinePencil2Dd = LinePencil2D<double>;

/// Rotates the pencil so that no line is vertical (the vertical direction is
/// placed in the middle of the widest angular gap) and applies the scalar
/// formula to the slopes.
template <typename Scalar>
Scalar line_cross_ratio(const LinePencil2D<Scalar>& pencil) {
  using std::atan2;
  using std::cos;
  using std::fmod;
  using std::sin;
  const Scalar pi = std::numbers::pi_v<Scalar>;

  std::array<Scalar, 4> angle;
  for (int i = 0; i < 4; ++i) {
    Scalar a = fmod(atan2(pencil[i].y(), pencil[i].x()), pi);
    if (a < 0) a += pi;
    angle[i] = a;
  }
  std::array<Scalar, 4> sorted = angle;
  std::sort(sorted.begin(), sorted.end());
  Scalar best_gap = sorted[0] + pi - sorted[3];
  Scalar gap_mid = sorted[3] + best_gap / 2;
  for (int i = 0; i + 1 < 4; ++i) {
    const Scalar gap = sorted[i + 1] - sorted[i];
    if (gap > best_gap) {
      best_gap = gap;
      gap_mid = sorted[i] + gap / 2;
    }
  }
  const Scalar rotation = pi / 2 - gap_mid;
  const Scalar c = cos(rotation), s = sin(rotation);

  std::array<ProjectiveScalar<Scalar>, 4> slopes;
  for (int i = 0; i < 4; ++i) {
    const auto& d = pencil[i];
    const Scalar x = c * d.x() - s * d.y();
    const Scalar y = s * d.x() + c * d.y();
    slopes[i] = y / x;
  }
  return cross_ratio(slopes[0], slopes[1], slopes[2], slopes[3]).value();
}

/// Same invariant without rotating: a vertical line enters as the infinite
/// slope.
template <typename Scalar>
Scalar line_cross_ratio_projective(const LinePencil2D<Scalar>& pencil) {
  std::array<ProjectiveScalar<Scalar>, 4> slopes;
  for (int i = 0; i < 4; ++i) {
    const auto& d = pencil[i];
    slopes[i] = d.x() == Scalar(0) ? ProjectiveScalar<Scalar>::infinity() : ProjectiveScalar<Scalar>(d.y() / d.x());
  }
  return cross_ratio(slopes[0], slopes[1], slopes[2], slopes[3]).value();
}

inline constexpr double kAxisTol = 1e-9;

/// Orthonormal basis (n x 2) of the orthogonal complement of a codimension-2
/// axis, taken from the full SVD of the axis basis.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 2> axis_complement(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& axis,
                                                          int ambient_dim) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (axis.cols() == 0) return Matrix::Identity(ambient_dim, 2);
  Eigen::JacobiSVD<Matrix> svd(axis, Eigen::ComputeFullU);
  return svd.matrixU().rightCols(2);
}

/// Four hyperplanes of n-space, given by normals, all containing a common
/// (n-2)-dimensional axis.
template <typename Scalar>
class HyperplanePencil {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  HyperplanePencil(int ambient_dim, const Matrix& axis, const std::array<Vector, 4>& normals)
      : ambient_dim_(ambient_dim), axis_(axis), normals_(normals) {
    using std::abs;
    if (ambient_dim < 2) throw Error(ErrorCode::InvalidPencil, "ambient dimension must be at least 2");
    if (axis_.rows() != ambient_dim && !(axis_.size() == 0 && ambient_dim == 2))
      throw Error(ErrorCode::InvalidPencil, "axis basis has the wrong row count");
    if (axis_.size() == 0) axis_.resize(ambient_dim, 0);
    if (axis_.cols() != ambient_dim - 2) throw Error(ErrorCode::InvalidPencil, "axis must have n-2 basis vectors");
    if (axis_.cols() > 0 &&
        !(axis_.transpose() * axis_).isApprox(Matrix::Identity(axis_.cols(), axis_.cols()), Scalar(kAxisTol)))
      throw Error(ErrorCode::InvalidPencil, "axis basis is not orthonormal");

    for (auto& nu : normals_) {
      if (nu.size() != ambient_dim) throw Error(ErrorCode::InvalidPencil, "normal has the wrong dimension");
      const Scalar len = nu.norm();
      if (!(len > Scalar(0))) throw Error(ErrorCode::InvalidPencil, "zero hyperplane normal");
      nu /= len;
      for (int c = 0; c < axis_.cols(); ++c)
        if (abs(axis_.col(c).dot(nu)) > Scalar(kAxisTol))
          throw Error(ErrorCode::InvalidPencil, "hyperplane does not contain the axis");
    }

    const auto complement = axis_complement<Scalar>(axis_, ambient_dim_);
    std::array<Eigen::Matrix<Scalar, 2, 1>, 4> projected;
    for (int i = 0; i < 4; ++i) projected[i] = complement.transpose() * normals_[i];
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        if (LinePencil2D<Scalar>::sin_between(projected[i], projected[j]) < Scalar(kParallelTol))
          throw Error(ErrorCode::DuplicatePoint, "two hyperplanes of the pencil coincide");
  }

  int ambient_dim() const { return ambient_dim_; }
  const Matrix& axis() const { return axis_; }
  const std::array<Vector, 4>& normals() const { return normals_; }

  /// Image under an invertible linear map A: the axis maps to A * axis and
  /// normals transform by the inverse transpose.
  HyperplanePencil transformed(const Matrix& map) const {
    const Matrix inv_t = map.inverse().transpose();
    Matrix axis = map * axis_;
    if (axis.cols() > 0) {
      Eigen::HouseholderQR<Matrix> qr(axis);
      axis = qr.householderQ() * Matrix::Identity(ambient_dim_, axis.cols());
    }
    std::array<Vector, 4> normals;
    for (int i = 0; i < 4; ++i) normals[i] = inv_t * normals_[i];
    return HyperplanePencil(ambient_dim_, axis, normals);
  }

 private:
  int ambient_dim_;
  Matrix axis_;
  std::array<Vector, 4> normals_;
};

using HyperplanePencild = HyperplanePencil<double>;

inline constexpr double kTransverseTol = 1e-9;

/// Cuts the pencil with a 2-plane transverse to the axis (default: the
/// orthogonal complement of the axis) and returns the cross ratio of the four
/// trace lines, expressed in the plane's own coordinates.
template <typename Scalar>
Scalar hyperplane_cross_ratio(const HyperplanePencil<Scalar>& pencil,
                              const std::optional<Eigen::Matrix<std::type_identity_t<Scalar>, Eigen::Dynamic, 2>>& transverse_plane = std::nullopt) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector2 = Eigen::Matrix<Scalar, 2, 1>;
  const int n = pencil.ambient_dim();

  Eigen::Matrix<Scalar, Eigen::Dynamic, 2> plane;
  if (transverse_plane) {
    plane = *transverse_plane;
    if (plane.rows() != n) throw Error(ErrorCode::NotTransverse, "plane basis has the wrong dimension");
    Matrix joined(n, n);
    joined << pencil.axis(), plane;
    Eigen::JacobiSVD<Matrix> svd(joined);
    if (!(svd.singularValues().minCoeff() > Scalar(kTransverseTol)))
      throw Error(ErrorCode::NotTransverse, "plane is not transverse to the pencil axis");
  } else {
    plane = axis_complement<Scalar>(pencil.axis(), n);
  }

  std::array<Vector2, 4> directions;
  for (int i = 0; i < 4; ++i) {
    const Vector2 w = plane.transpose() * pencil.normals()[i];
    directions[i] = Vector2(-w.y(), w.x());
  }
  return line_cross_ratio(LinePencil2D<Scalar>(directions));
}

}  // namespace medial
