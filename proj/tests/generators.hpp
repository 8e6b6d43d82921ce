#pragma once

// Random inputs for the property tests. Every generator takes the engine by
// reference so that a test seeds once and stays reproducible.

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "medial/branch_geometry.hpp"

namespace medial::testing {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Eigen::Vector2d random_direction(std::mt19937_64& rng) {
  const double a = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  return {std::cos(a), std::sin(a)};
}

/// Four directions whose lines are pairwise at least `min_gap` apart mod pi.
inline std::array<Eigen::Vector2d, 4> random_line_directions(std::mt19937_64& rng, double min_gap = 0.05) {
  for (;;) {
    std::array<double, 4> a;
    for (auto& x : a) x = uniform(rng, 0.0, std::numbers::pi);
    bool ok = true;
    for (int i = 0; i < 4 && ok; ++i)
      for (int j = i + 1; j < 4 && ok; ++j) {
        const double d = std::abs(a[i] - a[j]);
        ok = std::min(d, std::numbers::pi - d) >= min_gap;
      }
    if (!ok) continue;
    std::array<Eigen::Vector2d, 4> out;
    for (int i = 0; i < 4; ++i) out[i] = uniform(rng, 0.5, 2.0) * Eigen::Vector2d(std::cos(a[i]), std::sin(a[i]));
    return out;
  }
}

/// Invertible matrix with singular values in [0.2, 5].
inline Eigen::MatrixXd random_invertible(std::mt19937_64& rng, int n) {
  for (;;) {
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = uniform(rng, -2.0, 2.0);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& s = svd.singularValues();
    if (s(n - 1) >= 0.2 && s(0) <= 5.0) return m;
  }
}

/// n x k matrix with orthonormal columns.
inline Eigen::MatrixXd random_orthonormal(std::mt19937_64& rng, int n, int k) {
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = uniform(rng, -1.0, 1.0);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  Eigen::MatrixXd q = qr.householderQ();
  return q.leftCols(k);
}

/// Triple with angles at least `margin` inside (0, pi).
inline AngleTriple random_allowable_triple(std::mt19937_64& rng, double margin = 0.05) {
  for (;;) {
    const double t1 = uniform(rng, margin, std::numbers::pi - margin);
    const double t2 = uniform(rng, margin, std::numbers::pi - margin);
    const double t3 = 2.0 * std::numbers::pi - t1 - t2;
    if (t3 > margin && t3 < std::numbers::pi - margin) return AngleTriple(t1, t2, t3);
  }
}

/// Quad with theta_1 + theta_3 = theta_2 + theta_4 = pi.
inline AngleQuad random_compatible_quad(std::mt19937_64& rng, double margin = 0.05) {
  const double t1 = uniform(rng, margin, std::numbers::pi - margin);
  const double t2 = uniform(rng, margin, std::numbers::pi - margin);
  return AngleQuad(t1, t2, std::numbers::pi - t1, std::numbers::pi - t2);
}

/// Cross ratio away from the degenerate values 0 and 1 (and from infinity).
inline double random_cross_ratio(std::mt19937_64& rng) {
  for (;;) {
    const double l = uniform(rng, -20.0, 20.0);
    if (std::abs(l) > 1e-3 && std::abs(l - 1.0) > 1e-3) return l;
  }
}

}  // namespace medial::testing
