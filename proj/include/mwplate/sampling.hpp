#pragma once

#include "mwplate/linalg.hpp"

#include <limits>
#include <random>

namespace mwplate {

using Rng = std::mt19937_64;

/// Haar-uniform rotation from a normalized Gaussian quaternion.
inline Mat3 random_rotation(Rng& rng) {
  std::normal_distribution<double> normal;
  Eigen::Quaterniond q(normal(rng), normal(rng), normal(rng), normal(rng));
  q.normalize();
  return q.toRotationMatrix();
}

inline Mat3 random_matrix(Rng& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> uniform(-scale, scale);
  Mat3 A;
  for (int i = 0; i < 9; ++i) A(i / 3, i % 3) = uniform(rng);
  return A;
}

/// Symmetric positive-definite matrix with eigenvalues in [lo, hi].
inline Mat3 random_spd(Rng& rng, double lo = 0.5, double hi = 2.0) {
  std::uniform_real_distribution<double> uniform(lo, hi);
  const Mat3 Q = random_rotation(rng);
  const Vec3 d(uniform(rng), uniform(rng), uniform(rng));
  return sym(Mat3(Q * d.asDiagonal() * Q.transpose()));
}

/// Brute-force max over sampled rotations of trace(R^T M).
inline double sampled_procrustes_max(const Mat3& M, int samples, Rng& rng) {
  double best = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < samples; ++k) {
    const Mat3 R = random_rotation(rng);
    best = std::max(best, (R.transpose() * M).trace());
  }
  return best;
}

}  // namespace mwplate
