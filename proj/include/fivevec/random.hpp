#pragma once

#include <cmath>
#include <cstdint>

#include "fivevec/metric.hpp"

namespace fivevec {

/// xoshiro256** (Blackman and Vigna), state seeded from a single u64 with
/// splitmix64. Doubles are (x >> 11) · 2^-53, so a seed gives the same
/// stream on every platform.
class Xoshiro256 {
 public:
  explicit Xoshiro256(std::uint64_t seed = 0) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform in [0, 1).
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
  /// Uniform integer in [lo, hi].
  int uniform_int(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(next() % span);
  }

  VectorXd uniform_vector(int n, double lo, double hi) {
    VectorXd v(n);
    for (int k = 0; k < n; ++k) v(k) = uniform(lo, hi);
    return v;
  }

  /// Rotation matrix from a uniformly sampled unit quaternion.
  MatrixXd rotation3() {
    Eigen::Vector4d q;
    double norm2 = 0.0;
    do {
      for (int k = 0; k < 4; ++k) q(k) = uniform(-1.0, 1.0);
      norm2 = q.squaredNorm();
    } while (norm2 > 1.0 || norm2 < 1e-6);
    const Eigen::Quaterniond quat(q(0), q(1), q(2), q(3));
    return quat.normalized().toRotationMatrix();
  }

  /// Random isometry of g: a rotation for euclidean3; for minkowski4 a
  /// spatial rotation times a boost of rapidity ≤ 1 along a random axis.
  MatrixXd isometry(const Metric& g) {
    const int n = g.dim();
    if (n == 3) return rotation3();
    MatrixXd rot = MatrixXd::Identity(4, 4);
    rot.bottomRightCorner(3, 3) = rotation3();
    Eigen::Vector3d axis;
    do {
      for (int k = 0; k < 3; ++k) axis(k) = uniform(-1.0, 1.0);
    } while (axis.squaredNorm() > 1.0 || axis.squaredNorm() < 1e-6);
    axis.normalize();
    const double eta = uniform(-1.0, 1.0);
    MatrixXd boost = MatrixXd::Identity(4, 4);
    boost(0, 0) = std::cosh(eta);
    boost.block(0, 1, 1, 3) = std::sinh(eta) * axis.transpose();
    boost.block(1, 0, 3, 1) = std::sinh(eta) * axis;
    boost.bottomRightCorner(3, 3) += (std::cosh(eta) - 1.0) * axis * axis.transpose();
    return rot * boost;
  }

  /// Antisymmetric n×n matrix with entries in [−s, s], exact antisymmetry.
  MatrixXd antisymmetric(int n, double s) {
    MatrixXd m = MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        m(i, j) = uniform(-s, s);
        m(j, i) = -m(i, j);
      }
    return m;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  static std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t s_[4];
};

}  // namespace fivevec
