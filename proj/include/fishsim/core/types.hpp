// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The FishSim Authors

#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace fishsim {

using Real = double;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using Quat = Eigen::Quaterniond;

using Index3 = std::array<int, 3>;

/// Thrown on malformed inputs (config files, model files, bad dimensions).
class InputError : public std::runtime_error {
public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when a numerical routine detects an ill-posed state
/// (non-SPD mass matrix, non-finite field, failed bracketing).
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

inline Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return m;
}

/// Z-Y-X (yaw, pitch, roll) Euler angles -> rotation matrix.
/// R = Rz(yaw) * Ry(pitch) * Rx(roll). Returned vector ordering is
/// (roll, pitch, yaw) so that v[2] is the yaw used throughout.
inline Mat3 euler_zyx_to_matrix(const Vec3& rpy) {
  return (Eigen::AngleAxisd(rpy.z(), Vec3::UnitZ()) *
          Eigen::AngleAxisd(rpy.y(), Vec3::UnitY()) *
          Eigen::AngleAxisd(rpy.x(), Vec3::UnitX()))
      .toRotationMatrix();
}

/// Inverse of euler_zyx_to_matrix. Pitch is clamped away from the
/// +-pi/2 singularity by the usual asin clamp.
inline Vec3 matrix_to_euler_zyx(const Mat3& r) {
  Vec3 rpy;
  rpy.y() = std::asin(std::clamp(-r(2, 0), -1.0, 1.0));
  if (std::abs(r(2, 0)) < 1.0 - 1e-12) {
    rpy.x() = std::atan2(r(2, 1), r(2, 2));
    rpy.z() = std::atan2(r(1, 0), r(0, 0));
  } else {
    rpy.x() = std::atan2(-r(1, 2), r(1, 1));
    rpy.z() = 0.0;
  }
  return rpy;
}

/// Quaternion for a rotation vector (angle*axis), safe at small angles.
inline Quat quat_exp(const Vec3& w) {
  const Real angle = w.norm();
  if (angle < 1e-12) {
    Quat q(1.0, 0.5 * w.x(), 0.5 * w.y(), 0.5 * w.z());
    q.normalize();
    return q;
  }
  return Quat(Eigen::AngleAxisd(angle, w / angle));
}

inline Real wrap_angle(Real a) {
  while (a > M_PI) a -= 2.0 * M_PI;
  while (a < -M_PI) a += 2.0 * M_PI;
  return a;
}

}  // namespace fishsim
