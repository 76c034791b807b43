// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The FishSim Authors

#pragma once

#include "fishsim/core/types.hpp"

namespace fishsim::robot {

// 6D spatial vectors in Featherstone layout: angular on top, linear
// below. Motion vectors are [omega; v], force vectors [couple; force].

/// Plucker coordinate transform B <- A given the rotation E (A coords to
/// B coords) and r, the origin of B expressed in A.
struct SpatialTransform {
  Mat3 E = Mat3::Identity();
  Vec3 r = Vec3::Zero();

  static SpatialTransform identity() { return {}; }

  Vec6 apply_motion(const Vec6& m) const {
    Vec6 out;
    out.head<3>() = E * m.head<3>();
    out.tail<3>() = E * (m.tail<3>() - r.cross(m.head<3>()));
    return out;
  }

  /// Force transform B <- A (covariant counterpart of apply_motion).
  Vec6 apply_force(const Vec6& f) const {
    Vec6 out;
    out.head<3>() = E * (f.head<3>() - r.cross(f.tail<3>()));
    out.tail<3>() = E * f.tail<3>();
    return out;
  }

  /// Transpose action: maps a force in B coords back to A coords.
  Vec6 transpose_force(const Vec6& f) const {
    Vec6 out;
    out.tail<3>() = E.transpose() * f.tail<3>();
    out.head<3>() = E.transpose() * f.head<3>() + r.cross(out.tail<3>());
    return out;
  }

  /// 6x6 motion matrix, used by the composite-rigid-body assembly.
  Mat6 motion_matrix() const {
    Mat6 x = Mat6::Zero();
    x.topLeftCorner<3, 3>() = E;
    x.bottomRightCorner<3, 3>() = E;
    x.bottomLeftCorner<3, 3>() = -E * skew(r);
    return x;
  }
};

/// Motion cross product v x m.
inline Vec6 cross_motion(const Vec6& v, const Vec6& m) {
  Vec6 out;
  out.head<3>() = v.head<3>().cross(m.head<3>());
  out.tail<3>() = v.head<3>().cross(m.tail<3>()) + v.tail<3>().cross(m.head<3>());
  return out;
}

/// Force cross product v x* f.
inline Vec6 cross_force(const Vec6& v, const Vec6& f) {
  Vec6 out;
  out.head<3>() = v.head<3>().cross(f.head<3>()) + v.tail<3>().cross(f.tail<3>());
  out.tail<3>() = v.head<3>().cross(f.tail<3>());
  return out;
}

/// Spatial inertia about the link-frame origin from mass, COM offset
/// and the rotational inertia about the COM.
inline Mat6 spatial_inertia(Real mass, const Vec3& com, const Mat3& inertia_com) {
  const Mat3 c = skew(com);
  Mat6 I;
  I.topLeftCorner<3, 3>() = inertia_com + mass * c * c.transpose();
  I.topRightCorner<3, 3>() = mass * c;
  I.bottomLeftCorner<3, 3>() = mass * c.transpose();
  I.bottomRightCorner<3, 3>() = mass * Mat3::Identity();
  return I;
}

}  // namespace fishsim::robot
