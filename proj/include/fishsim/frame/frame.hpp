// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The FishSim Authors

#pragma once

#include "fishsim/lbm/lattice.hpp"

namespace fishsim::frame {

/// Accelerating local frame the fluid box lives in. Translation state
/// is world-frame; rotation is carried as a quaternion with world-frame
/// angular velocity/acceleration, exposed as Z-Y-X Euler angles.
struct FrameState {
  Vec3 p = Vec3::Zero();
  Vec3 pd = Vec3::Zero();
  Vec3 pdd = Vec3::Zero();
  Quat rot = Quat::Identity();
  Vec3 omega = Vec3::Zero();
  Vec3 alpha = Vec3::Zero();

  Mat3 rotation() const { return rot.toRotationMatrix(); }
  Vec3 euler() const { return matrix_to_euler_zyx(rotation()); }

  Vec3 world_to_frame_point(const Vec3& x_world) const {
    return rotation().transpose() * (x_world - p);
  }
  Vec3 frame_to_world_point(const Vec3& x_frame) const {
    return p + rotation() * x_frame;
  }
  Vec3 world_to_frame_vector(const Vec3& v) const { return rotation().transpose() * v; }
  Vec3 frame_to_world_vector(const Vec3& v) const { return rotation() * v; }

  /// Fluid velocity conversion at a frame point x' (m):
  /// u_world = pd + R (u' + omega' x x').
  Vec3 fluid_velocity_to_world(const Vec3& x_frame, const Vec3& u_frame) const {
    const Vec3 omega_f = world_to_frame_vector(omega);
    return pd + rotation() * (u_frame + omega_f.cross(x_frame));
  }
  Vec3 body_velocity_to_frame(const Vec3& x_frame, const Vec3& u_world) const {
    const Vec3 omega_f = world_to_frame_vector(omega);
    return rotation().transpose() * (u_world - pd) - omega_f.cross(x_frame);
  }
};

/// Non-inertial force per unit mass at a frame point:
/// F = -R^T pdd - alpha' x x' - omega' x (omega' x x') - 2 omega' x u'.
inline Vec3 virtual_force(const FrameState& f, const Vec3& x_frame, const Vec3& u_frame) {
  const Mat3 rt = f.rotation().transpose();
  const Vec3 omega_f = rt * f.omega;
  const Vec3 alpha_f = rt * f.alpha;
  return -(rt * f.pdd) - alpha_f.cross(x_frame) - omega_f.cross(omega_f.cross(x_frame)) -
         2.0 * omega_f.cross(u_frame);
}

enum class FollowMode { None, Translation, TranslationYaw, Full };

inline FollowMode parse_follow_mode(const std::string& s) {
  if (s == "none") return FollowMode::None;
  if (s == "translation") return FollowMode::Translation;
  if (s == "translation_yaw") return FollowMode::TranslationYaw;
  if (s == "full") return FollowMode::Full;
  throw InputError("unknown frame mode '" + s + "'");
}

/// Second-order critically damped tracker of the robot base. Because
/// the frame state is produced by integrating the filter acceleration,
/// its derivatives are consistent with its own trajectory by
/// construction, and gait-frequency jitter is attenuated before it can
/// enter the virtual force.
class FrameFollower {
public:
  FrameFollower() = default;
  FrameFollower(FollowMode mode, Real time_constant)
      : mode_(mode), wn_(1.0 / time_constant) {}

  FollowMode mode() const { return mode_; }
  const FrameState& state() const { return frame_; }
  FrameState& state() { return frame_; }

  /// Snap to a target with zero derivatives (episode reset).
  void reset(const Vec3& p, Real yaw) {
    frame_ = FrameState{};
    frame_.p = p;
    if (mode_ == FollowMode::TranslationYaw || mode_ == FollowMode::Full) {
      frame_.rot = quat_exp(Vec3(0, 0, yaw));
    }
  }

  /// One filter step toward the robot base pose.
  void step(const Vec3& target_pos, const Quat& target_rot, Real dt) {
    if (mode_ == FollowMode::None) return;
    frame_.pdd = wn_ * wn_ * (target_pos - frame_.p) - 2.0 * wn_ * frame_.pd;
    frame_.pd += dt * frame_.pdd;
    frame_.p += dt * frame_.pd;

    if (mode_ == FollowMode::Translation) return;
    Vec3 err;
    if (mode_ == FollowMode::TranslationYaw) {
      const Real yaw_t = matrix_to_euler_zyx(target_rot.toRotationMatrix()).z();
      const Real yaw_f = frame_.euler().z();
      err = Vec3(0, 0, wrap_angle(yaw_t - yaw_f));
    } else {
      const Quat dq = (target_rot * frame_.rot.conjugate()).normalized();
      Eigen::AngleAxisd aa(dq);
      Real angle = aa.angle();
      if (angle > M_PI) angle -= 2.0 * M_PI;
      err = angle * aa.axis();
    }
    frame_.alpha = wn_ * wn_ * err - 2.0 * wn_ * frame_.omega;
    frame_.omega += dt * frame_.alpha;
    frame_.rot = (quat_exp(frame_.omega * dt) * frame_.rot).normalized();
    if (mode_ == FollowMode::TranslationYaw) {
      // numerically pin the rotation to pure yaw
      const Real yaw = frame_.euler().z();
      frame_.rot = quat_exp(Vec3(0, 0, yaw));
      frame_.omega.x() = frame_.omega.y() = 0.0;
      frame_.alpha.x() = frame_.alpha.y() = 0.0;
    }
  }

private:
  FollowMode mode_ = FollowMode::Translation;
  FrameState frame_;
  Real wn_ = 5.0;  // 0.2 s time constant
};

/// Shifts lattice contents by an integer cell offset (contents move by
/// -shift; the robot returns toward the domain center). Exposed cells
/// are refilled with the nearest surviving cell's populations, and the
/// frame origin advances by R * shift * dx so world positions are
/// continuous across the event.
inline void recenter(lbm::LatticeGrid& grid, FrameState& frame, const Index3& shift) {
  const Index3 d = grid.dims();
  const size_t n = grid.n_cells();
  auto& src = grid.front();
  auto& dst = grid.back();
#pragma omp parallel for schedule(static)
  for (int z = 0; z < d[2]; ++z) {
    for (int y = 0; y < d[1]; ++y) {
      for (int x = 0; x < d[0]; ++x) {
        // clamped source: exposed faces copy the nearest interior data
        const int sx = std::clamp(x + shift[0], 0, d[0] - 1);
        const int sy = std::clamp(y + shift[1], 0, d[1] - 1);
        const int sz = std::clamp(z + shift[2], 0, d[2] - 1);
        const size_t cd = grid.cell_index(x, y, z);
        const size_t cs = grid.cell_index(sx, sy, sz);
        for (int i = 0; i < lbm::D3Q19::Q; ++i) dst[i * n + cd] = src[i * n + cs];
      }
    }
  }
  grid.swap_buffers();
  const Vec3 offset(shift[0], shift[1], shift[2]);
  frame.p += frame.rotation() * (offset * grid.units().dx);
}

}  // namespace fishsim::frame
