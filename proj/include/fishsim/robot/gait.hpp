// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The FishSim Authors

#pragma once

#include "fishsim/robot/skeleton.hpp"

namespace fishsim::robot {

/// Scripted traveling-wave actuation: sigma_j = amp * tau_max_j *
/// sin(2 pi f t - j * phase_step + bias). Drives the spine joints only
/// (joints whose axis is z in the link frame); side-fin joints hold zero.
struct SineGait {
  Real amplitude = 0.6;    // fraction of each joint's torque limit
  Real frequency = 2.0;    // Hz
  Real phase_step = 0.8;   // rad per joint down the chain
  Real turn_bias = 0.0;    // constant bias as a fraction of the limit (steering)

  /// Smooth start-up over the first period avoids the net angular kick
  /// of an abrupt half-stroke.
  Real ramp(Real t) const {
    const Real T = 1.0 / frequency;
    return t < T ? std::sin(0.5 * M_PI * t / T) : 1.0;
  }

  VecX actuation(const Skeleton& skel, Real t) const {
    VecX sigma = VecX::Zero(skel.n_joints());
    const Real r = ramp(t);
    int spine_rank = 0;
    for (int i = 1; i < skel.n_links(); ++i) {
      const auto& l = skel.links[i];
      if (l.joint != JointType::Revolute) continue;
      const int ji = skel.joint_index(i);
      if (std::abs(l.axis.normalized().z()) > 0.9) {
        sigma[ji] =
            l.torque_limit *
            (r * amplitude * std::sin(2.0 * M_PI * frequency * t - spine_rank * phase_step) +
             turn_bias);
        ++spine_rank;
      }
    }
    return sigma;
  }
};

/// Course-hold wrapper: the schooling leader runs the gait with a
/// steering bias from filtered yaw and cross-track errors, so it holds
/// a straight line despite the gait-frequency body oscillation.
struct LeaderScript {
  SineGait gait;
  Real target_yaw = 0.0;
  Vec3 line_point = Vec3::Zero();  // a point on the desired track
  Real heading_gain = 0.8;         // bias per rad of filtered yaw error
  Real cross_track_gain = 9.0;     // bias per meter of filtered offset
  Real filter_tc = 0.2;            // s

  Real yaw_filtered = 0.0;
  Real cross_filtered = 0.0;
  bool initialized = false;

  void reset(const Vec3& start, Real yaw) {
    line_point = start;
    target_yaw = yaw;
    yaw_filtered = yaw;
    cross_filtered = 0.0;
    initialized = true;
  }

  VecX actuation(const Skeleton& skel, const JointState& st, Real t, Real dt) {
    const Real yaw = st.base_euler().z();
    const Vec3 track(std::cos(target_yaw), std::sin(target_yaw), 0.0);
    const Vec3 normal(-track.y(), track.x(), 0.0);
    const Real cross = (st.base_pos - line_point).dot(normal);
    if (!initialized) {
      yaw_filtered = yaw;
      cross_filtered = cross;
      initialized = true;
    }
    const Real a = std::min(dt / filter_tc, 1.0);
    yaw_filtered += a * (wrap_angle(yaw - yaw_filtered));
    cross_filtered += a * (cross - cross_filtered);

    SineGait g = gait;
    // aim slightly back toward the track, then close the yaw loop
    // (positive bias turns the body toward negative yaw)
    const Real desired_yaw =
        target_yaw - std::clamp(cross_track_gain * cross_filtered, -0.5, 0.5);
    g.turn_bias = std::clamp(-heading_gain * wrap_angle(desired_yaw - yaw_filtered), -0.4, 0.4);
    return g.actuation(skel, t);
  }
};

}  // namespace fishsim::robot
