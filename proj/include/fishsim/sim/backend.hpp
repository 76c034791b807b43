// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The FishSim Authors

#pragma once

#include <memory>
#include <vector>

#include "fishsim/ib/coupling.hpp"
#include "fishsim/robot/model_builder.hpp"
#include "fishsim/robot/sampling.hpp"

namespace fishsim::sim {

/// One robot inside a simulation session.
struct RobotInstance {
  robot::Skeleton skeleton;  // owns bladder state
  robot::RestPose rest;
  robot::SurfaceSamples samples;
  robot::JointState state;
  VecX actuation;  // physical joint torques, held between control steps
  VecX tau_ext;    // last generalized external force
  ib::CouplingStats stats;

  Vec3 com_world(const robot::KinematicsCache& kc) const {
    Vec3 weighted = Vec3::Zero();
    Real mass = 0.0;
    for (int i = 0; i < skeleton.n_links(); ++i) {
      const auto& l = skeleton.links[i];
      weighted += l.mass * (kc.p_world[i] + kc.R_world[i] * l.com);
      mass += l.mass;
    }
    return weighted / mass;
  }
};

struct StepOutcome {
  bool stable = true;
  int out_of_bounds_markers = 0;
};

struct RobotStart {
  Vec3 position = Vec3::Zero();
  Real yaw = 0.0;
  VecX joint_q;       // optional, defaults to zero
  VecX velocity;      // optional generalized velocity
};

/// Common surface of the physical (IB-LBM) and empirical backends; the
/// task layer is written against this interface only.
class Backend {
public:
  virtual ~Backend() = default;

  virtual Real dt() const = 0;
  virtual Real fluid_density() const = 0;
  virtual int n_robots() const = 0;
  virtual RobotInstance& robot(int i) = 0;
  virtual const RobotInstance& robot(int i) const = 0;

  /// Re-pose robots, quiet the fluid, zero actuation.
  virtual void reset(const std::vector<RobotStart>& starts) = 0;

  /// Advance one physical time step with the held actuation.
  virtual StepOutcome step() = 0;

  void set_actuation(int i, const VecX& sigma) { robot(i).actuation = sigma; }
  void change_bladder(int i, Real dv) { robot(i).skeleton.bladder.apply_change(dv); }
};

inline void apply_start(RobotInstance& inst, const RobotStart& start, Real rho_fluid) {
  auto st = robot::JointState::zero(inst.skeleton);
  st.base_pos = start.position;
  st.base_quat = quat_exp(Vec3(0, 0, start.yaw));
  if (start.joint_q.size() > 0) {
    if (start.joint_q.size() != st.q.size()) throw InputError("joint_q size mismatch");
    st.q = start.joint_q;
  }
  if (start.velocity.size() > 0) {
    if (start.velocity.size() != st.v.size()) throw InputError("velocity size mismatch");
    st.v = start.velocity;
  }
  inst.state = st;
  inst.actuation = VecX::Zero(inst.skeleton.n_joints());
  inst.tau_ext = VecX::Zero(inst.skeleton.n_dofs());
  // bladder back to neutral trim in the session's fluid
  auto& b = inst.skeleton.bladder;
  b.volume = std::clamp(inst.skeleton.neutral_trim_volume(rho_fluid), b.volume_min, b.volume_max);
}

}  // namespace fishsim::sim
