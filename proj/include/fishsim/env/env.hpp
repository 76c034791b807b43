// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The FishSim Authors

#pragma once

#include <memory>

#include "fishsim/core/rng.hpp"
#include "fishsim/env/task.hpp"
#include "fishsim/sim/backend.hpp"

namespace fishsim::env {

/// Gym-style episode layer over either backend. Robot 0 is the agent;
/// robot 1, when present, is the scripted schooling leader.
class FishEnv {
public:
  FishEnv(std::unique_ptr<sim::Backend> backend, TaskSpec task, RewardWeights weights,
          EpisodeConfig episode, EnvOptions options, Real body_length)
      : backend_(std::move(backend)),
        task_(std::move(task)),
        weights_(weights),
        episode_(episode),
        options_(options),
        body_length_(body_length) {
    task_.validate();
    weights_.validate();
    episode_.validate();
    if (task_.type == TaskType::Schooling && backend_->n_robots() < 2) {
      throw InputError("schooling task needs a leader robot in the session");
    }
    layout_.n_joints = backend_->robot(0).skeleton.n_joints();
    layout_.task_dim = ObsLayout::task_dim_of(task_.type);
    const auto& skel = backend_->robot(0).skeleton;
    torque_limits_.resize(skel.n_joints());
    for (int i = 1, j = 0; i < skel.n_links(); ++i) {
      if (skel.links[i].joint == robot::JointType::Revolute)
        torque_limits_[j++] = skel.links[i].torque_limit;
    }
  }

  int observation_dim() const { return layout_.dim(); }
  int action_dim() const { return layout_.n_joints + 1; }
  Real control_dt() const { return backend_->dt() * episode_.sim_steps_per_control; }
  Real body_length() const { return body_length_; }
  sim::Backend& backend() { return *backend_; }
  const sim::Backend& backend() const { return *backend_; }
  const TaskSpec& task() const { return task_; }
  const RewardWeights& weights() const { return weights_; }
  const EpisodeConfig& episode_config() const { return episode_; }
  const EnvOptions& options() const { return options_; }
  int steps_taken() const { return step_count_; }
  Real episode_energy() const { return energy_; }
  Real time() const { return sim_steps_total_ * backend_->dt(); }
  const Vec3& current_target() const { return target_pos_; }

  /// Distance from the agent to the task path (path tasks) or target.
  Real current_deviation() const {
    const Vec3 x = backend_->robot(0).state.base_pos;
    if (task_.type == TaskType::PathFollowing) {
      Vec3 q;
      project_onto_path(task_.path, x, path_s_, &q);
      return (x - q).norm();
    }
    if (task_.type == TaskType::LocalPath) {
      Vec3 q;
      project_onto_path(local_path_, x, 0.0, &q);
      return (x - q).norm();
    }
    return (target_pos_ - x).norm();
  }

  Observation reset(uint64_t seed) {
    rng_.reseed(seed);
    std::vector<sim::RobotStart> starts(backend_->n_robots());
    auto& agent = starts[0];
    agent.position = Vec3::Zero();
    agent.yaw = 0.0;
    const auto& skel = backend_->robot(0).skeleton;
    agent.joint_q = VecX::Zero(skel.n_joints());
    agent.velocity = VecX::Zero(skel.n_dofs());
    for (int j = 0; j < agent.joint_q.size(); ++j) {
      const Real lim = episode_.init_joint_angle;
      agent.joint_q[j] = lim > 0 ? rng_.uniform(-lim, lim) : 0.0;
      const Real rlim = episode_.init_joint_rate;
      if (rlim > 0) agent.velocity[skel.base_dofs() + j] = rng_.uniform(-rlim, rlim);
    }
    if (episode_.init_speed > 0) {
      // random horizontal direction, random magnitude
      const Real ang = rng_.uniform(-M_PI, M_PI);
      const Real mag = episode_.init_speed * rng_.uniform();
      if (skel.floating_base()) {
        agent.velocity.segment<3>(3) = mag * Vec3(std::cos(ang), std::sin(ang), 0.0);
      }
    }

    local_d_ = local_theta_ = 0.0;
    if (task_.type == TaskType::LocalPath) {
      local_d_ = rng_.uniform(0.0, task_.local_d_max);
      local_theta_ = rng_.uniform(-task_.local_theta_max, task_.local_theta_max);
      const Real side = rng_.uniform() < 0.5 ? -1.0 : 1.0;
      // path direction theta relative to the heading; offset d to one side
      const Vec3 dir(std::cos(local_theta_), std::sin(local_theta_), 0.0);
      const Vec3 normal(-dir.y(), dir.x(), 0.0);
      const Vec3 on_path = agent.position + side * local_d_ * normal;
      local_path_ = {on_path - 2.0 * dir, on_path + 4.0 * dir};
    }
    if (task_.type == TaskType::Schooling) {
      auto& leader = starts[1];
      leader.position = agent.position - quat_exp(Vec3(0, 0, agent.yaw)).toRotationMatrix() *
                                             task_.formation_offset * 1.1;
      leader.yaw = agent.yaw;
      task_.leader.reset(leader.position, leader.yaw);
    }

    backend_->reset(starts);
    step_count_ = 0;
    sim_steps_total_ = 0;
    energy_ = 0.0;
    path_s_ = 0.0;
    episode_done_ = false;

    initial_yaw_ = backend_->robot(0).state.base_euler().z();
    refresh_target();
    initial_distance_ = (target_pos_ - backend_->robot(0).state.base_pos).norm();
    prev_d_world_ = current_d_world();
    d_dot_world_ = Vec3::Zero();
    return observe();
  }

  StepResult step(const VecX& action) {
    if (episode_done_) throw InputError("step() called on a finished episode");
    if (action.size() != action_dim()) throw InputError("action dimension mismatch");

    VecX a = action.cwiseMax(-1.0).cwiseMin(1.0);
    VecX sigma = a.head(layout_.n_joints).cwiseProduct(torque_limits_);
    backend_->set_actuation(0, sigma);
    backend_->change_bladder(0, a[layout_.n_joints] *
                                    backend_->robot(0).skeleton.bladder.rate_bound);

    StepResult out;
    for (int s = 0; s < episode_.sim_steps_per_control; ++s) {
      if (task_.type == TaskType::Schooling) {
        auto& leader = backend_->robot(1);
        backend_->set_actuation(1, task_.leader.actuation(leader.skeleton, leader.state,
                                                          time(), backend_->dt()));
      }
      const auto outcome = backend_->step();
      ++sim_steps_total_;
      out.info.out_of_bounds_markers += outcome.out_of_bounds_markers;
      if (!outcome.stable) {
        out.info.instability = true;
        break;
      }
    }
    ++step_count_;
    energy_ += sigma.squaredNorm() * control_dt();
    out.info.energy = energy_;

    const Vec3 d_now = current_d_world();
    d_dot_world_ = (d_now - prev_d_world_) / control_dt();
    prev_d_world_ = d_now;
    refresh_target();

    out.obs = observe();
    out.reward = reward_of(out.obs, sigma, weights_, task_.type, options_, &out.info);

    // termination
    const Vec3 pos = backend_->robot(0).state.base_pos;
    const Real dist = (target_pos_ - pos).norm();
    if (out.info.instability) {
      out.info.failure = true;
    } else if (task_.type == TaskType::PoseControl) {
      out.info.success = std::abs(out.obs.rot_err().norm()) < episode_.pose_success_rad;
    } else if (task_.type == TaskType::PathFollowing) {
      out.info.success = (task_.path.back() - pos).norm() < success_radius();
    } else if (task_.type != TaskType::Schooling) {
      out.info.success = dist < success_radius();
    }
    if (task_.type != TaskType::PoseControl && initial_distance_ > 1e-9 &&
        dist > episode_.fail_distance_factor * std::max(initial_distance_, body_length_)) {
      out.info.failure = true;
    }
    out.done = out.info.success || out.info.failure || step_count_ >= episode_.control_steps;
    episode_done_ = out.done;
    return out;
  }

  /// Local target 0.5 m ahead on a polyline plus the lateral offset
  /// vector, both in world coordinates.
  static std::pair<Vec3, Vec3> local_target_on(const std::vector<Vec3>& path, const Vec3& x,
                                               Real lookahead, Real& s_inout) {
    Vec3 foot;
    s_inout = project_onto_path(path, x, s_inout, &foot);
    const Vec3 target = point_at_arc_length(path, s_inout + lookahead);
    return {target, foot - x};
  }

  Observation observe() const {
    const auto& inst = backend_->robot(0);
    const auto& st = inst.state;
    const Mat3 r_robot = st.base_quat.toRotationMatrix();
    Observation obs;
    obs.layout = layout_;
    obs.v.resize(layout_.dim());
    const int nj = layout_.n_joints;
    obs.v.segment(0, nj) = st.q;
    obs.v.segment(nj, nj) = st.v.tail(nj);
    obs.v.segment<3>(2 * nj) = r_robot.transpose() * (target_pos_ - st.base_pos);
    obs.v.segment<3>(2 * nj + 3) = st.v.segment<3>(3);  // base linear velocity, body frame
    const Mat3 r_err = target_rotation().transpose() * r_robot;
    obs.v.segment<3>(2 * nj + 6) = matrix_to_euler_zyx(r_err);

    auto task = obs.v.segment(2 * nj + 9, layout_.task_dim);
    switch (task_.type) {
      case TaskType::Cruising: {
        const Vec3 p = obs.v.segment<3>(2 * nj);
        const Real dist = p.norm();
        task.head(3) = dist > 1e-9 ? Vec3(p / dist) : Vec3::Zero();
        task[3] = dist;
        break;
      }
      case TaskType::PoseControl:
        task = obs.v.segment<3>(2 * nj + 6);
        break;
      case TaskType::Schooling: {
        const auto& leader = backend_->robot(1);
        task.head(3) = r_robot.transpose() * (leader.state.base_pos - st.base_pos);
        const Vec3 v_lead_world =
            leader.state.base_quat.toRotationMatrix() * leader.state.v.segment<3>(3);
        const Vec3 v_self_world = r_robot * st.v.segment<3>(3);
        task.segment(3, 3) = r_robot.transpose() * (v_lead_world - v_self_world);
        task[6] = wrap_angle(leader.state.base_euler().z() - st.base_euler().z());
        break;
      }
      case TaskType::PathFollowing:
      case TaskType::LocalPath:
        task.head(3) = r_robot.transpose() * prev_d_world_;
        task.segment(3, 3) = r_robot.transpose() * d_dot_world_;
        break;
    }
    return obs;
  }

private:
  Real success_radius() const { return episode_.success_radius_bl * body_length_; }

  /// Lateral offset to the task path (world), zero for non-path tasks.
  Vec3 current_d_world() const {
    const Vec3 x = backend_->robot(0).state.base_pos;
    if (task_.type == TaskType::PathFollowing) {
      Real s = path_s_;
      auto [target, d] = local_target_on(task_.path, x, task_.lookahead, s);
      return d;
    }
    if (task_.type == TaskType::LocalPath) {
      Real s = 0.0;
      auto [target, d] = local_target_on(local_path_, x, task_.lookahead, s);
      return d;
    }
    return Vec3::Zero();
  }

  void refresh_target() {
    const auto& st = backend_->robot(0).state;
    switch (task_.type) {
      case TaskType::Cruising:
        target_pos_ = task_.cruise_target;
        break;
      case TaskType::PoseControl:
        target_pos_ = Vec3::Zero();  // position-free task
        break;
      case TaskType::Schooling: {
        const auto& leader = backend_->robot(1);
        target_pos_ = leader.state.base_pos +
                      leader.state.base_quat.toRotationMatrix() * task_.formation_offset;
        break;
      }
      case TaskType::PathFollowing: {
        auto [target, d] = local_target_on(task_.path, st.base_pos, task_.lookahead, path_s_);
        target_pos_ = target;
        break;
      }
      case TaskType::LocalPath: {
        Real s = 0.0;
        auto [target, d] = local_target_on(local_path_, st.base_pos, task_.lookahead, s);
        target_pos_ = target;
        break;
      }
    }
  }

  Mat3 target_rotation() const {
    const auto& st = backend_->robot(0).state;
    switch (task_.type) {
      case TaskType::PoseControl:
        return euler_zyx_to_matrix(Vec3(0, 0, initial_yaw_ + task_.pose_turn));
      case TaskType::Schooling:
        return euler_zyx_to_matrix(Vec3(0, 0, backend_->robot(1).state.base_euler().z()));
      case TaskType::Cruising:
      case TaskType::PathFollowing:
      case TaskType::LocalPath: {
        const Vec3 to_target = target_pos_ - st.base_pos;
        if (to_target.head<2>().norm() < 1e-9) {
          return euler_zyx_to_matrix(Vec3(0, 0, st.base_euler().z()));
        }
        return euler_zyx_to_matrix(Vec3(0, 0, std::atan2(to_target.y(), to_target.x())));
      }
    }
    return Mat3::Identity();
  }

  std::unique_ptr<sim::Backend> backend_;
  TaskSpec task_;
  RewardWeights weights_;
  EpisodeConfig episode_;
  EnvOptions options_;
  Real body_length_;
  ObsLayout layout_;
  VecX torque_limits_;
  Rng rng_{0};

  int step_count_ = 0;
  long long sim_steps_total_ = 0;
  Real energy_ = 0.0;
  bool episode_done_ = true;
  Real initial_yaw_ = 0.0;
  Real initial_distance_ = 0.0;
  Vec3 target_pos_ = Vec3::Zero();
  Real path_s_ = 0.0;
  std::vector<Vec3> local_path_;
  Real local_d_ = 0.0, local_theta_ = 0.0;
  Vec3 prev_d_world_ = Vec3::Zero();
  Vec3 d_dot_world_ = Vec3::Zero();

public:
  // exposed for the sampling-distribution checks
  Real last_local_d() const { return local_d_; }
  Real last_local_theta() const { return local_theta_; }
};

}  // namespace fishsim::env
