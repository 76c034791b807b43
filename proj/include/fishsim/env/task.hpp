// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The FishSim Authors

#pragma once

#include <string>
#include <vector>

#include "fishsim/core/types.hpp"
#include "fishsim/robot/gait.hpp"

namespace fishsim::env {

struct RewardWeights {
  Real w_p = 0.0;
  Real w_v = 0.0;
  Real w_r = 0.0;
  Real w_e = 0.0;
  Real w_task = 0.0;

  void validate() const {
    if (w_p < 0 || w_v < 0 || w_r < 0 || w_e < 0 || w_task < 0) {
      throw InputError("reward weights must be non-negative");
    }
  }
};

enum class TaskType { Cruising, PoseControl, Schooling, PathFollowing, LocalPath };

inline TaskType parse_task_type(const std::string& s) {
  if (s == "cruising") return TaskType::Cruising;
  if (s == "pose_control") return TaskType::PoseControl;
  if (s == "schooling") return TaskType::Schooling;
  if (s == "path_following") return TaskType::PathFollowing;
  if (s == "local_path") return TaskType::LocalPath;
  throw InputError("unknown task type '" + s + "'");
}

inline const char* task_type_name(TaskType t) {
  switch (t) {
    case TaskType::Cruising: return "cruising";
    case TaskType::PoseControl: return "pose_control";
    case TaskType::Schooling: return "schooling";
    case TaskType::PathFollowing: return "path_following";
    case TaskType::LocalPath: return "local_path";
  }
  return "?";
}

struct TaskSpec {
  TaskType type = TaskType::Cruising;

  Vec3 cruise_target = Vec3(0.5, 0, 0);

  Real pose_turn = M_PI;  // target yaw offset from the initial yaw

  std::vector<Vec3> path;  // world polyline for path following
  Real lookahead = 0.5;    // m ahead on the path

  Real local_d_max = 1.0;           // m
  Real local_theta_max = M_PI / 2;  // rad

  robot::LeaderScript leader;                 // schooling leader control
  Vec3 formation_offset = Vec3(-0.55, 0, 0);  // desired follower spot, leader frame

  void validate() const {
    if (!cruise_target.allFinite()) throw InputError("cruise target must be finite");
    if (type == TaskType::PathFollowing) {
      if (path.size() < 2) throw InputError("path needs at least two waypoints");
      for (size_t i = 1; i < path.size(); ++i) {
        if ((path[i] - path[i - 1]).norm() < 1e-9)
          throw InputError("degenerate path segment " + std::to_string(i));
      }
    }
    if (local_d_max < 0 || local_theta_max < 0) throw InputError("local path ranges must be >= 0");
  }
};

/// Fixed per-task observation layout:
///   [ q (nj) | qd (nj) | p (3) | v (3) | r (3) | task (...) ]
/// Everything is expressed in the robot's own frame. p points to the
/// current target; r is the Euler error to the target orientation.
struct ObsLayout {
  int n_joints = 0;
  int task_dim = 0;
  int dim() const { return 2 * n_joints + 9 + task_dim; }

  static int task_dim_of(TaskType t) {
    switch (t) {
      case TaskType::Cruising: return 4;       // target direction + distance
      case TaskType::PoseControl: return 3;    // rotation error
      case TaskType::Schooling: return 7;      // rel pos, rel vel, rel yaw
      case TaskType::PathFollowing: return 6;  // d and d-dot
      case TaskType::LocalPath: return 6;
    }
    return 0;
  }
};

struct Observation {
  VecX v;
  ObsLayout layout;

  auto q() const { return v.segment(0, layout.n_joints); }
  auto qd() const { return v.segment(layout.n_joints, layout.n_joints); }
  Vec3 p() const { return v.segment<3>(2 * layout.n_joints); }
  Vec3 vel() const { return v.segment<3>(2 * layout.n_joints + 3); }
  Vec3 rot_err() const { return v.segment<3>(2 * layout.n_joints + 6); }
  auto task() const { return v.segment(2 * layout.n_joints + 9, layout.task_dim); }
};

struct EpisodeConfig {
  int control_steps = 50;
  int sim_steps_per_control = 50;
  Real success_radius_bl = 0.1;    // body lengths
  Real fail_distance_factor = 2.0;
  Real pose_success_rad = 0.1;
  Real init_speed = 0.0;        // m/s, random base velocity magnitude bound
  Real init_joint_angle = 0.0;  // rad
  Real init_joint_rate = 0.0;   // rad/s

  void validate() const {
    if (control_steps <= 0 || sim_steps_per_control <= 0)
      throw InputError("episode step counts must be positive");
    if (init_speed < 0 || init_joint_angle < 0 || init_joint_rate < 0)
      throw InputError("randomization ranges must be >= 0");
  }
};

struct StepInfo {
  bool success = false;
  bool failure = false;
  bool instability = false;
  int out_of_bounds_markers = 0;
  Real r_p = 0, r_v = 0, r_r = 0, r_e = 0, r_task = 0;
  Real energy = 0.0;  // cumulative sum ||tau||^2 dt this episode
};

struct StepResult {
  Observation obs;
  Real reward = 0.0;
  bool done = false;
  StepInfo info;
};

struct EnvOptions {
  bool velocity_toward_target = true;  // project r_v onto the target direction
  bool effort_as_penalty = true;       // subtract the effort term
};

/// Reward as a pure function of observation and the applied generalized
/// actuation (physical torques). Task geometry is already folded into
/// the observation, so recomputing this externally must match exactly.
inline Real reward_of(const Observation& obs, const VecX& tau, const RewardWeights& w,
                      TaskType type, const EnvOptions& opt, StepInfo* terms = nullptr) {
  const Real r_p = std::exp(-obs.p().norm());
  Real r_v;
  if (opt.velocity_toward_target) {
    const Real dist = obs.p().norm();
    r_v = dist > 1e-9 ? obs.vel().dot(obs.p() / dist) : obs.vel().norm();
  } else {
    r_v = obs.vel().norm();
  }
  const Real r_r = 1.0 - obs.rot_err().norm();
  const Real r_e = tau.squaredNorm();
  Real r_task = 0.0;
  if (type == TaskType::PathFollowing || type == TaskType::LocalPath) {
    const Vec3 d = obs.task().head(3);
    const Vec3 d_dot = obs.task().tail(3);
    r_task = d_dot.norm() + std::exp(-d.norm());
  }
  if (terms) {
    terms->r_p = r_p;
    terms->r_v = r_v;
    terms->r_r = r_r;
    terms->r_e = r_e;
    terms->r_task = r_task;
  }
  const Real effort = opt.effort_as_penalty ? -w.w_e * r_e : w.w_e * r_e;
  return w.w_p * r_p + w.w_v * r_v + w.w_r * r_r + effort + w.w_task * r_task;
}

/// Closest point on a polyline with an arc-length continuity rule:
/// among near-minimal candidates, prefer the one closest to the
/// previous arc-length parameter. Returns the arc length of the
/// projection; `point` receives the projected position.
inline Real project_onto_path(const std::vector<Vec3>& path, const Vec3& x, Real s_prev,
                              Vec3* point = nullptr) {
  Real best_d = std::numeric_limits<Real>::max();
  struct Candidate {
    Real s;
    Real dist;
    Vec3 point;
  };
  std::vector<Candidate> cands;
  Real s0 = 0.0;
  for (size_t i = 0; i + 1 < path.size(); ++i) {
    const Vec3 a = path[i], b = path[i + 1];
    const Real len = (b - a).norm();
    const Real t = std::clamp((x - a).dot(b - a) / (len * len), 0.0, 1.0);
    const Vec3 q = a + t * (b - a);
    const Real dist = (x - q).norm();
    cands.push_back({s0 + t * len, dist, q});
    best_d = std::min(best_d, dist);
    s0 += len;
  }
  const Candidate* pick = nullptr;
  for (const auto& c : cands) {
    if (c.dist <= best_d + 1e-9 + 0.05 * best_d) {
      if (!pick || std::abs(c.s - s_prev) < std::abs(pick->s - s_prev)) pick = &c;
    }
  }
  if (point) *point = pick->point;
  return pick->s;
}

inline Real path_length(const std::vector<Vec3>& path) {
  Real s = 0.0;
  for (size_t i = 1; i < path.size(); ++i) s += (path[i] - path[i - 1]).norm();
  return s;
}

/// Point at a given arc length along the polyline (clamped to the end).
inline Vec3 point_at_arc_length(const std::vector<Vec3>& path, Real s) {
  if (s <= 0.0) return path.front();
  for (size_t i = 0; i + 1 < path.size(); ++i) {
    const Real len = (path[i + 1] - path[i]).norm();
    if (s <= len) return path[i] + (s / len) * (path[i + 1] - path[i]);
    s -= len;
  }
  return path.back();
}

}  // namespace fishsim::env
