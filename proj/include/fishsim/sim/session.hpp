// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The FishSim Authors

#pragma once

#include "fishsim/frame/frame.hpp"
#include "fishsim/lbm/solver.hpp"
#include "fishsim/sim/backend.hpp"

namespace fishsim::sim {

struct SessionConfig {
  Index3 dims = {64, 64, 64};
  UnitMap units;
  ib::IBKernel kernel;
  ib::WallCondition wall = ib::WallCondition::Slip;
  frame::FollowMode frame_mode = frame::FollowMode::TranslationYaw;
  Real frame_time_constant = 0.2;
  Real recenter_threshold_cells = 2.0;
  Vec3 gravity = Vec3(0, 0, -9.81);
  int substeps = 4;
  Real marker_spacing = 0.0;  // 0: one lattice spacing
  int tracked_robot = 0;      // robot the frame follows
};

/// Two-way coupled IB-LBM simulation in a moving local frame. Robot
/// dynamics run in world coordinates; only the fluid lives in the
/// frame. With frame_mode None this is the static global-domain solver.
class CoupledSession : public Backend {
public:
  explicit CoupledSession(const SessionConfig& cfg) : cfg_(cfg) {
    cfg_.units.validate();
    if (cfg_.marker_spacing <= 0.0) cfg_.marker_spacing = cfg_.units.dx;
    if (cfg_.marker_spacing > cfg_.units.dx + 1e-12) {
      throw InputError("marker spacing must not exceed the lattice dx (markers would alias)");
    }
    grid_ = lbm::LatticeGrid(cfg_.dims, cfg_.units, lbm::BoundaryMode::OpenExtrapolated);
    force_.resize(cfg_.dims);
    follower_ = frame::FrameFollower(cfg_.frame_mode, cfg_.frame_time_constant);
  }

  int add_robot(const robot::RobotModel& model, const RobotStart& start,
                uint64_t sample_seed = 1234) {
    RobotInstance inst;
    inst.skeleton = model.skeleton;
    inst.rest = robot::RestPose::of(inst.skeleton);
    inst.samples = robot::sample_surface(model.mesh, cfg_.marker_spacing, sample_seed);
    apply_start(inst, start, cfg_.units.rho_phys);
    robots_.push_back(std::move(inst));
    if (static_cast<int>(robots_.size()) - 1 == cfg_.tracked_robot) center_frame_on_robot();
    return static_cast<int>(robots_.size()) - 1;
  }

  Real dt() const override { return cfg_.units.dt_phys; }
  Real fluid_density() const override { return cfg_.units.rho_phys; }
  int n_robots() const override { return static_cast<int>(robots_.size()); }
  RobotInstance& robot(int i) override { return robots_.at(i); }
  const RobotInstance& robot(int i) const override { return robots_.at(i); }

  const lbm::LatticeGrid& grid() const { return grid_; }
  const lbm::FluidMacro& macro() const { return macro_; }
  const frame::FrameState& frame_state() const { return follower_.state(); }
  const SessionConfig& config() const { return cfg_; }

  void reset(const std::vector<RobotStart>& starts) override {
    if (starts.size() != robots_.size()) throw InputError("reset: robot count mismatch");
    for (size_t i = 0; i < robots_.size(); ++i) {
      apply_start(robots_[i], starts[i], cfg_.units.rho_phys);
    }
    grid_.reset_to_rest();
    force_.clear();
    center_frame_on_robot();
    time_ = 0.0;
  }

  /// Frame-coordinate position of lattice cell (i,j,k), meters.
  Vec3 cell_frame_position(int i, int j, int k) const {
    return Vec3((i - 0.5 * (cfg_.dims[0] - 1)) * cfg_.units.dx,
                (j - 0.5 * (cfg_.dims[1] - 1)) * cfg_.units.dx,
                (k - 0.5 * (cfg_.dims[2] - 1)) * cfg_.units.dx);
  }
  Vec3 frame_to_lattice(const Vec3& x_frame) const {
    return x_frame / cfg_.units.dx +
           0.5 * Vec3(cfg_.dims[0] - 1, cfg_.dims[1] - 1, cfg_.dims[2] - 1);
  }

  StepOutcome step() override {
    const Real dt = cfg_.units.dt_phys;
    const Real dx = cfg_.units.dx;
    const auto& fs = follower_.state();
    const Mat3 r_frame = fs.rotation();
    StepOutcome outcome;

    // bare macroscopic state (pre-force) for marker interpolation
    force_.clear();
    lbm::macroscopic_into(grid_, force_, macro_);
    if (macro_.n_nonpositive_rho > 0) outcome.stable = false;

    // markers: skin, interpolate, force, spread; spreading stays serial
    // for bitwise determinism
    std::vector<robot::KinematicsCache> caches(robots_.size());
    for (size_t ri = 0; ri < robots_.size(); ++ri) {
      auto& inst = robots_[ri];
      caches[ri] = robot::forward_kinematics(inst.skeleton, inst.state);
      robot::update_samples(inst.skeleton, caches[ri], inst.rest, inst.samples);
      inst.stats = ib::CouplingStats{};
      inst.tau_ext = VecX::Zero(inst.skeleton.n_dofs());

      const auto& s = inst.samples;
      const size_t n = s.size();
      sample_force_world_.assign(n, Vec3::Zero());
      sample_valid_.assign(n, 0);
#pragma omp parallel for schedule(static)
      for (long long i = 0; i < static_cast<long long>(n); ++i) {
        const Vec3 x_frame = fs.world_to_frame_point(s.points[i]);
        const Vec3 x_lat = frame_to_lattice(x_frame);
        if (!ib::marker_in_bounds(cfg_.kernel, cfg_.dims, x_lat)) continue;
        sample_valid_[i] = 1;
        const Vec3 u_f_frame =
            cfg_.units.vel_to_physical(ib::interpolate_velocity(macro_, cfg_.kernel, x_lat));
        const Vec3 u_b_frame = fs.body_velocity_to_frame(x_frame, s.velocities[i]);
        const Vec3 n_frame = r_frame.transpose() * s.normals[i];
        sample_force_world_[i] =
            r_frame * ib::direct_forcing(u_b_frame, u_f_frame, n_frame, cfg_.units.rho_phys,
                                         s.areas[i], dx, dt, cfg_.wall);
      }
      const auto bt = robot::BoneTransforms::of(caches[ri], inst.rest);
      const Real force_to_lattice = dt * dt / (cfg_.units.rho_phys * dx * dx * dx * dx);
      for (size_t i = 0; i < n; ++i) {
        if (!sample_valid_[i]) {
          ++inst.stats.out_of_bounds_markers;
          ++outcome.out_of_bounds_markers;
          continue;
        }
        const Vec3& f_world = sample_force_world_[i];
        const Vec3 f_frame = r_frame.transpose() * f_world;
        const Vec3 x_lat = frame_to_lattice(fs.world_to_frame_point(s.points[i]));
        ib::spread_force(force_, cfg_.kernel, x_lat, f_frame * force_to_lattice);
        robot::accumulate_skinned_force(inst.skeleton, caches[ri], bt, s.weights.row(i),
                                        s.rest_points[i], -f_world, inst.tau_ext);
        inst.stats.total_force_on_fluid += f_world;
        inst.stats.total_force_on_body -= f_world;
        inst.stats.power_on_body += (-f_world).dot(s.velocities[i]);
      }
    }

    // non-inertial virtual force through the same forcing channel
    if (cfg_.frame_mode != frame::FollowMode::None) {
      const Real acc_to_lattice = dt * dt / dx;
      const Index3 d = cfg_.dims;
#pragma omp parallel for schedule(static)
      for (int k = 0; k < d[2]; ++k) {
        for (int j = 0; j < d[1]; ++j) {
          for (int i = 0; i < d[0]; ++i) {
            const size_t c = grid_.cell_index(i, j, k);
            const Vec3 x_frame = cell_frame_position(i, j, k);
            const Vec3 u_frame = cfg_.units.vel_to_physical(macro_.u[c]);
            const Vec3 a = frame::virtual_force(fs, x_frame, u_frame);
            force_.F[c] += macro_.rho[c] * acc_to_lattice * a;
          }
        }
      }
    }

    // fluid step, then the robots under the accumulated forces
    const auto status = lbm::collide_and_stream(grid_, force_);
    if (!status.stable()) outcome.stable = false;

    for (size_t ri = 0; ri < robots_.size(); ++ri) {
      auto& inst = robots_[ri];
      const VecX hydro = robot::buoyancy_gravity_forces(
          inst.skeleton, caches[ri], inst.skeleton.bladder, cfg_.units.rho_phys, cfg_.gravity);
      robot::integrate(inst.skeleton, inst.state, inst.actuation, inst.tau_ext + hydro, dt,
                       cfg_.substeps, Vec3::Zero());
      if (!inst.state.v.allFinite() || !inst.state.base_pos.allFinite()) outcome.stable = false;
    }

    // frame update and integer-cell recentering
    if (cfg_.frame_mode != frame::FollowMode::None && !robots_.empty()) {
      auto& tracked = robots_[cfg_.tracked_robot];
      follower_.step(tracked.state.base_pos, tracked.state.base_quat, dt);
      const auto kc = robot::forward_kinematics(tracked.skeleton, tracked.state);
      const Vec3 com_frame = follower_.state().world_to_frame_point(tracked.com_world(kc));
      Index3 shift = {0, 0, 0};
      bool need = false;
      for (int a = 0; a < 3; ++a) {
        const Real cells = com_frame[a] / dx;
        if (std::abs(cells) > cfg_.recenter_threshold_cells) {
          shift[a] = static_cast<int>(std::round(cells));
          need = true;
        }
      }
      if (need) frame::recenter(grid_, follower_.state(), shift);
    }

    time_ += dt;
    return outcome;
  }

  Real time() const { return time_; }

private:
  void center_frame_on_robot() {
    if (robots_.empty() || cfg_.frame_mode == frame::FollowMode::None) {
      follower_.reset(Vec3::Zero(), 0.0);
      return;
    }
    const auto& tracked = robots_.at(cfg_.tracked_robot);
    follower_.reset(tracked.state.base_pos,
                    cfg_.frame_mode == frame::FollowMode::Translation
                        ? 0.0
                        : tracked.state.base_euler().z());
  }

  SessionConfig cfg_;
  lbm::LatticeGrid grid_;
  lbm::BodyForceField force_;
  lbm::FluidMacro macro_;
  frame::FrameFollower follower_;
  std::vector<RobotInstance> robots_;
  std::vector<Vec3> sample_force_world_;
  std::vector<char> sample_valid_;
  Real time_ = 0.0;
};

}  // namespace fishsim::sim
