// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The FishSim Authors

#pragma once

#include <functional>

#include "fishsim/robot/gait.hpp"
#include "fishsim/sim/backend.hpp"

namespace fishsim::empirical {

struct EmpiricalParams {
  Real k = 40.0;  // N*s/m^3: force per unit area per unit normal speed

  void validate() const {
    if (!(k > 0.0)) throw InputError("empirical drag constant k must be positive");
  }
};

/// Instantaneous normal drag on a surface patch in still fluid:
/// F = -k (n . v) n A on patches pushing into the fluid; retreating
/// patches feel no suction, so a one-sided plate sees exactly -k A v n
/// and rigid translation is always dissipative.
inline Vec3 surface_force(const Vec3& normal, const Vec3& velocity, Real area,
                          const EmpiricalParams& p) {
  const Real vn = normal.dot(velocity);
  if (vn <= 0.0) return Vec3::Zero();
  return -p.k * vn * area * normal;
}

/// Drag-only counterpart of the coupled session: identical robot
/// dynamics and task surface, no fluid state. Fast enough for RL
/// smoke tests and the drift comparisons.
class EmpiricalBackend : public sim::Backend {
public:
  struct Config {
    Real dt = 0.004;
    int substeps = 4;
    Real rho_fluid = 1000.0;  // buoyancy reference
    Vec3 gravity = Vec3(0, 0, -9.81);
    Real marker_spacing = 0.02;
    EmpiricalParams params;
  };

  explicit EmpiricalBackend(const Config& cfg) : cfg_(cfg) { cfg_.params.validate(); }

  int add_robot(const robot::RobotModel& model, const sim::RobotStart& start,
                uint64_t sample_seed = 1234) {
    sim::RobotInstance inst;
    inst.skeleton = model.skeleton;
    inst.rest = robot::RestPose::of(inst.skeleton);
    inst.samples = robot::sample_surface(model.mesh, cfg_.marker_spacing, sample_seed);
    sim::apply_start(inst, start, cfg_.rho_fluid);
    robots_.push_back(std::move(inst));
    return static_cast<int>(robots_.size()) - 1;
  }

  Real dt() const override { return cfg_.dt; }
  Real fluid_density() const override { return cfg_.rho_fluid; }
  int n_robots() const override { return static_cast<int>(robots_.size()); }
  sim::RobotInstance& robot(int i) override { return robots_.at(i); }
  const sim::RobotInstance& robot(int i) const override { return robots_.at(i); }
  const Config& config() const { return cfg_; }

  void reset(const std::vector<sim::RobotStart>& starts) override {
    if (starts.size() != robots_.size()) throw InputError("reset: robot count mismatch");
    for (size_t i = 0; i < robots_.size(); ++i) {
      sim::apply_start(robots_[i], starts[i], cfg_.rho_fluid);
    }
    time_ = 0.0;
  }

  sim::StepOutcome step() override {
    sim::StepOutcome outcome;
    for (auto& inst : robots_) {
      const auto kc = robot::forward_kinematics(inst.skeleton, inst.state);
      robot::update_samples(inst.skeleton, kc, inst.rest, inst.samples);
      const auto bt = robot::BoneTransforms::of(kc, inst.rest);
      inst.stats = ib::CouplingStats{};
      inst.tau_ext = VecX::Zero(inst.skeleton.n_dofs());
      const auto& s = inst.samples;
      for (size_t i = 0; i < s.size(); ++i) {
        const Vec3 f =
            surface_force(s.normals[i], s.velocities[i], s.areas[i], cfg_.params);
        if (f.isZero()) continue;
        robot::accumulate_skinned_force(inst.skeleton, kc, bt, s.weights.row(i),
                                        s.rest_points[i], f, inst.tau_ext);
        inst.stats.total_force_on_body += f;
        inst.stats.power_on_body += f.dot(s.velocities[i]);
      }
      const VecX hydro = robot::buoyancy_gravity_forces(
          inst.skeleton, kc, inst.skeleton.bladder, cfg_.rho_fluid, cfg_.gravity);
      robot::integrate(inst.skeleton, inst.state, inst.actuation, inst.tau_ext + hydro,
                       cfg_.dt, cfg_.substeps, Vec3::Zero());
      if (!inst.state.v.allFinite() || !inst.state.base_pos.allFinite()) outcome.stable = false;
    }
    time_ += cfg_.dt;
    return outcome;
  }

  Real time() const { return time_; }

private:
  Config cfg_;
  std::vector<sim::RobotInstance> robots_;
  Real time_ = 0.0;
};

/// Mean base speed over the trailing window of a scripted-gait run.
inline Real measure_cruise_speed(sim::Backend& backend, const robot::SineGait& gait,
                                 Real duration, Real tail_fraction = 0.4) {
  const Real dt = backend.dt();
  const int steps = static_cast<int>(std::round(duration / dt));
  const int tail_start = static_cast<int>((1.0 - tail_fraction) * steps);
  Vec3 pos_at_tail = Vec3::Zero();
  for (int k = 0; k < steps; ++k) {
    backend.set_actuation(0, gait.actuation(backend.robot(0).skeleton, k * dt));
    if (!backend.step().stable) throw NumericalError("cruise run went unstable");
    if (k == tail_start) pos_at_tail = backend.robot(0).state.base_pos;
  }
  const Vec3 displacement = backend.robot(0).state.base_pos - pos_at_tail;
  return displacement.norm() / ((steps - tail_start) * dt);
}

/// Calibrates k so the empirical cruise speed matches a reference.
/// Cruise speed is strictly monotone in k over a sane bracket (grip
/// rises with k until drag loading stalls the tail), so log-space
/// bisection applies; the direction is detected from the endpoints.
/// `cruise_of_k` runs the scripted gait on a fresh empirical session.
inline EmpiricalParams fit_k(const std::function<Real(Real)>& cruise_of_k, Real cruise_ref,
                             Real k_lo = 2.0, Real k_hi = 200.0, Real rel_tol = 1e-3) {
  Real f_lo = cruise_of_k(k_lo);
  Real f_hi = cruise_of_k(k_hi);
  auto bracketed = [&] {
    return cruise_ref >= std::min(f_lo, f_hi) && cruise_ref <= std::max(f_lo, f_hi);
  };
  for (int grow = 0; grow < 2 && !bracketed(); ++grow) {
    const bool increasing = f_hi > f_lo;
    if (cruise_ref > std::max(f_lo, f_hi)) {
      if (increasing) {
        k_hi *= 4.0;
        f_hi = cruise_of_k(k_hi);
      } else {
        k_lo *= 0.25;
        f_lo = cruise_of_k(k_lo);
      }
    } else {
      if (increasing) {
        k_lo *= 0.25;
        f_lo = cruise_of_k(k_lo);
      } else {
        k_hi *= 4.0;
        f_hi = cruise_of_k(k_hi);
      }
    }
  }
  if (!bracketed()) {
    throw NumericalError("fit_k: reference cruise speed " + std::to_string(cruise_ref) +
                         " is not bracketed by k in [" + std::to_string(k_lo) + ", " +
                         std::to_string(k_hi) + "] (cruise ends " + std::to_string(f_lo) +
                         ", " + std::to_string(f_hi) + ")");
  }
  const bool increasing = f_hi > f_lo;
  for (int it = 0; it < 60 && (k_hi - k_lo) > rel_tol * k_lo; ++it) {
    const Real mid = std::sqrt(k_lo * k_hi);
    const Real f_mid = cruise_of_k(mid);
    if ((f_mid < cruise_ref) == increasing) {
      k_lo = mid;
    } else {
      k_hi = mid;
    }
  }
  EmpiricalParams p;
  p.k = std::sqrt(k_lo * k_hi);
  return p;
}

}  // namespace fishsim::empirical
