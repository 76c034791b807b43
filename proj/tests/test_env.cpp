// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The FishSim Authors

#include <catch2/catch_amalgamated.hpp>

#include "fishsim/core/stats.hpp"
#include "fishsim/empirical/empirical.hpp"
#include "fishsim/env/env.hpp"
#include "fishsim/sim/session.hpp"

using namespace fishsim;
using namespace fishsim::env;
using namespace fishsim::robot;

namespace {

RobotModel small_koi() {
  FishDesign d = koi_design();
  d.n_spine_joints = 4;
  d.n_segments = 16;
  d.n_ring = 10;
  return build_fish_model(d);
}

std::unique_ptr<sim::Backend> empirical_backend(const RobotModel& model, int n_robots = 1) {
  empirical::EmpiricalBackend::Config cfg;
  cfg.marker_spacing = 0.03;
  cfg.params.k = 55.0;
  auto b = std::make_unique<empirical::EmpiricalBackend>(cfg);
  for (int i = 0; i < n_robots; ++i) b->add_robot(model, sim::RobotStart{});
  return b;
}

FishEnv make_env(TaskType type, const RobotModel& model, RewardWeights w = {},
                 EpisodeConfig ep = {}, int n_robots = 1) {
  TaskSpec task;
  task.type = type;
  task.cruise_target = Vec3(0.5, 0.1, 0);
  if (type == TaskType::PathFollowing) {
    task.path = {Vec3(-0.5, 0, 0), Vec3(3.0, 0, 0)};
  }
  return FishEnv(empirical_backend(model, type == TaskType::Schooling ? 2 : n_robots),
                 task, w, ep, EnvOptions{}, 0.4);
}

}  // namespace

TEST_CASE("reset is deterministic and honors zero ranges") {
  const auto model = small_koi();
  EpisodeConfig fast;
  fast.sim_steps_per_control = 10;
  auto env = make_env(TaskType::Cruising, model, {}, fast);

  const auto o1 = env.reset(42);
  const auto o2 = env.reset(42);
  CHECK(o1.v == o2.v);  // bit-identical

  // zero ranges: canonical rest start
  CHECK(o1.q().norm() == 0.0);
  CHECK(o1.qd().norm() == 0.0);
  CHECK(o1.vel().norm() == 0.0);

  EpisodeConfig ep;
  ep.init_joint_angle = 0.3;
  ep.init_joint_rate = 0.5;
  ep.init_speed = 0.05;
  ep.sim_steps_per_control = 10;
  auto env2 = make_env(TaskType::Cruising, model, {}, ep);
  const auto o3 = env2.reset(7);
  CHECK(o3.q().norm() > 0.0);
  CHECK(o3.qd().norm() > 0.0);
  const auto o4 = env2.reset(8);
  CHECK(o3.v != o4.v);
}

TEST_CASE("local-path sampling is uniform in d and theta") {
  const auto model = small_koi();
  EpisodeConfig fast;
  fast.sim_steps_per_control = 10;
  auto env = make_env(TaskType::LocalPath, model, {}, fast);
  const int n = 1500, bins = 5;
  std::vector<int> d_counts(bins, 0), t_counts(bins, 0);
  for (int i = 0; i < n; ++i) {
    env.reset(1000 + i);
    const Real d = env.last_local_d();
    const Real th = env.last_local_theta();
    REQUIRE(d >= 0.0);
    REQUIRE(d <= 1.0);
    REQUIRE(std::abs(th) <= M_PI / 2);
    d_counts[std::min(bins - 1, static_cast<int>(d * bins))]++;
    t_counts[std::min(bins - 1, static_cast<int>((th / M_PI + 0.5) * bins))]++;
  }
  CHECK(chi2_uniform_pvalue(d_counts) > 0.01);
  CHECK(chi2_uniform_pvalue(t_counts) > 0.01);
}

TEST_CASE("quiescent start stays quiescent over one control step") {
  const auto model = small_koi();
  auto env = make_env(TaskType::Cruising, model);  // full 0.2 s control step
  env.reset(3);
  const auto res = env.step(VecX::Zero(env.action_dim()));
  CHECK(res.obs.vel().norm() < 1e-3);
  CHECK_FALSE(res.done);
}

TEST_CASE("reward is a pure function of observation and actuation") {
  const auto model = small_koi();
  RewardWeights w;
  w.w_p = 0.3;
  w.w_v = 1.0;
  w.w_r = 0.2;
  w.w_e = 0.5;
  w.w_task = 0.7;
  EpisodeConfig fast;
  fast.sim_steps_per_control = 10;
  auto env = make_env(TaskType::PathFollowing, model, w, fast);
  env.reset(5);
  Rng rng(17);
  VecX last_action;
  for (int k = 0; k < 5; ++k) {
    VecX a(env.action_dim());
    for (int i = 0; i < a.size(); ++i) a[i] = rng.uniform(-1.2, 1.2);
    const auto res = env.step(a);
    // recompute externally from the returned observation
    VecX sigma(env.action_dim() - 1);
    const auto& skel = env.backend().robot(0).skeleton;
    for (int i = 1, j = 0; i < skel.n_links(); ++i) {
      if (skel.links[i].joint == JointType::Revolute) {
        sigma[j] = std::clamp(a[j], -1.0, 1.0) * skel.links[i].torque_limit;
        ++j;
      }
    }
    const Real expected =
        reward_of(res.obs, sigma, w, TaskType::PathFollowing, env.options());
    CHECK(res.reward == expected);
    if (res.done) break;
  }
}

TEST_CASE("reward formula cases") {
  ObsLayout layout;
  layout.n_joints = 2;
  layout.task_dim = ObsLayout::task_dim_of(TaskType::Cruising);
  Observation obs;
  obs.layout = layout;
  obs.v = VecX::Zero(layout.dim());

  SECTION("at target, aligned, idle: w_p alone gives exactly 1") {
    RewardWeights w;
    w.w_p = 1.0;
    CHECK(reward_of(obs, VecX::Zero(2), w, TaskType::Cruising, EnvOptions{}) == 1.0);
  }

  SECTION("pure effort penalty") {
    RewardWeights w;
    w.w_e = 1.0;
    VecX tau(2);
    tau << 0.3, -0.4;
    CHECK(reward_of(obs, tau, w, TaskType::Cruising, EnvOptions{}) ==
          Catch::Approx(-0.25).margin(1e-15));
    EnvOptions literal;
    literal.effort_as_penalty = false;
    CHECK(reward_of(obs, tau, w, TaskType::Cruising, literal) ==
          Catch::Approx(0.25).margin(1e-15));
  }

  SECTION("cruising weight row, hand computed") {
    // w_v = 1, w_p = 0, w_r = 0.2, w_e = 0.5
    RewardWeights w;
    w.w_v = 1.0;
    w.w_r = 0.2;
    w.w_e = 0.5;
    obs.v.segment<3>(4) = Vec3(2.0, 0.0, 0.0);        // p: target 2 m ahead
    obs.v.segment<3>(7) = Vec3(0.25, 0.05, 0.0);      // velocity
    obs.v.segment<3>(10) = Vec3(0.02, -0.01, 0.1);    // rotation error
    VecX tau(2);
    tau << 0.2, 0.1;
    const Real r_v = 0.25;  // projection of velocity onto the target direction
    const Real r_r = 1.0 - Vec3(0.02, -0.01, 0.1).norm();
    const Real expected = 1.0 * r_v + 0.2 * r_r - 0.5 * (0.2 * 0.2 + 0.1 * 0.1);
    CHECK(reward_of(obs, tau, w, TaskType::Cruising, EnvOptions{}) ==
          Catch::Approx(expected).margin(1e-14));

    EnvOptions raw;
    raw.velocity_toward_target = false;
    const Real expected_raw =
        1.0 * Vec3(0.25, 0.05, 0).norm() + 0.2 * r_r - 0.5 * tau.squaredNorm();
    CHECK(reward_of(obs, tau, w, TaskType::Cruising, raw) ==
          Catch::Approx(expected_raw).margin(1e-14));
  }

  SECTION("exp terms stay in (0, 1]") {
    RewardWeights w;
    w.w_p = 1.0;
    Rng rng(3);
    for (int t = 0; t < 50; ++t) {
      obs.v.segment<3>(4) = 5.0 * Vec3(rng.normal(), rng.normal(), rng.normal());
      const Real r = reward_of(obs, VecX::Zero(2), w, TaskType::Cruising, EnvOptions{});
      CHECK(r > 0.0);
      CHECK(r <= 1.0);
    }
  }
}

TEST_CASE("local target geometry") {
  SECTION("aligned on a straight path") {
    std::vector<Vec3> path = {Vec3(-1, 0, 0), Vec3(10, 0, 0)};
    Real s = 0.0;
    auto [target, d] = FishEnv::local_target_on(path, Vec3::Zero(), 0.5, s);
    CHECK((target - Vec3(0.5, 0, 0)).norm() < 1e-12);
    CHECK(d.norm() < 1e-12);
  }

  SECTION("lateral offset 0.2") {
    std::vector<Vec3> path = {Vec3(-1, 0, 0), Vec3(10, 0, 0)};
    Real s = 0.0;
    auto [target, d] = FishEnv::local_target_on(path, Vec3(0, 0.2, 0), 0.5, s);
    CHECK(std::abs(d.norm() - 0.2) < 1e-12);
    CHECK((target - Vec3(0.5, 0, 0)).norm() < 1e-12);
  }

  SECTION("circle path: chord/arc relation") {
    const Real radius = 2.0;
    std::vector<Vec3> path;
    const int n = 20000;
    for (int i = 0; i <= n; ++i) {
      const Real a = 2.0 * M_PI * i / n;
      path.emplace_back(radius * std::cos(a), radius * std::sin(a), 0.0);
    }
    // robot on the circle at angle 0; target 0.5 m of arc ahead
    Real s = 0.0;
    auto [target, d] = FishEnv::local_target_on(path, Vec3(radius, 0, 0), 0.5, s);
    const Real arc_angle = 0.5 / radius;
    const Vec3 expected(radius * std::cos(arc_angle), radius * std::sin(arc_angle), 0.0);
    CHECK((target - expected).norm() < 1e-6);
    // chord length of the analytic circle
    const Real chord = (target - Vec3(radius, 0, 0)).norm();
    CHECK(chord == Catch::Approx(2.0 * radius * std::sin(arc_angle / 2)).margin(1e-6));
  }

  SECTION("continuity rule near a hairpin") {
    // two parallel legs 0.3 apart; a point midway is ambiguous
    std::vector<Vec3> path = {Vec3(0, 0, 0), Vec3(2, 0, 0), Vec3(2, 0.3, 0), Vec3(0, 0.3, 0)};
    const Vec3 x(1.0, 0.15, 0);
    Real s_fwd = project_onto_path(path, x, 0.8, nullptr);   // tracking leg one
    Real s_back = project_onto_path(path, x, 3.3, nullptr);  // tracking the return leg
    CHECK(std::abs(s_fwd - 1.0) < 1e-9);
    CHECK(std::abs(s_back - (2.0 + 0.3 + 1.0)) < 1e-9);
  }
}

TEST_CASE("scripted gait swims forward over an episode") {
  const auto model = small_koi();
  EpisodeConfig ep;
  ep.sim_steps_per_control = 50;  // 0.2 s control steps
  auto env = make_env(TaskType::Cruising, model, {}, ep);
  env.reset(11);
  SineGait gait;
  gait.amplitude = 0.7;
  const auto& skel = env.backend().robot(0).skeleton;
  const Vec3 start = env.backend().robot(0).state.base_pos;
  for (int step = 0; step < 50; ++step) {
    // translate the scripted torques into normalized actions
    const VecX sigma = gait.actuation(skel, env.time());
    VecX a = VecX::Zero(env.action_dim());
    for (int i = 1, j = 0; i < skel.n_links(); ++i) {
      if (skel.links[i].joint == JointType::Revolute) {
        a[j] = sigma[j] / skel.links[i].torque_limit;
        ++j;
      }
    }
    if (env.step(a).done) break;
  }
  const Real dist = (env.backend().robot(0).state.base_pos - start).norm();
  CHECK(dist > 0.1 * env.body_length());
}

TEST_CASE("observation is invariant to a global rigid motion") {
  const auto model = small_koi();
  const Quat rot = quat_exp(Vec3(0, 0, 1.3));  // yaw-only keeps targets horizontal
  const Vec3 shift(2.0, -1.0, 0.5);

  TaskSpec t1;
  t1.type = TaskType::Cruising;
  t1.cruise_target = Vec3(0.5, 0.1, 0);
  TaskSpec t2 = t1;
  t2.cruise_target = rot.toRotationMatrix() * t1.cruise_target + shift;

  EpisodeConfig ep;
  ep.sim_steps_per_control = 10;
  FishEnv e1(empirical_backend(model), t1, {}, ep, EnvOptions{}, 0.4);
  FishEnv e2(empirical_backend(model), t2, {}, ep, EnvOptions{}, 0.4);
  e1.reset(9);
  e2.reset(9);

  // displace the second world rigidly
  auto& st1 = e1.backend().robot(0).state;
  auto& st2 = e2.backend().robot(0).state;
  st1.base_pos = Vec3(0.1, 0.05, -0.02);
  st1.base_quat = quat_exp(Vec3(0.1, -0.2, 0.7));
  st1.q.setConstant(0.2);
  st1.v.setConstant(0.1);
  st2 = st1;
  st2.base_pos = rot.toRotationMatrix() * st1.base_pos + shift;
  st2.base_quat = (rot * st1.base_quat).normalized();

  const auto o1 = e1.observe();
  const auto o2 = e2.observe();
  CHECK((o1.v - o2.v).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("schooling: leader holds course and follower sees relative pose") {
  const auto model = small_koi();
  RewardWeights w;
  w.w_p = 1.0;
  w.w_e = 0.1;
  EpisodeConfig ep;
  ep.sim_steps_per_control = 50;
  auto env = make_env(TaskType::Schooling, model, w, ep);
  env.reset(21);

  // leader script at t = 0 starts from zero torque (ramped sine)
  const auto& leader = env.backend().robot(1);
  const VecX sigma0 = env.task().leader.actuation(leader.skeleton, leader.state, 0.0);
  CHECK(sigma0.norm() < 1e-12);

  const Vec3 leader_start = leader.state.base_pos;
  const Real heading = leader.state.base_euler().z();
  for (int step = 0; step < 25; ++step) {  // 5 s
    const auto res = env.step(VecX::Zero(env.action_dim()));
    if (res.done) break;
  }
  const Vec3 moved = leader.state.base_pos - leader_start;
  const Vec3 along(std::cos(heading), std::sin(heading), 0.0);
  const Real forward = moved.dot(along);
  const Real lateral = (moved - forward * along).head<2>().norm();
  INFO("leader forward " << forward << " lateral " << lateral);
  CHECK(forward > 0.05);
  CHECK(lateral < 0.1 * env.body_length());

  // relative-pose entries equal the frame-rotated world difference
  const auto obs = env.observe();
  const auto& follower = env.backend().robot(0);
  const Mat3 rf = follower.state.base_quat.toRotationMatrix();
  const Vec3 expected = rf.transpose() * (leader.state.base_pos - follower.state.base_pos);
  CHECK((obs.task().head(3) - expected).norm() < 1e-12);
}

TEST_CASE("episode terminates on horizon, success, and failure") {
  const auto model = small_koi();

  SECTION("horizon") {
    EpisodeConfig ep;
    ep.control_steps = 3;
    ep.sim_steps_per_control = 10;
    auto env = make_env(TaskType::Cruising, model, {}, ep);
    env.reset(1);
    env.step(VecX::Zero(env.action_dim()));
    env.step(VecX::Zero(env.action_dim()));
    const auto res = env.step(VecX::Zero(env.action_dim()));
    CHECK(res.done);
    CHECK_FALSE(res.info.success);
    CHECK_THROWS_AS(env.step(VecX::Zero(env.action_dim())), InputError);
  }

  SECTION("success when the target is near") {
    TaskSpec task;
    task.type = TaskType::Cruising;
    task.cruise_target = Vec3(0.01, 0, 0);  // inside the success radius
    EpisodeConfig ep;
    ep.sim_steps_per_control = 5;
    FishEnv env(empirical_backend(model), task, {}, ep, EnvOptions{}, 0.4);
    env.reset(2);
    const auto res = env.step(VecX::Zero(env.action_dim()));
    CHECK(res.done);
    CHECK(res.info.success);
  }

  SECTION("failure when beyond 2x the initial distance") {
    TaskSpec task;
    task.type = TaskType::Cruising;
    task.cruise_target = Vec3(0.3, 0, 0);
    EpisodeConfig ep;
    ep.sim_steps_per_control = 5;
    FishEnv env(empirical_backend(model), task, {}, ep, EnvOptions{}, 0.4);
    env.reset(3);
    env.backend().robot(0).state.base_pos = Vec3(-1.5, 0, 0);  // teleport far away
    const auto res = env.step(VecX::Zero(env.action_dim()));
    CHECK(res.done);
    CHECK(res.info.failure);
  }
}

TEST_CASE("backends expose identical observation and action contracts") {
  const auto model = small_koi();
  TaskSpec task;
  task.type = TaskType::Cruising;
  EpisodeConfig ep;
  ep.sim_steps_per_control = 2;

  FishEnv emp(empirical_backend(model), task, {}, ep, EnvOptions{}, 0.4);

  sim::SessionConfig cfg;
  cfg.dims = {24, 24, 24};
  cfg.units.dx = 0.05;
  cfg.units.dt_phys = 0.004;
  cfg.units.rho_phys = 1000.0;
  cfg.units.nu_phys = 0.003;
  auto coupled = std::make_unique<sim::CoupledSession>(cfg);
  coupled->add_robot(model, sim::RobotStart{});
  FishEnv phys(std::move(coupled), task, {}, ep, EnvOptions{}, 0.4);

  CHECK(emp.observation_dim() == phys.observation_dim());
  CHECK(emp.action_dim() == phys.action_dim());
  const auto o1 = emp.reset(4);
  const auto o2 = phys.reset(4);
  CHECK(o1.v.size() == o2.v.size());
  // same canonical start, same observation
  CHECK((o1.v - o2.v).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("trajectories are bit-identical for a fixed seed and actions") {
  const auto model = small_koi();
  auto run = [&]() {
    EpisodeConfig ep;
    ep.sim_steps_per_control = 10;
    auto env = make_env(TaskType::Cruising, model, {}, ep);
    env.reset(77);
    Rng arng(5);
    std::vector<Real> rewards;
    for (int k = 0; k < 10; ++k) {
      VecX a(env.action_dim());
      for (int i = 0; i < a.size(); ++i) a[i] = arng.uniform(-1, 1);
      const auto res = env.step(a);
      rewards.push_back(res.reward);
      if (res.done) break;
    }
    return std::make_pair(rewards, env.backend().robot(0).state.base_pos);
  };
  const auto [r1, p1] = run();
  const auto [r2, p2] = run();
  CHECK(r1 == r2);
  CHECK(p1 == p2);
}
