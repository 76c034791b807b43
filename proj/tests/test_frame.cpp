// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The FishSim Authors

#include <catch2/catch_amalgamated.hpp>
#include <complex>

#include "fishsim/core/rng.hpp"
#include "fishsim/frame/frame.hpp"
#include "fishsim/lbm/solver.hpp"

using namespace fishsim;
using namespace fishsim::frame;

TEST_CASE("virtual force vanishes in an inertial frame") {
  FrameState f;
  f.pd = Vec3(1.0, -0.5, 0.2);  // constant velocity, no acceleration
  Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    const Vec3 x(rng.normal(), rng.normal(), rng.normal());
    const Vec3 u(rng.normal(), rng.normal(), rng.normal());
    CHECK(virtual_force(f, x, u).norm() == 0.0);
  }
}

TEST_CASE("pure linear acceleration gives a uniform -a") {
  FrameState f;
  f.pdd = Vec3(0.3, -0.1, 0.7);
  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    const Vec3 x(rng.normal(), rng.normal(), rng.normal());
    CHECK((virtual_force(f, x, Vec3::Zero()) + f.pdd).norm() < 1e-15);
  }
}

TEST_CASE("steady rotation produces the centrifugal and Coriolis terms") {
  const Real w = 1.7, radius = 0.8;
  FrameState f;
  f.omega = Vec3(0, 0, w);

  // centrifugal: magnitude w^2 R pointing outward
  const Vec3 x(radius, 0, 0);
  const Vec3 fc = virtual_force(f, x, Vec3::Zero());
  CHECK((fc - Vec3(w * w * radius, 0, 0)).norm() < 1e-14);

  // Coriolis: -2 w x u
  const Vec3 u(0.0, 0.25, 0.0);
  const Vec3 fu = virtual_force(f, Vec3::Zero(), u);
  CHECK((fu - Vec3(2.0 * w * 0.25, 0.0, 0.0)).norm() < 1e-14);

  // rotated frame: same physics expressed in frame coordinates
  f.rot = quat_exp(Vec3(0, 0, 1.2));
  const Vec3 fc2 = virtual_force(f, x, Vec3::Zero());
  CHECK((fc2 - Vec3(w * w * radius, 0, 0)).norm() < 1e-13);
}

TEST_CASE("frame follower settles on a stationary and a cruising target") {
  const Real dt = 0.004;

  SECTION("stationary") {
    FrameFollower fol(FollowMode::Translation, 0.2);
    fol.reset(Vec3(1, 2, 3), 0.0);
    for (int k = 0; k < 1000; ++k) fol.step(Vec3(1, 2, 3), Quat::Identity(), dt);
    CHECK((fol.state().p - Vec3(1, 2, 3)).norm() < 1e-12);
    CHECK(fol.state().pd.norm() < 1e-12);
    CHECK(fol.state().pdd.norm() < 1e-12);
  }

  SECTION("constant velocity") {
    const Vec3 v(0.2, 0.05, 0.0);
    FrameFollower fol(FollowMode::Translation, 0.2);
    fol.reset(Vec3::Zero(), 0.0);
    for (int k = 0; k < 2500; ++k) {  // 10 s = 50 time constants
      fol.step(v * (k * dt), Quat::Identity(), dt);
    }
    CHECK((fol.state().pd - v).norm() < 1e-4 * v.norm());
    CHECK(fol.state().pdd.norm() < 1e-3 * v.norm());
    // steady-state lag of a critically damped 2nd-order tracker: 2 v / wn
    const Vec3 expected_lag = 2.0 * 0.2 * v;
    const Vec3 lag = v * (2500 * dt) - fol.state().p;
    CHECK((lag - expected_lag).norm() < 0.05 * expected_lag.norm());
  }
}

TEST_CASE("filter attenuates gait-frequency jitter per its transfer function") {
  const Real dt = 0.0005, tc = 0.2, wn = 1.0 / tc;
  const Real amp = 0.01;
  for (Real w_gait : {10.0, 25.0, 60.0}) {
    FrameFollower fol(FollowMode::Translation, tc);
    fol.reset(Vec3::Zero(), 0.0);
    Real peak = 0.0;
    const int total = static_cast<int>(20.0 / (w_gait * dt));  // many cycles
    for (int k = 0; k < total; ++k) {
      const Real t = k * dt;
      fol.step(Vec3(amp * std::sin(w_gait * t), 0, 0), Quat::Identity(), dt);
      if (k > total / 2) peak = std::max(peak, std::abs(fol.state().pdd.x()));
    }
    const std::complex<Real> s(0.0, w_gait);
    const std::complex<Real> h = wn * wn / (s * s + 2.0 * wn * s + wn * wn);
    const Real expected = std::abs(s * s * h) * amp;
    CHECK(std::abs(peak / expected - 1.0) < 0.05);
  }
}

TEST_CASE("yaw following tracks heading and stays pure yaw") {
  FrameFollower fol(FollowMode::TranslationYaw, 0.2);
  fol.reset(Vec3::Zero(), 0.3);
  const Quat target = quat_exp(Vec3(0, 0, 1.1));
  for (int k = 0; k < 3000; ++k) fol.step(Vec3::Zero(), target, 0.004);
  CHECK(std::abs(fol.state().euler().z() - 1.1) < 1e-6);
  CHECK(std::abs(fol.state().euler().x()) < 1e-12);
  CHECK(std::abs(fol.state().euler().y()) < 1e-12);
}

TEST_CASE("recenter shifts contents and keeps world positions continuous") {
  UnitMap units;
  units.dx = 0.02;
  units.dt_phys = 0.004;
  units.rho_phys = 1000.0;
  units.nu_phys = 0.00089;
  lbm::LatticeGrid grid({12, 10, 9}, units);
  Rng rng(5);
  grid.initialize([&](int, int, int) { return 1.0 + 0.01 * rng.uniform(); },
                  [&](int, int, int) { return Vec3(0.01 * rng.uniform(), 0, 0); });
  const auto ref = grid.front();

  FrameState f;
  f.p = Vec3(0.4, 0.0, 0.1);

  SECTION("zero shift is the identity") {
    recenter(grid, f, {0, 0, 0});
    CHECK(grid.front() == ref);
    CHECK(f.p == Vec3(0.4, 0.0, 0.1));
  }

  SECTION("shift then unshift restores all but the refilled layer") {
    recenter(grid, f, {1, 0, 0});
    CHECK((f.p - Vec3(0.42, 0.0, 0.1)).norm() < 1e-15);
    recenter(grid, f, {-1, 0, 0});
    CHECK((f.p - Vec3(0.40, 0.0, 0.1)).norm() < 1e-15);
    const Index3 d = grid.dims();
    const size_t n = grid.n_cells();
    for (int z = 0; z < d[2]; ++z)
      for (int y = 0; y < d[1]; ++y)
        for (int x = 1; x < d[0]; ++x) {  // x = 0 was refilled
          const size_t c = grid.cell_index(x, y, z);
          for (int i = 0; i < lbm::D3Q19::Q; ++i) {
            CHECK(std::abs(grid.front()[i * n + c] - ref[i * n + c]) < 1e-14);
          }
        }
  }

  SECTION("world position of a tracked cell is preserved") {
    // cell (6,5,4) content moves to (5,5,4) after shift +1 in x
    const Vec3 before = f.frame_to_world_point(Vec3(6, 5, 4) * units.dx);
    recenter(grid, f, {1, 0, 0});
    const Vec3 after = f.frame_to_world_point(Vec3(5, 5, 4) * units.dx);
    CHECK((before - after).norm() < 1e-14);
  }
}
