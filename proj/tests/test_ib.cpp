// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The FishSim Authors

#include <catch2/catch_amalgamated.hpp>

#include "fishsim/core/rng.hpp"
#include "fishsim/ib/coupling.hpp"
#include "fishsim/robot/model_builder.hpp"
#include "fishsim/robot/sampling.hpp"

using namespace fishsim;
using namespace fishsim::ib;
using namespace fishsim::lbm;

namespace {

FluidMacro make_field(Index3 d, const std::function<Vec3(Real, Real, Real)>& u) {
  FluidMacro m;
  m.resize(d);
  for (int z = 0; z < d[2]; ++z)
    for (int y = 0; y < d[1]; ++y)
      for (int x = 0; x < d[0]; ++x) {
        m.u[x + d[0] * (y + static_cast<size_t>(d[1]) * z)] = u(x, y, z);
      }
  return m;
}

}  // namespace

TEST_CASE("kernels form a partition of unity and reproduce linears") {
  Rng rng(2);
  for (auto family : {IBKernel::Family::Peskin4, IBKernel::Family::Roma3}) {
    const IBKernel k{family};
    for (int trial = 0; trial < 200; ++trial) {
      const Real r = rng.uniform(-0.5, 0.5);
      Real sum = 0.0, first = 0.0;
      for (int j = -4; j <= 4; ++j) {
        sum += k.phi(r - j);
        first += j * k.phi(r - j);
      }
      CHECK(std::abs(sum - 1.0) < 1e-6);
      CHECK(std::abs(first - r) < 1e-6);
    }
  }
}

TEST_CASE("interpolation reads uniform and linear fields exactly") {
  const Index3 d{16, 16, 16};
  Rng rng(3);

  SECTION("uniform flow") {
    const Vec3 u0(0.03, -0.01, 0.02);
    const auto m = make_field(d, [&](Real, Real, Real) { return u0; });
    const IBKernel k{};
    for (int t = 0; t < 50; ++t) {
      const Vec3 x(rng.uniform(2, 13), rng.uniform(2, 13), rng.uniform(2, 13));
      CHECK((interpolate_velocity(m, k, x) - u0).norm() < 1e-12);
    }
  }

  SECTION("linear shear") {
    const auto m = make_field(d, [&](Real x, Real y, Real z) {
      return Vec3(0.001 * y + 0.0005 * z, -0.002 * x, 0.0015 * x + 0.001 * y);
    });
    for (auto family : {IBKernel::Family::Peskin4, IBKernel::Family::Roma3}) {
      const IBKernel k{family};
      for (int t = 0; t < 50; ++t) {
        const Vec3 x(rng.uniform(2, 13), rng.uniform(2, 13), rng.uniform(2, 13));
        const Vec3 expected(0.001 * x.y() + 0.0005 * x.z(), -0.002 * x.x(),
                            0.0015 * x.x() + 0.001 * x.y());
        CHECK((interpolate_velocity(m, k, x) - expected).norm() < 1e-10);
      }
    }
  }

  SECTION("smooth field converges at second order") {
    auto max_err = [&](int n) {
      const Real a = 2.0 * M_PI / n;
      const auto m = make_field({n, n, n}, [&](Real x, Real y, Real) {
        return Vec3(0.01 * std::cos(a * x) * std::sin(a * y),
                    -0.01 * std::sin(a * x) * std::cos(a * y), 0.0);
      });
      const IBKernel k{};
      Rng prng(7);
      Real worst = 0.0;
      for (int t = 0; t < 100; ++t) {
        const Vec3 x(prng.uniform(3, n - 4), prng.uniform(3, n - 4), prng.uniform(3, n - 4));
        const Vec3 analytic(0.01 * std::cos(a * x.x()) * std::sin(a * x.y()),
                            -0.01 * std::sin(a * x.x()) * std::cos(a * x.y()), 0.0);
        worst = std::max(worst, (interpolate_velocity(m, k, x) - analytic).norm());
      }
      return worst;
    };
    const Real e16 = max_err(16), e32 = max_err(32);
    CHECK(e32 < e16 / 2.5);  // ~4x for O(dx^2)
    CHECK(e32 < 2e-4);
  }
}

TEST_CASE("spreading conserves the marker force") {
  BodyForceField f;
  f.resize({16, 16, 16});
  const IBKernel k{};

  SECTION("zero in, zero out") {
    spread_force(f, k, Vec3(8.2, 7.7, 8.9), Vec3::Zero());
    for (const auto& F : f.F) CHECK(F.norm() == 0.0);
  }

  SECTION("unit force integrates back") {
    const Vec3 unit(0.4, -1.2, 0.3);
    spread_force(f, k, Vec3(8.23, 7.71, 8.95), unit);
    Vec3 total = Vec3::Zero();
    for (const auto& F : f.F) total += F;
    CHECK((total - unit).norm() < 1e-12);
  }

  SECTION("dipole cancels force but carries torque") {
    const Vec3 fd(0.0, 1.0, 0.0);
    const Vec3 a(8.0, 8.0, 8.0), b(9.0, 8.0, 8.0);
    spread_force(f, k, a, fd);
    spread_force(f, k, b, -fd);
    Vec3 total = Vec3::Zero(), torque = Vec3::Zero();
    for (int z = 0; z < 16; ++z)
      for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x) {
          const Vec3& F = f.F[x + 16 * (y + 16 * static_cast<size_t>(z))];
          total += F;
          torque += (Vec3(x, y, z) - a).cross(F);
        }
    CHECK(total.norm() < 1e-12);
    CHECK(torque.norm() > 0.1);  // the pair carries net moment
  }
}

TEST_CASE("interpolation and spreading are adjoint (100 random cases)") {
  Rng rng(11);
  const Index3 d{12, 14, 13};
  for (int trial = 0; trial < 100; ++trial) {
    const IBKernel k{trial % 2 == 0 ? IBKernel::Family::Peskin4 : IBKernel::Family::Roma3};
    const auto u = make_field(d, [&](Real, Real, Real) {
      return Vec3(rng.normal(), rng.normal(), rng.normal());
    });
    const int n_markers = 1 + static_cast<int>(rng.uniform_index(8));
    std::vector<Vec3> xs, fs;
    for (int i = 0; i < n_markers; ++i) {
      xs.emplace_back(rng.uniform(2.5, 9.5), rng.uniform(2.5, 11.0), rng.uniform(2.5, 10.0));
      fs.emplace_back(rng.normal(), rng.normal(), rng.normal());
    }
    BodyForceField field;
    field.resize(d);
    Real lhs = 0.0, rhs = 0.0;
    for (int i = 0; i < n_markers; ++i) {
      spread_force(field, k, xs[i], fs[i]);
      rhs += fs[i].dot(interpolate_velocity(u, k, xs[i]));
    }
    for (size_t c = 0; c < field.F.size(); ++c) lhs += field.F[c].dot(u.u[c]);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("direct forcing obeys the slip projection") {
  const Vec3 n = Vec3(1, 2, -1).normalized();
  const Real rho = 1000, area = 1e-4, h = 0.02, dt = 0.004;

  SECTION("matched velocities give zero force") {
    const Vec3 u(0.1, 0.2, 0.3);
    CHECK(direct_forcing(u, u, n, rho, area, h, dt, WallCondition::Slip).norm() == 0.0);
    CHECK(direct_forcing(u, u, n, rho, area, h, dt, WallCondition::NoSlip).norm() == 0.0);
  }

  SECTION("tangential mismatch slips freely") {
    Vec3 tangent = n.cross(Vec3::UnitX()).normalized();
    const Vec3 ub = 0.3 * tangent, uf = Vec3::Zero();
    CHECK(direct_forcing(ub, uf, n, rho, area, h, dt, WallCondition::Slip).norm() < 1e-15);
    CHECK(direct_forcing(ub, uf, n, rho, area, h, dt, WallCondition::NoSlip).norm() > 0.0);
  }

  SECTION("normal mismatch is penalized in full") {
    const Vec3 ub = 0.25 * n;
    const Vec3 f = direct_forcing(ub, Vec3::Zero(), n, rho, area, h, dt, WallCondition::Slip);
    CHECK((f - rho * area * h / dt * ub).norm() < 1e-12);
  }
}

TEST_CASE("impulsively started plate feels rho A h V / dt") {
  // marker sheet moving along its normal into still fluid
  const Real rho = 1000, h = 0.02, dt = 0.004, v = 0.1;
  const Real a_plate = 0.12 * 0.12;
  const int n_side = 12;
  const Real da = a_plate / (n_side * n_side);
  Vec3 total = Vec3::Zero();
  for (int i = 0; i < n_side; ++i)
    for (int j = 0; j < n_side; ++j)
      total += direct_forcing(Vec3(0, 0, v), Vec3::Zero(), Vec3::UnitZ(), rho, da, h, dt,
                              WallCondition::Slip);
  const Real expected = rho * a_plate * h * v / dt;
  CHECK(std::abs(total.x()) < 1e-12 * expected);
  CHECK(std::abs(total.y()) < 1e-12 * expected);
  CHECK(total.z() == Catch::Approx(expected).epsilon(0.05));

  // sampled fish surface: forcing totals match the sampled geometry
  auto model = robot::build_fish_model(robot::koi_design());
  auto samples = robot::sample_surface(model.mesh, 0.015, 23);
  Vec3 ftot = Vec3::Zero();
  Real projected_area = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    ftot += direct_forcing(Vec3(0, 0, v), Vec3::Zero(), samples.rest_normals[i], rho,
                           samples.areas[i], h, dt, WallCondition::Slip);
    projected_area += samples.areas[i] * samples.rest_normals[i].z() * samples.rest_normals[i].z();
  }
  CHECK(ftot.z() == Catch::Approx(rho * projected_area * h * v / dt).epsilon(1e-10));
}

TEST_CASE("virtual work identity: sample forces vs generalized forces") {
  auto model = robot::build_fish_model([]() {
    auto d = robot::koi_design();
    d.n_spine_joints = 4;
    d.n_segments = 16;
    d.n_ring = 10;
    return d;
  }());
  const auto& skel = model.skeleton;
  const auto rest = robot::RestPose::of(skel);
  auto samples = robot::sample_surface(model.mesh, 0.025, 29);

  Rng rng(31);
  auto st = robot::JointState::zero(skel);
  for (int j = 0; j < st.q.size(); ++j) st.q[j] = rng.uniform(-0.4, 0.4);
  for (int j = 0; j < st.v.size(); ++j) st.v[j] = rng.uniform(-0.8, 0.8);
  st.base_quat = quat_exp(Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)));
  st.base_pos = Vec3(0.3, -0.1, 0.2);

  const auto kc = robot::forward_kinematics(skel, st);
  robot::update_samples(skel, kc, rest, samples);
  const auto bt = robot::BoneTransforms::of(kc, rest);

  VecX tau = VecX::Zero(skel.n_dofs());
  Real power_samples = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    const Vec3 f(rng.normal(), rng.normal(), rng.normal());
    robot::accumulate_skinned_force(skel, kc, bt, samples.weights.row(i),
                                    samples.rest_points[i], f, tau);
    power_samples += f.dot(samples.velocities[i]);
  }
  const Real power_generalized = tau.dot(st.v);
  CHECK(std::abs(power_samples - power_generalized) <
        1e-8 * std::max(1.0, std::abs(power_samples)));
}

TEST_CASE("marker bounds check flags the kernel margin") {
  const IBKernel k{};
  const Index3 d{16, 16, 16};
  CHECK(marker_in_bounds(k, d, Vec3(8, 8, 8)));
  CHECK(marker_in_bounds(k, d, Vec3(2.0, 8, 8)));
  CHECK_FALSE(marker_in_bounds(k, d, Vec3(1.9, 8, 8)));
  CHECK_FALSE(marker_in_bounds(k, d, Vec3(8, 13.1, 8)));
  const IBKernel k3{IBKernel::Family::Roma3};
  CHECK(marker_in_bounds(k3, d, Vec3(1.6, 8, 8)));
}
