// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The FishSim Authors

#pragma once

#include <vector>

#include "fishsim/ib/kernel.hpp"
#include "fishsim/lbm/lattice.hpp"

namespace fishsim::ib {

/// Marker positions are expressed in lattice cell coordinates (cell
/// centers at integers); velocities and forces in lattice units.

/// True when the marker keeps the kernel support strictly inside the
/// box; markers outside this margin must trigger a recentering check.
inline bool marker_in_bounds(const IBKernel& kernel, const Index3& dims, const Vec3& x) {
  const Real margin = 0.5 * kernel.support();
  for (int a = 0; a < 3; ++a) {
    if (x[a] < margin || x[a] > dims[a] - 1 - margin) return false;
  }
  return true;
}

/// u(X) = sum_cells u_cell phi^3(cell - X).
inline Vec3 interpolate_velocity(const lbm::FluidMacro& macro, const IBKernel& kernel,
                                 const Vec3& x) {
  const Index3 d = macro.dims;
  int xlo, xhi, ylo, yhi, zlo, zhi;
  kernel.range(x.x(), xlo, xhi);
  kernel.range(x.y(), ylo, yhi);
  kernel.range(x.z(), zlo, zhi);
  Vec3 u = Vec3::Zero();
  for (int k = std::max(zlo, 0); k <= std::min(zhi, d[2] - 1); ++k) {
    const Real wz = kernel.phi(k - x.z());
    for (int j = std::max(ylo, 0); j <= std::min(yhi, d[1] - 1); ++j) {
      const Real wyz = wz * kernel.phi(j - x.y());
      for (int i = std::max(xlo, 0); i <= std::min(xhi, d[0] - 1); ++i) {
        const Real w = wyz * kernel.phi(i - x.x());
        const size_t c = static_cast<size_t>(i) +
                         static_cast<size_t>(d[0]) * (j + static_cast<size_t>(d[1]) * k);
        u += w * macro.u[c];
      }
    }
  }
  return u;
}

/// F_cell += F phi^3(cell - X). In lattice units the cell volume is 1,
/// so the spread force density integrates back to exactly F.
inline void spread_force(lbm::BodyForceField& field, const IBKernel& kernel, const Vec3& x,
                         const Vec3& f) {
  const Index3 d = field.dims;
  int xlo, xhi, ylo, yhi, zlo, zhi;
  kernel.range(x.x(), xlo, xhi);
  kernel.range(x.y(), ylo, yhi);
  kernel.range(x.z(), zlo, zhi);
  for (int k = std::max(zlo, 0); k <= std::min(zhi, d[2] - 1); ++k) {
    const Real wz = kernel.phi(k - x.z());
    for (int j = std::max(ylo, 0); j <= std::min(yhi, d[1] - 1); ++j) {
      const Real wyz = wz * kernel.phi(j - x.y());
      for (int i = std::max(xlo, 0); i <= std::min(xhi, d[0] - 1); ++i) {
        const Real w = wyz * kernel.phi(i - x.x());
        const size_t c = static_cast<size_t>(i) +
                         static_cast<size_t>(d[0]) * (j + static_cast<size_t>(d[1]) * k);
        field.F[c] += w * f;
      }
    }
  }
}

enum class WallCondition {
  Slip,    // penalize only the normal velocity mismatch (free tangential slip)
  NoSlip,  // penalize the full mismatch (validation studies)
};

/// Direct forcing: F = rho A h (u_body - u_fluid) / dt, everything in
/// physical units; h is the marker shell thickness (one cell).
inline Vec3 direct_forcing(const Vec3& u_body, const Vec3& u_fluid, const Vec3& normal,
                           Real rho_phys, Real area, Real h, Real dt, WallCondition wall) {
  Vec3 du = u_body - u_fluid;
  if (wall == WallCondition::Slip) du = du.dot(normal) * normal;
  return rho_phys * area * h / dt * du;
}

/// Per-step coupling diagnostics.
struct CouplingStats {
  Vec3 total_force_on_fluid = Vec3::Zero();  // N, world frame
  Vec3 total_force_on_body = Vec3::Zero();   // N, world frame
  Real power_on_body = 0.0;                  // W, sum F_body . u_body
  int out_of_bounds_markers = 0;
};

}  // namespace fishsim::ib
