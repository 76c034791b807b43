// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The FishSim Authors

#pragma once

#include <fstream>
#include <string>

#include "fishsim/lbm/lattice.hpp"

namespace fishsim::lbm {

/// Legacy-format structured-points dump of velocity (m/s) and density
/// (kg/m^3) for offline visualization.
inline void write_vtk(const std::string& path, const FluidMacro& macro,
                      const UnitMap& units, const Vec3& origin) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open field dump for writing: " + path);
  const Index3 d = macro.dims;
  const size_t n = macro.rho.size();
  out << "# vtk DataFile Version 3.0\n";
  out << "fishsim fluid field\n";
  out << "ASCII\n";
  out << "DATASET STRUCTURED_POINTS\n";
  out << "DIMENSIONS " << d[0] << ' ' << d[1] << ' ' << d[2] << '\n';
  out << "ORIGIN " << origin.x() << ' ' << origin.y() << ' ' << origin.z() << '\n';
  out << "SPACING " << units.dx << ' ' << units.dx << ' ' << units.dx << '\n';
  out << "POINT_DATA " << n << '\n';
  out << "VECTORS velocity double\n";
  for (size_t c = 0; c < n; ++c) {
    const Vec3 u = units.vel_to_physical(macro.u[c]);
    out << u.x() << ' ' << u.y() << ' ' << u.z() << '\n';
  }
  out << "SCALARS density double\n";
  out << "LOOKUP_TABLE default\n";
  for (size_t c = 0; c < n; ++c) out << macro.rho[c] * units.rho_phys << '\n';
  if (!out) throw InputError("write error on " + path);
}

}  // namespace fishsim::lbm
