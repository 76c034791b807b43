// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The FishSim Authors

#pragma once

#include <cmath>
#include <sstream>

#include "fishsim/core/types.hpp"

namespace fishsim {

/// Conversions between physical (SI) and lattice units.
///
/// Lattice units are fixed by dx -> 1 cell, dt_phys -> 1 step and
/// rho_phys -> 1. The BGK relaxation time follows from the viscosity:
///   nu_lat = nu_phys * dt / dx^2,  tau = 3 * nu_lat + 1/2.
struct UnitMap {
  Real dx = 0.0;        // m per cell
  Real dt_phys = 0.0;   // s per lattice step
  Real rho_phys = 0.0;  // kg/m^3 mapped to lattice density 1
  Real nu_phys = 0.0;   // m^2/s

  Real lattice_viscosity() const { return nu_phys * dt_phys / (dx * dx); }
  Real tau() const { return 3.0 * lattice_viscosity() + 0.5; }

  // velocity m/s <-> lattice
  Real vel_to_lattice(Real v) const { return v * dt_phys / dx; }
  Real vel_to_physical(Real v) const { return v * dx / dt_phys; }
  Vec3 vel_to_lattice(const Vec3& v) const { return v * (dt_phys / dx); }
  Vec3 vel_to_physical(const Vec3& v) const { return v * (dx / dt_phys); }

  // positions are measured from the same origin in both systems
  Real len_to_lattice(Real x) const { return x / dx; }
  Real len_to_physical(Real x) const { return x * dx; }

  // force density N/m^3 <-> lattice force density
  Real fdens_to_lattice(Real f) const {
    return f * dt_phys * dt_phys / (rho_phys * dx);
  }
  Real fdens_to_physical(Real f) const {
    return f * rho_phys * dx / (dt_phys * dt_phys);
  }
  Vec3 fdens_to_lattice(const Vec3& f) const {
    return f * (dt_phys * dt_phys / (rho_phys * dx));
  }

  // pressure from lattice density deviation: p = cs^2 (rho - 1) in lattice,
  // scaled by rho_phys dx^2 / dt^2
  Real pressure_to_physical(Real rho_lat) const {
    return (rho_lat - 1.0) / 3.0 * rho_phys * dx * dx / (dt_phys * dt_phys);
  }

  /// Validates the stability window required of every scenario.
  /// Throws InputError with the offending tau in the message.
  void validate(Real tau_min = 0.5, Real tau_max = 1.5) const {
    if (!(dx > 0.0) || !(dt_phys > 0.0) || !(rho_phys > 0.0) || !(nu_phys > 0.0)) {
      throw InputError("unit map requires positive dx, dt, rho, nu");
    }
    const Real t = tau();
    if (!(t > tau_min) || !(t <= tau_max)) {
      std::ostringstream os;
      os << "fluid parameters give tau = " << t << " from (nu = " << nu_phys
         << ", dx = " << dx << ", dt = " << dt_phys
         << "); stable range is (" << tau_min << ", " << tau_max << "]";
      throw InputError(os.str());
    }
  }
};

}  // namespace fishsim
