// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The FishSim Authors

#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "fishsim/core/types.hpp"
#include "fishsim/core/units.hpp"

namespace fishsim::lbm {

/// D3Q19 velocity set. Direction 0 is the rest population, 1..6 the
/// axis directions, 7..18 the face diagonals. cs^2 = 1/3.
struct D3Q19 {
  static constexpr int Q = 19;
  static constexpr Real cs2 = 1.0 / 3.0;

  static constexpr int ex[Q] = {0, 1, -1, 0, 0,  0, 0,  1, -1, 1,
                                -1, 1, -1, 1, -1, 0, 0,  0, 0};
  static constexpr int ey[Q] = {0, 0, 0,  1, -1, 0, 0,  1, -1, -1,
                                1, 0, 0,  0, 0,  1, -1, 1, -1};
  static constexpr int ez[Q] = {0, 0, 0,  0, 0,  1, -1, 0, 0,  0,
                                0, 1, -1, -1, 1, 1, -1, -1, 1};
  static constexpr Real w[Q] = {
      1.0 / 3.0,  1.0 / 18.0, 1.0 / 18.0, 1.0 / 18.0, 1.0 / 18.0,
      1.0 / 18.0, 1.0 / 18.0, 1.0 / 36.0, 1.0 / 36.0, 1.0 / 36.0,
      1.0 / 36.0, 1.0 / 36.0, 1.0 / 36.0, 1.0 / 36.0, 1.0 / 36.0,
      1.0 / 36.0, 1.0 / 36.0, 1.0 / 36.0, 1.0 / 36.0};

  static int opposite(int i) {
    // pairs are laid out (1,2)(3,4)... for axes; diagonals likewise
    if (i == 0) return 0;
    return (i % 2 == 1) ? i + 1 : i - 1;
  }
};

/// BGK equilibrium for one direction.
inline Real equilibrium_dir(int i, Real rho, const Vec3& u) {
  const Real eu = D3Q19::ex[i] * u.x() + D3Q19::ey[i] * u.y() + D3Q19::ez[i] * u.z();
  const Real u2 = u.squaredNorm();
  return D3Q19::w[i] * rho * (1.0 + 3.0 * eu + 4.5 * eu * eu - 1.5 * u2);
}

inline std::array<Real, D3Q19::Q> equilibrium(Real rho, const Vec3& u) {
  std::array<Real, D3Q19::Q> f;
  for (int i = 0; i < D3Q19::Q; ++i) f[i] = equilibrium_dir(i, rho, u);
  return f;
}

enum class BoundaryMode {
  Periodic,          // wrap-around, validation suites
  OpenExtrapolated,  // free inflow/outflow by non-equilibrium extrapolation
};

/// Distribution storage for a fixed-size box, direction-major
/// (f[i * n_cells + cell]) with A/B double buffering.
class LatticeGrid {
public:
  LatticeGrid() = default;
  LatticeGrid(Index3 dims, const UnitMap& units,
              BoundaryMode mode = BoundaryMode::OpenExtrapolated)
      : dims_(dims), units_(units), tau_(units.tau()), mode_(mode) {
    for (int a = 0; a < 3; ++a) {
      if (dims_[a] < 8) throw InputError("lattice dims must each be >= 8");
    }
    if (!(tau_ > 0.5)) throw InputError("tau must exceed 0.5");
    n_cells_ = static_cast<size_t>(dims_[0]) * dims_[1] * dims_[2];
    f_a_.assign(n_cells_ * D3Q19::Q, 0.0);
    f_b_.assign(n_cells_ * D3Q19::Q, 0.0);
    reset_to_rest();
  }

  Index3 dims() const { return dims_; }
  size_t n_cells() const { return n_cells_; }
  Real tau() const { return tau_; }
  const UnitMap& units() const { return units_; }
  BoundaryMode boundary_mode() const { return mode_; }
  void set_boundary_mode(BoundaryMode m) { mode_ = m; }

  size_t cell_index(int x, int y, int z) const {
    return static_cast<size_t>(x) +
           static_cast<size_t>(dims_[0]) *
               (static_cast<size_t>(y) + static_cast<size_t>(dims_[1]) * z);
  }

  Real& f(int dir, size_t cell) { return f_a_[dir * n_cells_ + cell]; }
  Real f(int dir, size_t cell) const { return f_a_[dir * n_cells_ + cell]; }

  std::vector<Real>& front() { return f_a_; }
  std::vector<Real>& back() { return f_b_; }
  const std::vector<Real>& front() const { return f_a_; }
  void swap_buffers() { f_a_.swap(f_b_); }

  /// Quiescent equilibrium at unit lattice density.
  void reset_to_rest() {
    for (int i = 0; i < D3Q19::Q; ++i) {
      const Real feq = D3Q19::w[i];
      Real* fi = f_a_.data() + static_cast<size_t>(i) * n_cells_;
      for (size_t c = 0; c < n_cells_; ++c) fi[c] = feq;
    }
  }

  /// Initialize from a macroscopic field (lattice units).
  template <class RhoF, class UF>
  void initialize(RhoF&& rho_of, UF&& u_of) {
    for (int z = 0; z < dims_[2]; ++z)
      for (int y = 0; y < dims_[1]; ++y)
        for (int x = 0; x < dims_[0]; ++x) {
          const size_t c = cell_index(x, y, z);
          const auto feq = equilibrium(rho_of(x, y, z), u_of(x, y, z));
          for (int i = 0; i < D3Q19::Q; ++i) f(i, c) = feq[i];
        }
  }

private:
  Index3 dims_ = {0, 0, 0};
  UnitMap units_;
  Real tau_ = 0.0;
  BoundaryMode mode_ = BoundaryMode::OpenExtrapolated;
  size_t n_cells_ = 0;
  std::vector<Real> f_a_;
  std::vector<Real> f_b_;
};

/// Macroscopic moments in lattice units.
struct FluidMacro {
  Index3 dims = {0, 0, 0};
  std::vector<Real> rho;
  std::vector<Vec3> u;
  int n_nonpositive_rho = 0;

  void resize(Index3 d) {
    dims = d;
    const size_t n = static_cast<size_t>(d[0]) * d[1] * d[2];
    rho.assign(n, 1.0);
    u.assign(n, Vec3::Zero());
  }
};

/// Per-cell lattice force density (both IB spread forces and the
/// non-inertial virtual force accumulate here).
struct BodyForceField {
  Index3 dims = {0, 0, 0};
  std::vector<Vec3> F;

  void resize(Index3 d) {
    dims = d;
    F.assign(static_cast<size_t>(d[0]) * d[1] * d[2], Vec3::Zero());
  }
  void clear() { std::fill(F.begin(), F.end(), Vec3::Zero()); }
};

}  // namespace fishsim::lbm
