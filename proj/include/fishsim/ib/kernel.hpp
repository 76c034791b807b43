// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The FishSim Authors

#pragma once

#include <cmath>

#include "fishsim/core/types.hpp"

namespace fishsim::ib {

/// Smoothed delta kernels for marker/grid transfer. Both choices
/// satisfy the discrete partition of unity and the zero first moment,
/// so uniform and linear fields interpolate exactly.
struct IBKernel {
  enum class Family { Peskin4, Roma3 };

  Family family = Family::Peskin4;

  int support() const { return family == Family::Peskin4 ? 4 : 3; }

  Real phi(Real r) const {
    const Real a = std::abs(r);
    if (family == Family::Peskin4) {
      if (a >= 2.0) return 0.0;
      if (a <= 1.0) return 0.125 * (3.0 - 2.0 * a + std::sqrt(1.0 + 4.0 * a - 4.0 * a * a));
      return 0.125 * (5.0 - 2.0 * a - std::sqrt(-7.0 + 12.0 * a - 4.0 * a * a));
    }
    // Roma-Peskin 3-point
    if (a <= 0.5) return (1.0 + std::sqrt(1.0 - 3.0 * r * r)) / 3.0;
    if (a <= 1.5) return (5.0 - 3.0 * a - std::sqrt(-3.0 * (1.0 - a) * (1.0 - a) + 1.0)) / 6.0;
    return 0.0;
  }

  /// Inclusive cell range touched by a marker coordinate.
  void range(Real x, int& lo, int& hi) const {
    const Real half = 0.5 * support();
    lo = static_cast<int>(std::ceil(x - half));
    hi = static_cast<int>(std::floor(x + half));
  }

  static IBKernel parse(const std::string& name) {
    if (name == "peskin4") return {Family::Peskin4};
    if (name == "roma3") return {Family::Roma3};
    throw InputError("unknown IB kernel '" + name + "' (use peskin4 or roma3)");
  }

  const char* name() const { return family == Family::Peskin4 ? "peskin4" : "roma3"; }
};

}  // namespace fishsim::ib
