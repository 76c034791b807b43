// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The FishSim Authors

#pragma once

#include <string>
#include <vector>

#include "fishsim/core/types.hpp"
#include "fishsim/robot/spatial.hpp"

namespace fishsim::robot {

enum class JointType { Free, Revolute, Fixed };

struct Link {
  std::string name;
  int parent = -1;  // -1 marks the root
  JointType joint = JointType::Revolute;
  Vec3 joint_origin = Vec3::Zero();    // pivot position in the parent frame
  Mat3 joint_rotation = Mat3::Identity();  // fixed mount rotation (link -> parent at q = 0)
  Vec3 axis = Vec3::UnitZ();           // revolute axis in the link frame

  Real mass = 0.0;
  Vec3 com = Vec3::Zero();             // COM offset in the link frame
  Mat3 inertia_com = Mat3::Identity();

  Real stiffness = 0.0;   // joint spring N*m/rad toward q_rest
  Real damping = 0.0;     // N*m*s/rad
  Real q_rest = 0.0;
  Real limit_lo = -1.5;
  Real limit_hi = 1.5;
  Real torque_limit = 1.0;

  // hydrostatics: displaced volume share and its centroid (link frame)
  Real displaced_volume = 0.0;
  Vec3 volume_centroid = Vec3::Zero();
};

struct Bladder {
  Real volume = 0.0;      // m^3
  Real volume_min = 0.0;
  Real volume_max = 0.0;
  Real rate_bound = 0.0;  // m^3 per control step
  Vec3 centroid = Vec3::Zero();  // attachment point, base-link frame; at the
                                 // body volume centroid a neutral fish is
                                 // torque-free in any attitude

  void apply_change(Real dv) {
    volume = std::clamp(volume + std::clamp(dv, -rate_bound, rate_bound),
                        volume_min, volume_max);
  }
};

/// Articulated tree: one root (free-floating or anchored) plus revolute
/// or welded children. Branching is allowed.
class Skeleton {
public:
  std::vector<Link> links;
  Bladder bladder;
  std::string name;

  int n_links() const { return static_cast<int>(links.size()); }

  int n_joints() const {
    int n = 0;
    for (size_t i = 1; i < links.size(); ++i)
      if (links[i].joint == JointType::Revolute) ++n;
    return n;
  }

  bool floating_base() const {
    return !links.empty() && links[0].joint == JointType::Free;
  }

  int base_dofs() const { return floating_base() ? 6 : 0; }
  int n_dofs() const { return base_dofs() + n_joints(); }

  /// Velocity-space index of link i's joint, or -1 when it has none.
  int dof_index(int i) const {
    if (i == 0) return floating_base() ? 0 : -1;
    if (links[i].joint != JointType::Revolute) return -1;
    int idx = base_dofs();
    for (int k = 1; k < i; ++k)
      if (links[k].joint == JointType::Revolute) ++idx;
    return idx;
  }

  /// Index of link i's angle within the joint-angle vector q.
  int joint_index(int i) const {
    const int d = dof_index(i);
    return d < 0 ? -1 : d - base_dofs();
  }

  void validate() const {
    if (links.empty()) throw InputError("skeleton has no links");
    if (links[0].parent != -1) throw InputError("link 0 must be the root");
    if (links[0].joint == JointType::Revolute)
      throw InputError("root joint must be free or fixed");
    for (size_t i = 1; i < links.size(); ++i) {
      const auto& l = links[i];
      if (l.parent < 0 || l.parent >= static_cast<int>(i))
        throw InputError("link " + l.name + ": parent must precede it (tree order)");
      if (l.joint == JointType::Free)
        throw InputError("link " + l.name + ": only the root may be free");
      if (l.joint == JointType::Revolute && l.axis.norm() < 1e-12)
        throw InputError("link " + l.name + ": zero joint axis");
      if (l.limit_lo > l.limit_hi)
        throw InputError("link " + l.name + ": joint limits inverted");
    }
    for (const auto& l : links) {
      if (!(l.mass > 0.0)) throw InputError("link " + l.name + ": mass must be positive");
      if ((l.inertia_com - l.inertia_com.transpose()).norm() > 1e-9 * (1.0 + l.inertia_com.norm()))
        throw InputError("link " + l.name + ": inertia tensor not symmetric");
      Eigen::SelfAdjointEigenSolver<Mat3> es(l.inertia_com);
      if (es.eigenvalues().minCoeff() <= 0.0)
        throw InputError("link " + l.name + ": inertia tensor not positive definite");
    }
  }

  Real total_mass() const {
    Real m = 0.0;
    for (const auto& l : links) m += l.mass;
    return m;
  }

  Real total_displaced_volume() const {
    Real v = 0.0;
    for (const auto& l : links) v += l.displaced_volume;
    return v;
  }

  /// Bladder volume at which buoyancy balances weight in a fluid of the
  /// given density.
  Real neutral_trim_volume(Real rho_fluid) const {
    return total_mass() / rho_fluid - total_displaced_volume();
  }
};

/// Generalized state. The base twist within v is expressed in base
/// coordinates as [omega; v_linear]; joint rates follow.
struct JointState {
  Vec3 base_pos = Vec3::Zero();
  Quat base_quat = Quat::Identity();
  VecX q;    // joint angles, size n_joints
  VecX v;    // generalized velocity, size n_dofs
  VecX qdd;  // last computed acceleration, size n_dofs

  static JointState zero(const Skeleton& s) {
    JointState st;
    st.q = VecX::Zero(s.n_joints());
    st.v = VecX::Zero(s.n_dofs());
    st.qdd = VecX::Zero(s.n_dofs());
    return st;
  }

  /// Base yaw-pitch-roll (Z-Y-X), ordering (roll, pitch, yaw).
  Vec3 base_euler() const { return matrix_to_euler_zyx(base_quat.toRotationMatrix()); }

  /// Full generalized-position vector as exposed to observations:
  /// [base_pos; base_euler; q].
  VecX generalized_q(const Skeleton& s) const {
    VecX out(6 + q.size());
    out.head<3>() = base_pos;
    out.segment<3>(3) = base_euler();
    out.tail(q.size()) = q;
    if (!s.floating_base()) return out;  // same layout either way
    return out;
  }
};

}  // namespace fishsim::robot
