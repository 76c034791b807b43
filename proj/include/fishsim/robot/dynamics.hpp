// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The FishSim Authors

#pragma once

#include <vector>

#include "fishsim/robot/skeleton.hpp"

namespace fishsim::robot {

/// Per-link kinematics for one configuration: joint transforms, world
/// poses and spatial velocities in both body and world coordinates.
struct KinematicsCache {
  std::vector<SpatialTransform> x_up;  // parent coords -> link coords
  std::vector<Mat3> R_world;           // link -> world rotation
  std::vector<Vec3> p_world;           // link origin in world
  std::vector<Vec6> v_body;            // spatial velocity, body coords
  std::vector<Vec3> omega_world;       // angular velocity, world
  std::vector<Vec3> v_origin_world;    // velocity of the link origin, world
};

inline KinematicsCache forward_kinematics(const Skeleton& skel, const JointState& st) {
  const int nb = skel.n_links();
  KinematicsCache kc;
  kc.x_up.resize(nb);
  kc.R_world.resize(nb);
  kc.p_world.resize(nb);
  kc.v_body.resize(nb);
  kc.omega_world.resize(nb);
  kc.v_origin_world.resize(nb);

  for (int i = 0; i < nb; ++i) {
    const auto& l = skel.links[i];
    if (i == 0) {
      kc.R_world[0] = st.base_quat.toRotationMatrix();
      kc.p_world[0] = st.base_pos;
      kc.x_up[0] = {kc.R_world[0].transpose(), st.base_pos};
      kc.v_body[0] = skel.floating_base() ? Vec6(st.v.head<6>()) : Vec6(Vec6::Zero());
    } else {
      Mat3 r_joint = Mat3::Identity();
      Real qd = 0.0;
      Vec3 axis = Vec3::Zero();
      if (l.joint == JointType::Revolute) {
        const int ji = skel.joint_index(i);
        axis = l.axis.normalized();
        r_joint = Eigen::AngleAxisd(st.q[ji], axis).toRotationMatrix();
        qd = st.v[skel.dof_index(i)];
      }
      const Mat3 r_rel = l.joint_rotation * r_joint;  // link -> parent
      kc.x_up[i] = {r_rel.transpose(), l.joint_origin};
      const int pa = l.parent;
      kc.R_world[i] = kc.R_world[pa] * r_rel;
      kc.p_world[i] = kc.p_world[pa] + kc.R_world[pa] * l.joint_origin;
      Vec6 v = kc.x_up[i].apply_motion(kc.v_body[pa]);
      if (l.joint == JointType::Revolute) v.head<3>() += axis * qd;
      kc.v_body[i] = v;
    }
    kc.omega_world[i] = kc.R_world[i] * kc.v_body[i].head<3>();
    kc.v_origin_world[i] = kc.R_world[i] * kc.v_body[i].tail<3>();
  }
  return kc;
}

/// World velocity of a body-fixed point of link i.
inline Vec3 point_velocity(const KinematicsCache& kc, int link, const Vec3& p_world) {
  return kc.v_origin_world[link] + kc.omega_world[link].cross(p_world - kc.p_world[link]);
}

/// Composite-rigid-body mass matrix in the coordinates
/// [base omega (body); base v (body); joint rates].
inline MatX mass_matrix(const Skeleton& skel, const KinematicsCache& kc) {
  const int nb = skel.n_links();
  const int nd = skel.n_dofs();
  std::vector<Mat6> ic(nb);
  for (int i = 0; i < nb; ++i) {
    const auto& l = skel.links[i];
    ic[i] = spatial_inertia(l.mass, l.com, l.inertia_com);
  }
  for (int i = nb - 1; i >= 1; --i) {
    const Mat6 x = kc.x_up[i].motion_matrix();
    ic[skel.links[i].parent] += x.transpose() * ic[i] * x;
  }

  MatX h = MatX::Zero(nd, nd);
  if (skel.floating_base()) h.topLeftCorner<6, 6>() = ic[0];

  for (int i = 1; i < nb; ++i) {
    if (skel.links[i].joint != JointType::Revolute) continue;
    const int di = skel.dof_index(i);
    Vec6 s = Vec6::Zero();
    s.head<3>() = skel.links[i].axis.normalized();
    Vec6 f = ic[i] * s;
    h(di, di) = s.dot(f);
    int j = i;
    while (skel.links[j].parent >= 0) {
      f = kc.x_up[j].transpose_force(f);
      j = skel.links[j].parent;
      if (j == 0) {
        if (skel.floating_base()) {
          h.block<6, 1>(0, di) = f;
          h.block<1, 6>(di, 0) = f.transpose();
        }
      } else if (skel.links[j].joint == JointType::Revolute) {
        Vec6 sj = Vec6::Zero();
        sj.head<3>() = skel.links[j].axis.normalized();
        const int dj = skel.dof_index(j);
        h(dj, di) = sj.dot(f);
        h(di, dj) = h(dj, di);
      }
    }
  }
  return h;
}

/// Coriolis/centrifugal plus gravity bias via a recursive Newton-Euler
/// sweep with zero acceleration (gravity enters as a base acceleration).
inline VecX bias_forces(const Skeleton& skel, const JointState& st,
                        const KinematicsCache& kc, const Vec3& gravity) {
  const int nb = skel.n_links();
  std::vector<Vec6> a(nb), f(nb);

  Vec6 a0 = Vec6::Zero();
  a0.tail<3>() = -kc.R_world[0].transpose() * gravity;
  a[0] = a0;
  for (int i = 0; i < nb; ++i) {
    const auto& l = skel.links[i];
    if (i > 0) {
      a[i] = kc.x_up[i].apply_motion(a[l.parent]);
      if (l.joint == JointType::Revolute) {
        Vec6 s = Vec6::Zero();
        s.head<3>() = l.axis.normalized();
        a[i] += cross_motion(kc.v_body[i], s * st.v[skel.dof_index(i)]);
      }
    }
    const Mat6 ii = spatial_inertia(l.mass, l.com, l.inertia_com);
    f[i] = ii * a[i] + cross_force(kc.v_body[i], ii * kc.v_body[i]);
  }

  VecX c = VecX::Zero(skel.n_dofs());
  for (int i = nb - 1; i >= 0; --i) {
    const auto& l = skel.links[i];
    if (i == 0) {
      if (skel.floating_base()) c.head<6>() = f[0];
    } else {
      if (l.joint == JointType::Revolute) {
        Vec6 s = Vec6::Zero();
        s.head<3>() = l.axis.normalized();
        c[skel.dof_index(i)] = s.dot(f[i]);
      }
      f[l.parent] += kc.x_up[i].transpose_force(f[i]);
    }
  }
  return c;
}

/// Joint-space forces: actuation (clamped to the torque limit) plus
/// spring and damper, zero on the base DOFs.
/// Returns the generalized vector; `clamped` reports saturation.
inline VecX internal_forces(const Skeleton& skel, const JointState& st,
                            const VecX& actuation, bool* clamped = nullptr) {
  if (actuation.size() != skel.n_joints())
    throw InputError("actuation size does not match joint count");
  VecX tau = VecX::Zero(skel.n_dofs());
  bool any_clamped = false;
  for (int i = 1; i < skel.n_links(); ++i) {
    const auto& l = skel.links[i];
    if (l.joint != JointType::Revolute) continue;
    const int di = skel.dof_index(i);
    const int ji = skel.joint_index(i);
    Real sigma = actuation[ji];
    if (std::abs(sigma) > l.torque_limit) {
      sigma = std::clamp(sigma, -l.torque_limit, l.torque_limit);
      any_clamped = true;
    }
    tau[di] = sigma - l.stiffness * (st.q[ji] - l.q_rest) - l.damping * st.v[di];
  }
  if (clamped) *clamped = any_clamped;
  return tau;
}

/// Stiff penalty applied when a joint runs past its limit (the integrator
/// additionally clamps position and zeroes the outward rate).
inline VecX joint_limit_forces(const Skeleton& skel, const JointState& st,
                               Real k_limit = 50.0, Real c_limit = 0.5) {
  VecX tau = VecX::Zero(skel.n_dofs());
  for (int i = 1; i < skel.n_links(); ++i) {
    const auto& l = skel.links[i];
    if (l.joint != JointType::Revolute) continue;
    const int di = skel.dof_index(i);
    const int ji = skel.joint_index(i);
    if (st.q[ji] > l.limit_hi)
      tau[di] = -k_limit * (st.q[ji] - l.limit_hi) - c_limit * std::max(st.v[di], 0.0);
    else if (st.q[ji] < l.limit_lo)
      tau[di] = -k_limit * (st.q[ji] - l.limit_lo) - c_limit * std::min(st.v[di], 0.0);
  }
  return tau;
}

/// Solves M(q) qdd + C(q, qd) = tau_int + tau_ext.
inline VecX forward_dynamics(const Skeleton& skel, const JointState& st,
                             const VecX& tau_int, const VecX& tau_ext,
                             const Vec3& gravity = Vec3::Zero()) {
  const auto kc = forward_kinematics(skel, st);
  const MatX m = mass_matrix(skel, kc);
  const VecX c = bias_forces(skel, st, kc, gravity);
  Eigen::LLT<MatX> llt(m);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("mass matrix is not positive definite; check link inertias");
  }
  return llt.solve(tau_int + tau_ext - c);
}

/// Aggregates a world-frame point force on one link into the
/// generalized-force vector (Jacobian-transpose mapping).
inline void accumulate_point_force(const Skeleton& skel, const KinematicsCache& kc,
                                   int link, const Vec3& p_world, const Vec3& f_world,
                                   VecX& tau) {
  if (skel.floating_base()) {
    const Mat3 rt = kc.R_world[0].transpose();
    tau.head<3>() += rt * (p_world - kc.p_world[0]).cross(f_world);
    tau.segment<3>(3) += rt * f_world;
  }
  int j = link;
  while (j > 0) {
    const auto& l = skel.links[j];
    if (l.joint == JointType::Revolute) {
      const Vec3 axis_w = kc.R_world[j] * l.axis.normalized();
      tau[skel.dof_index(j)] += axis_w.cross(p_world - kc.p_world[j]).dot(f_world);
    }
    j = l.parent;
  }
}

/// Gravity plus hydrostatic buoyancy (including the bladder volume,
/// which acts at the root link's volume centroid), as generalized forces.
inline VecX buoyancy_gravity_forces(const Skeleton& skel,
                                    const KinematicsCache& kc, const Bladder& bladder,
                                    Real rho_fluid, const Vec3& gravity) {
  VecX tau = VecX::Zero(skel.n_dofs());
  for (int i = 0; i < skel.n_links(); ++i) {
    const auto& l = skel.links[i];
    const Vec3 com_w = kc.p_world[i] + kc.R_world[i] * l.com;
    accumulate_point_force(skel, kc, i, com_w, l.mass * gravity, tau);
    if (l.displaced_volume > 0.0) {
      const Vec3 cen_w = kc.p_world[i] + kc.R_world[i] * l.volume_centroid;
      accumulate_point_force(skel, kc, i, cen_w, -rho_fluid * l.displaced_volume * gravity, tau);
    }
  }
  if (bladder.volume > 0.0) {
    const Vec3 cen_w = kc.p_world[0] + kc.R_world[0] * bladder.centroid;
    accumulate_point_force(skel, kc, 0, cen_w, -rho_fluid * bladder.volume * gravity, tau);
  }
  return tau;
}

/// One semi-implicit Euler step with optional substeps. Actuation is
/// held constant; tau_ext is treated as constant over the step.
inline void integrate(const Skeleton& skel, JointState& st, const VecX& actuation,
                      const VecX& tau_ext, Real dt, int substeps,
                      const Vec3& gravity = Vec3::Zero()) {
  const Real h = dt / substeps;
  for (int s = 0; s < substeps; ++s) {
    const VecX tau_int = internal_forces(skel, st, actuation) + joint_limit_forces(skel, st);
    st.qdd = forward_dynamics(skel, st, tau_int, tau_ext, gravity);
    st.v += h * st.qdd;

    const int nb_dofs = skel.base_dofs();
    if (nb_dofs == 6) {
      const Mat3 r = st.base_quat.toRotationMatrix();
      st.base_pos += h * (r * st.v.segment<3>(3));
      st.base_quat = (st.base_quat * quat_exp(st.v.head<3>() * h)).normalized();
    }
    for (int i = 1; i < skel.n_links(); ++i) {
      const auto& l = skel.links[i];
      if (l.joint != JointType::Revolute) continue;
      const int di = skel.dof_index(i);
      const int ji = skel.joint_index(i);
      st.q[ji] += h * st.v[di];
      if (st.q[ji] > l.limit_hi) {
        st.q[ji] = l.limit_hi;
        st.v[di] = std::min(st.v[di], 0.0);
      } else if (st.q[ji] < l.limit_lo) {
        st.q[ji] = l.limit_lo;
        st.v[di] = std::max(st.v[di], 0.0);
      }
    }
  }
}

/// Kinetic plus gravitational potential energy (test instrumentation).
inline Real mechanical_energy(const Skeleton& skel, const JointState& st, const Vec3& gravity) {
  const auto kc = forward_kinematics(skel, st);
  Real e = 0.0;
  for (int i = 0; i < skel.n_links(); ++i) {
    const auto& l = skel.links[i];
    const Mat6 ii = spatial_inertia(l.mass, l.com, l.inertia_com);
    e += 0.5 * kc.v_body[i].dot(ii * kc.v_body[i]);
    const Vec3 com_w = kc.p_world[i] + kc.R_world[i] * l.com;
    e -= l.mass * gravity.dot(com_w);
  }
  return e;
}

}  // namespace fishsim::robot
