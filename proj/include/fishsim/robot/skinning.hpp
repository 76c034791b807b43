// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The FishSim Authors

#pragma once

#include <array>
#include <map>
#include <vector>

#include "fishsim/robot/dynamics.hpp"

namespace fishsim::robot {

/// Closed triangle mesh with per-vertex blend weights over the links.
struct SkinMesh {
  std::vector<Vec3> vertices;  // rest pose, world frame with base at identity
  std::vector<std::array<int, 3>> triangles;
  MatX weights;  // n_vertices x n_links, rows sum to 1

  void validate(int n_links) const {
    if (weights.rows() != static_cast<Eigen::Index>(vertices.size()) ||
        weights.cols() != n_links) {
      throw InputError("skin weights must be n_vertices x n_links");
    }
    for (Eigen::Index v = 0; v < weights.rows(); ++v) {
      if (weights.row(v).minCoeff() < -1e-12)
        throw InputError("negative skin weight at vertex " + std::to_string(v));
      if (std::abs(weights.row(v).sum() - 1.0) > 1e-12)
        throw InputError("skin weights of vertex " + std::to_string(v) +
                         " do not sum to 1");
    }
    // watertight: every edge shared by exactly two triangles
    std::map<std::pair<int, int>, int> edge_count;
    for (const auto& t : triangles) {
      for (int e = 0; e < 3; ++e) {
        int a = t[e], b = t[(e + 1) % 3];
        if (a == b) throw InputError("degenerate triangle edge");
        if (a > b) std::swap(a, b);
        edge_count[{a, b}]++;
      }
    }
    for (const auto& [edge, count] : edge_count) {
      if (count != 2)
        throw InputError("mesh is not watertight: edge (" + std::to_string(edge.first) +
                         "," + std::to_string(edge.second) + ") shared by " +
                         std::to_string(count) + " triangles");
    }
  }

  Real total_area() const {
    Real a = 0.0;
    for (const auto& t : triangles) {
      a += 0.5 * (vertices[t[1]] - vertices[t[0]]).cross(vertices[t[2]] - vertices[t[0]]).norm();
    }
    return a;
  }

  /// Signed volume by the divergence theorem (positive for outward
  /// oriented watertight meshes).
  Real volume() const {
    Real v = 0.0;
    for (const auto& t : triangles)
      v += vertices[t[0]].dot(vertices[t[1]].cross(vertices[t[2]])) / 6.0;
    return v;
  }
};

/// Rest-pose transforms of every link (base at identity, q = 0); the
/// skinning blend maps rest-frame points through current * rest^-1.
struct RestPose {
  std::vector<Mat3> R;
  std::vector<Vec3> p;

  static RestPose of(const Skeleton& skel) {
    auto st = JointState::zero(skel);
    const auto kc = forward_kinematics(skel, st);
    RestPose rp;
    rp.R = kc.R_world;
    rp.p = kc.p_world;
    return rp;
  }
};

/// Per-bone rigid transforms current-world <- rest-world.
struct BoneTransforms {
  std::vector<Mat3> R;
  std::vector<Vec3> t;

  static BoneTransforms of(const KinematicsCache& kc, const RestPose& rest) {
    const size_t nb = kc.R_world.size();
    BoneTransforms bt;
    bt.R.resize(nb);
    bt.t.resize(nb);
    for (size_t b = 0; b < nb; ++b) {
      bt.R[b] = kc.R_world[b] * rest.R[b].transpose();
      bt.t[b] = kc.p_world[b] - bt.R[b] * rest.p[b];
    }
    return bt;
  }

  Vec3 apply(int b, const Vec3& x) const { return R[b] * x + t[b]; }
};

/// Linear blend skinning of points: x' = sum_b w_b (T_b x).
inline Vec3 skin_point(const BoneTransforms& bt, const Eigen::Ref<const VecX>& w,
                       const Vec3& x_rest) {
  Vec3 out = Vec3::Zero();
  for (int b = 0; b < w.size(); ++b) {
    if (w[b] != 0.0) out += w[b] * bt.apply(b, x_rest);
  }
  return out;
}

/// Exact time derivative of the blend: each bone contributes its rigid
/// velocity field evaluated at the bone-transformed point.
inline Vec3 skin_point_velocity(const KinematicsCache& kc, const BoneTransforms& bt,
                                const Eigen::Ref<const VecX>& w, const Vec3& x_rest) {
  Vec3 out = Vec3::Zero();
  for (int b = 0; b < w.size(); ++b) {
    if (w[b] != 0.0) {
      const Vec3 xb = bt.apply(b, x_rest);
      out += w[b] * (kc.v_origin_world[b] + kc.omega_world[b].cross(xb - kc.p_world[b]));
    }
  }
  return out;
}

/// Deformed vertices and their velocities for a whole mesh.
inline void skin_mesh(const Skeleton& skel, const KinematicsCache& kc, const RestPose& rest,
                      const SkinMesh& mesh, std::vector<Vec3>& positions,
                      std::vector<Vec3>& velocities) {
  (void)skel;
  const auto bt = BoneTransforms::of(kc, rest);
  const auto n = mesh.vertices.size();
  positions.resize(n);
  velocities.resize(n);
#pragma omp parallel for schedule(static)
  for (long long v = 0; v < static_cast<long long>(n); ++v) {
    positions[v] = skin_point(bt, mesh.weights.row(v), mesh.vertices[v]);
    velocities[v] = skin_point_velocity(kc, bt, mesh.weights.row(v), mesh.vertices[v]);
  }
}

/// Generalized force from a world force applied at a skinned sample:
/// the sample Jacobian is the weight-blend of per-bone point Jacobians,
/// each evaluated at the bone-transformed point.
inline void accumulate_skinned_force(const Skeleton& skel, const KinematicsCache& kc,
                                     const BoneTransforms& bt,
                                     const Eigen::Ref<const VecX>& w, const Vec3& x_rest,
                                     const Vec3& f_world, VecX& tau) {
  for (int b = 0; b < w.size(); ++b) {
    if (w[b] != 0.0) {
      accumulate_point_force(skel, kc, b, bt.apply(b, x_rest), w[b] * f_world, tau);
    }
  }
}

}  // namespace fishsim::robot
