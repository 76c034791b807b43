// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The FishSim Authors

#pragma once

#include <functional>
#include <numeric>
#include <string>

#include "fishsim/robot/meshes.hpp"

namespace fishsim::robot {

struct RobotModel {
  Skeleton skeleton;
  SkinMesh mesh;
};

/// Parameters of a procedurally built fish: an elliptic-section tube
/// skinned over a spine chain, optionally with a pair of side-fin
/// branches off the front spine link.
struct FishDesign {
  std::string name = "fish";
  Real length = 0.4;            // m, along +x, nose at +length/2
  Real rho_body = 1080.0;       // kg/m^3
  int n_spine_joints = 5;
  int n_segments = 22;
  int n_ring = 14;
  Real head_fraction = 0.35;    // portion of body owned rigidly by the base
  std::function<Real(Real)> width;   // t in [0,1] nose->tail
  std::function<Real(Real)> height;
  Real stiffness = 1.0;         // N*m/rad
  Real damping = 0.02;          // N*m*s/rad
  Real torque_limit = 0.3;      // N*m
  Real joint_limit = 0.7;       // rad
  Real ballast_drop = 0.010;    // m the mass COM sits below the volume
                                // centroid; buoyancy then rights pitch/roll
  bool side_fins = false;
  Real fin_span_fraction = 0.5;  // fin ownership beyond this |y| fraction of max width
  Real bladder_capacity_factor = 2.5;  // times the 1000 kg/m^3 trim volume
};

namespace detail {

inline std::vector<Real> vertex_lumped_areas(const SkinMesh& mesh) {
  std::vector<Real> a(mesh.vertices.size(), 0.0);
  for (const auto& t : mesh.triangles) {
    const Real area = 0.5 * (mesh.vertices[t[1]] - mesh.vertices[t[0]])
                                .cross(mesh.vertices[t[2]] - mesh.vertices[t[0]])
                                .norm();
    for (int k = 0; k < 3; ++k) a[t[k]] += area / 3.0;
  }
  return a;
}

}  // namespace detail

/// Distributes mass, displaced volume, COM and inertia over the links
/// by skinning-weight area lumping of the mesh, at the rest pose.
/// `ballast_drop` lowers each link's mass COM below its volume centroid.
inline void assign_mass_properties(RobotModel& model, Real rho_body, Real ballast_drop = 0.0) {
  auto& skel = model.skeleton;
  const auto& mesh = model.mesh;
  const auto areas = detail::vertex_lumped_areas(mesh);
  const Real v_total = mesh.volume();
  if (!(v_total > 0.0)) throw InputError("mesh volume must be positive (outward normals)");
  const Real a_total = std::accumulate(areas.begin(), areas.end(), 0.0);
  const auto rest = RestPose::of(skel);

  for (int b = 0; b < skel.n_links(); ++b) {
    Real wa = 0.0;
    Vec3 first = Vec3::Zero();
    for (size_t v = 0; v < mesh.vertices.size(); ++v) {
      const Real w = mesh.weights(v, b) * areas[v];
      wa += w;
      first += w * mesh.vertices[v];
    }
    auto& l = skel.links[b];
    if (wa <= 0.0) {
      // a link that owns no skin still needs valid inertia
      l.mass = 1e-4;
      l.inertia_com = 1e-8 * Mat3::Identity();
      l.displaced_volume = 0.0;
      continue;
    }
    const Vec3 com_world = first / wa;
    const Vec3 com_link = rest.R[b].transpose() * (com_world - rest.p[b]);
    l.displaced_volume = v_total * wa / a_total;
    l.mass = rho_body * l.displaced_volume;
    l.volume_centroid = com_link;
    l.com = com_link - rest.R[b].transpose() * Vec3(0, 0, ballast_drop);
    Mat3 inertia = Mat3::Zero();
    for (size_t v = 0; v < mesh.vertices.size(); ++v) {
      const Real w = mesh.weights(v, b) * areas[v];
      if (w <= 0.0) continue;
      const Vec3 r = mesh.vertices[v] - com_world;
      inertia += w * (r.squaredNorm() * Mat3::Identity() - r * r.transpose());
    }
    inertia *= l.mass / wa;
    l.inertia_com = rest.R[b].transpose() * inertia * rest.R[b] + 1e-9 * Mat3::Identity();
  }
}

inline RobotModel build_fish_model(const FishDesign& d) {
  RobotModel model;
  auto& skel = model.skeleton;
  skel.name = d.name;

  // spine pivots, evenly spaced behind the head section
  const Real x_nose = 0.5 * d.length;
  std::vector<Real> pivots(d.n_spine_joints);
  const Real seg = (1.0 - d.head_fraction) * d.length / d.n_spine_joints;
  for (int k = 0; k < d.n_spine_joints; ++k)
    pivots[k] = x_nose - d.head_fraction * d.length - k * seg;

  Link base;
  base.name = "body";
  base.parent = -1;
  base.joint = JointType::Free;
  base.mass = 1.0;  // overwritten by assign_mass_properties
  skel.links.push_back(base);
  for (int k = 0; k < d.n_spine_joints; ++k) {
    Link l;
    l.name = "spine" + std::to_string(k);
    l.parent = k;
    l.joint = JointType::Revolute;
    l.joint_origin = k == 0 ? Vec3(pivots[0], 0, 0) : Vec3(-seg, 0, 0);
    l.axis = Vec3::UnitZ();
    l.mass = 1.0;
    l.stiffness = d.stiffness;
    l.damping = d.damping;
    l.torque_limit = d.torque_limit;
    l.limit_lo = -d.joint_limit;
    l.limit_hi = d.joint_limit;
    skel.links.push_back(l);
  }
  int fin_left = -1, fin_right = -1;
  if (d.side_fins) {
    for (int side = 0; side < 2; ++side) {
      Link l;
      l.name = side ? "fin_right" : "fin_left";
      l.parent = 0;
      l.joint = JointType::Revolute;
      l.joint_origin = Vec3(0.1 * d.length, side ? -0.2 * d.width(0.35) : 0.2 * d.width(0.35), 0);
      l.axis = Vec3::UnitX();
      l.mass = 1.0;
      l.stiffness = d.stiffness;
      l.damping = d.damping;
      l.torque_limit = d.torque_limit;
      l.limit_lo = -d.joint_limit;
      l.limit_hi = d.joint_limit;
      (side ? fin_right : fin_left) = skel.n_links();
      skel.links.push_back(l);
    }
  }

  const int n_links = skel.n_links();
  model.mesh = meshes::fish_tube(d.length, d.n_segments, d.n_ring, d.width, d.height, n_links);
  auto& mesh = model.mesh;

  // spine weights: hat functions over bone span centers along x
  std::vector<Real> centers(1 + d.n_spine_joints);
  centers[0] = 0.5 * (x_nose + pivots[0]);  // head span center
  for (int k = 0; k < d.n_spine_joints; ++k) {
    const Real lo = k + 1 < d.n_spine_joints ? pivots[k + 1] : (x_nose - d.length);
    centers[k + 1] = 0.5 * (pivots[k] + lo);
  }
  Real w_max = 0.0;
  for (int s = 0; s <= d.n_segments; ++s) w_max = std::max(w_max, d.width(Real(s) / d.n_segments));

  mesh.weights.setZero();
  for (size_t v = 0; v < mesh.vertices.size(); ++v) {
    const Real x = mesh.vertices[v].x();
    int b = 0;
    while (b + 1 < static_cast<int>(centers.size()) && x < centers[b + 1]) ++b;
    Real w_next = 0.0;
    if (b + 1 < static_cast<int>(centers.size()) && x <= centers[b] && x > centers[b + 1]) {
      w_next = (centers[b] - x) / (centers[b] - centers[b + 1]);
    }
    // smoothstep softens the hat-function kinks
    w_next = w_next * w_next * (3.0 - 2.0 * w_next);
    mesh.weights(v, b) = 1.0 - w_next;
    if (w_next > 0.0) mesh.weights(v, b + 1) = w_next;

    if (d.side_fins) {
      const Real y = mesh.vertices[v].y();
      const Real y0 = d.fin_span_fraction * 0.5 * w_max;
      if (std::abs(y) > y0 && x > pivots[0]) {
        Real beta = std::min((std::abs(y) - y0) / (0.5 * w_max - y0), 1.0);
        beta = 0.9 * beta * beta * (3.0 - 2.0 * beta);
        mesh.weights.row(v) *= (1.0 - beta);
        mesh.weights(v, y > 0 ? fin_left : fin_right) += beta;
      }
    }
  }

  assign_mass_properties(model, d.rho_body, d.ballast_drop);

  // bladder sized against the fresh-water trim volume and attached at
  // the body volume centroid (torque-free neutral trim)
  const Real trim = std::max(skel.neutral_trim_volume(1000.0), 1e-9);
  skel.bladder.volume_min = 0.0;
  skel.bladder.volume_max = d.bladder_capacity_factor * trim;
  skel.bladder.rate_bound = 0.25 * trim;
  skel.bladder.volume = std::clamp(trim, skel.bladder.volume_min, skel.bladder.volume_max);
  {
    const auto rest = RestPose::of(skel);
    Vec3 c_world = Vec3::Zero();
    Real vol = 0.0;
    for (int b = 0; b < skel.n_links(); ++b) {
      const auto& l = skel.links[b];
      c_world += l.displaced_volume * (rest.p[b] + rest.R[b] * l.volume_centroid);
      vol += l.displaced_volume;
    }
    skel.bladder.centroid = c_world / vol;  // base frame == world at rest
  }

  skel.validate();
  mesh.validate(n_links);
  return model;
}

/// The three bundled designs.
inline FishDesign koi_design() {
  FishDesign d;
  d.name = "koi";
  d.length = 0.4;
  d.n_spine_joints = 5;
  d.width = [](Real t) { return 0.085 * std::sin(std::pow(1.0 - t, 0.8) * M_PI * 0.92 + 0.05); };
  d.height = [](Real t) { return 0.12 * std::sin(std::pow(1.0 - t, 0.9) * M_PI * 0.88 + 0.08); };
  return d;
}

inline FishDesign eel_design() {
  FishDesign d;
  d.name = "eel";
  d.length = 0.6;
  d.n_spine_joints = 10;
  d.n_segments = 30;
  d.n_ring = 12;
  d.head_fraction = 0.2;
  d.ballast_drop = 0.006;
  d.stiffness = 0.5;
  d.damping = 0.01;
  d.torque_limit = 0.2;
  d.width = [](Real t) { return 0.05 * std::sin(std::pow(1.0 - t, 0.7) * M_PI * 0.85 + 0.12); };
  d.height = [](Real t) { return 0.06 * std::sin(std::pow(1.0 - t, 0.7) * M_PI * 0.85 + 0.12); };
  return d;
}

inline FishDesign flatfish_design() {
  FishDesign d;
  d.name = "flatfish";
  d.length = 0.35;
  d.n_spine_joints = 3;
  d.n_segments = 18;
  d.n_ring = 16;
  d.side_fins = true;
  d.ballast_drop = 0.004;
  d.stiffness = 0.8;
  d.torque_limit = 0.25;
  d.width = [](Real t) { return 0.24 * std::sin(std::pow(1.0 - t, 1.1) * M_PI * 0.9 + 0.06); };
  d.height = [](Real t) { return 0.05 * std::sin(std::pow(1.0 - t, 1.0) * M_PI * 0.85 + 0.1); };
  return d;
}

}  // namespace fishsim::robot
