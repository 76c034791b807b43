// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The FishSim Authors

#pragma once

#include <unordered_map>
#include <vector>

#include "fishsim/core/rng.hpp"
#include "fishsim/robot/skinning.hpp"

namespace fishsim::robot {

/// Skinned surface point cloud used as IB markers. Rest-frame data is
/// produced once by sample_surface; world-frame data is refreshed each
/// step by update_samples.
struct SurfaceSamples {
  // rest frame
  std::vector<Vec3> rest_points;
  std::vector<Vec3> rest_normals;
  std::vector<Real> areas;  // m^2, uniform: total area / count
  MatX weights;             // n_samples x n_links

  // world frame, current pose
  std::vector<Vec3> points;
  std::vector<Vec3> normals;
  std::vector<Vec3> velocities;

  size_t size() const { return rest_points.size(); }
  Real total_area() const {
    Real a = 0.0;
    for (Real s : areas) a += s;
    return a;
  }
};

namespace detail {

inline Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b,
                                      const Vec3& c, Vec3* bary = nullptr) {
  // Ericson, Real-Time Collision Detection, 5.1.5
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const Real d1 = ab.dot(ap), d2 = ac.dot(ap);
  auto set_bary = [&](Real u, Real v, Real w) {
    if (bary) *bary = Vec3(u, v, w);
  };
  if (d1 <= 0 && d2 <= 0) {
    set_bary(1, 0, 0);
    return a;
  }
  const Vec3 bp = p - b;
  const Real d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) {
    set_bary(0, 1, 0);
    return b;
  }
  const Real vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) {
    const Real v = d1 / (d1 - d3);
    set_bary(1 - v, v, 0);
    return a + v * ab;
  }
  const Vec3 cp = p - c;
  const Real d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) {
    set_bary(0, 0, 1);
    return c;
  }
  const Real vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) {
    const Real w = d2 / (d2 - d6);
    set_bary(1 - w, 0, w);
    return a + w * ac;
  }
  const Real va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) {
    const Real w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    set_bary(0, 1 - w, w);
    return b + w * (c - b);
  }
  const Real denom = 1.0 / (va + vb + vc);
  const Real v = vb * denom, w = vc * denom;
  set_bary(1 - v - w, v, w);
  return a + ab * v + ac * w;
}

/// Uniform hash grid over points for radius queries.
class PointGrid {
public:
  PointGrid(Real cell) : cell_(cell) {}

  void insert(int id, const Vec3& p) { cells_[key(p)].push_back(id); }

  void rebuild(const std::vector<Vec3>& pts) {
    cells_.clear();
    for (size_t i = 0; i < pts.size(); ++i) insert(static_cast<int>(i), pts[i]);
  }

  template <class F>
  void for_neighbors(const Vec3& p, F&& f) const {
    const auto c = coords(p);
    for (int dz = -1; dz <= 1; ++dz)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const auto it = cells_.find(pack(c[0] + dx, c[1] + dy, c[2] + dz));
          if (it == cells_.end()) continue;
          for (int id : it->second) f(id);
        }
  }

private:
  std::array<long long, 3> coords(const Vec3& p) const {
    return {static_cast<long long>(std::floor(p.x() / cell_)),
            static_cast<long long>(std::floor(p.y() / cell_)),
            static_cast<long long>(std::floor(p.z() / cell_))};
  }
  static long long pack(long long x, long long y, long long z) {
    return (x * 73856093) ^ (y * 19349663) ^ (z * 83492791);
  }
  long long key(const Vec3& p) const {
    const auto c = coords(p);
    return pack(c[0], c[1], c[2]);
  }

  Real cell_;
  std::unordered_map<long long, std::vector<int>> cells_;
};

struct SurfacePoint {
  Vec3 position;
  Vec3 normal;
  int triangle;
  Vec3 bary;
};

inline SurfacePoint project_to_mesh(const SkinMesh& mesh, const Vec3& p) {
  SurfacePoint best;
  Real best_d2 = std::numeric_limits<Real>::max();
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    Vec3 bary;
    const Vec3 q = closest_point_on_triangle(p, mesh.vertices[tri[0]], mesh.vertices[tri[1]],
                                             mesh.vertices[tri[2]], &bary);
    const Real d2 = (q - p).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best.position = q;
      best.triangle = static_cast<int>(t);
      best.bary = bary;
      best.normal = (mesh.vertices[tri[1]] - mesh.vertices[tri[0]])
                        .cross(mesh.vertices[tri[2]] - mesh.vertices[tri[0]])
                        .normalized();
    }
  }
  return best;
}

}  // namespace detail

/// Blue-noise surface sampling: area-weighted candidate generation,
/// greedy Poisson-disk thinning, then tangent-plane repulsion with
/// reprojection onto the mesh. Samples carry interpolated skin weights
/// and the per-sample patch area total_area / count.
inline SurfaceSamples sample_surface(const SkinMesh& mesh, Real spacing,
                                     uint64_t seed = 12345) {
  if (!(spacing > 0.0)) throw InputError("sample spacing must be positive");
  const Real area = mesh.total_area();
  const size_t target = static_cast<size_t>(std::round(area / (spacing * spacing)));
  if (target < 16) {
    throw InputError("sample spacing " + std::to_string(spacing) +
                     " too coarse for surface area " + std::to_string(area));
  }

  // area-weighted candidate pool
  Rng rng(seed);
  std::vector<Real> cum;
  cum.reserve(mesh.triangles.size());
  Real acc = 0.0;
  for (const auto& t : mesh.triangles) {
    acc += 0.5 * (mesh.vertices[t[1]] - mesh.vertices[t[0]])
                     .cross(mesh.vertices[t[2]] - mesh.vertices[t[0]])
                     .norm();
    cum.push_back(acc);
  }
  const size_t n_candidates = 40 * target;
  std::vector<detail::SurfacePoint> candidates(n_candidates);
  for (auto& c : candidates) {
    const Real pick = rng.uniform() * acc;
    const size_t t =
        std::lower_bound(cum.begin(), cum.end(), pick) - cum.begin();
    Real u = rng.uniform(), v = rng.uniform();
    if (u + v > 1.0) {
      u = 1.0 - u;
      v = 1.0 - v;
    }
    const auto& tri = mesh.triangles[t];
    c.position = mesh.vertices[tri[0]] +
                 u * (mesh.vertices[tri[1]] - mesh.vertices[tri[0]]) +
                 v * (mesh.vertices[tri[2]] - mesh.vertices[tri[0]]);
    c.triangle = static_cast<int>(t);
    c.bary = Vec3(1.0 - u - v, u, v);
    c.normal = (mesh.vertices[tri[1]] - mesh.vertices[tri[0]])
                   .cross(mesh.vertices[tri[2]] - mesh.vertices[tri[0]])
                   .normalized();
  }

  // greedy Poisson-disk thinning; the radius is calibrated so the
  // selected count lands on the area/spacing^2 contract
  std::vector<detail::SurfacePoint> picked;
  std::vector<Vec3> picked_pos;
  Real r_min = 0.7 * spacing;
  Real r_lo = 0.0, r_hi = 0.0;
  for (int attempt = 0; attempt < 24; ++attempt) {
    picked.clear();
    picked_pos.clear();
    detail::PointGrid grid(r_min);
    for (const auto& c : candidates) {
      bool ok = true;
      grid.for_neighbors(c.position, [&](int id) {
        if (ok && (picked_pos[id] - c.position).squaredNorm() < r_min * r_min) ok = false;
      });
      if (!ok) continue;
      grid.insert(static_cast<int>(picked.size()), c.position);
      picked.push_back(c);
      picked_pos.push_back(c.position);
    }
    const Real ratio = static_cast<Real>(picked.size()) / static_cast<Real>(target);
    if (ratio > 1.02) {
      r_lo = r_min;
      r_min = r_hi > 0.0 ? 0.5 * (r_min + r_hi) : r_min * 1.3;
    } else if (ratio < 0.98) {
      r_hi = r_min;
      r_min = r_lo > 0.0 ? 0.5 * (r_min + r_lo) : r_min * 0.75;
    } else {
      break;
    }
  }

  // tangent-plane repulsion, reprojected onto the surface; projection
  // can merge points at mesh apexes, so thin near-duplicates each round
  const int relax_iters = 12;
  for (int it = 0; it < relax_iters; ++it) {
    detail::PointGrid ngrid(2.0 * spacing);
    ngrid.rebuild(picked_pos);
    std::vector<Vec3> moved(picked.size());
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(picked.size()); ++i) {
      Vec3 push = Vec3::Zero();
      ngrid.for_neighbors(picked_pos[i], [&](int j) {
        if (j == static_cast<int>(i)) return;
        const Vec3 d = picked_pos[i] - picked_pos[j];
        const Real dist = d.norm();
        if (dist < 2.0 * spacing && dist > 1e-12) {
          push += d / dist * (2.0 * spacing - dist);
        }
      });
      const Vec3& n = picked[i].normal;
      push -= n.dot(push) * n;  // stay in the tangent plane
      moved[i] = picked_pos[i] + 0.15 * push;
    }
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(picked.size()); ++i) {
      picked[i] = detail::project_to_mesh(mesh, moved[i]);
      picked_pos[i] = picked[i].position;
    }

    detail::PointGrid dgrid(r_min);
    std::vector<detail::SurfacePoint> kept;
    std::vector<Vec3> kept_pos;
    for (size_t i = 0; i < picked.size(); ++i) {
      bool ok = true;
      dgrid.for_neighbors(picked_pos[i], [&](int j) {
        if (ok && (kept_pos[j] - picked_pos[i]).squaredNorm() < 0.36 * r_min * r_min) ok = false;
      });
      if (!ok) continue;
      dgrid.insert(static_cast<int>(kept.size()), picked_pos[i]);
      kept.push_back(picked[i]);
      kept_pos.push_back(picked_pos[i]);
    }
    picked.swap(kept);
    picked_pos.swap(kept_pos);
  }

  SurfaceSamples out;
  const size_t n = picked.size();
  out.rest_points.resize(n);
  out.rest_normals.resize(n);
  out.areas.assign(n, area / static_cast<Real>(n));
  out.weights.resize(n, mesh.weights.cols());
  for (size_t i = 0; i < n; ++i) {
    out.rest_points[i] = picked[i].position;
    out.rest_normals[i] = picked[i].normal;
    const auto& tri = mesh.triangles[picked[i].triangle];
    VecX w = picked[i].bary[0] * mesh.weights.row(tri[0]) +
             picked[i].bary[1] * mesh.weights.row(tri[1]) +
             picked[i].bary[2] * mesh.weights.row(tri[2]);
    out.weights.row(i) = w / w.sum();
  }
  out.points = out.rest_points;
  out.normals = out.rest_normals;
  out.velocities.assign(n, Vec3::Zero());
  return out;
}

/// Refreshes world positions, normals and velocities of the samples for
/// the current pose (read-only over the pose; data-parallel).
inline void update_samples(const Skeleton& skel, const KinematicsCache& kc,
                           const RestPose& rest, SurfaceSamples& samples) {
  (void)skel;
  const auto bt = BoneTransforms::of(kc, rest);
  const long long n = static_cast<long long>(samples.size());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i) {
    const auto w = samples.weights.row(i);
    samples.points[i] = skin_point(bt, w, samples.rest_points[i]);
    samples.velocities[i] = skin_point_velocity(kc, bt, w, samples.rest_points[i]);
    Vec3 nrm = Vec3::Zero();
    for (int b = 0; b < w.size(); ++b)
      if (w[b] != 0.0) nrm += w[b] * (bt.R[b] * samples.rest_normals[i]);
    samples.normals[i] = nrm.normalized();
  }
}

/// Nearest-neighbor distance statistics of the rest samples; the
/// max/min ratio is the sampling-quality criterion.
inline std::pair<Real, Real> nearest_neighbor_range(const SurfaceSamples& s) {
  Real lo = std::numeric_limits<Real>::max();
  Real hi = 0.0;
  for (size_t i = 0; i < s.size(); ++i) {
    Real best = std::numeric_limits<Real>::max();
    for (size_t j = 0; j < s.size(); ++j) {
      if (i == j) continue;
      best = std::min(best, (s.rest_points[i] - s.rest_points[j]).norm());
    }
    lo = std::min(lo, best);
    hi = std::max(hi, best);
  }
  return {lo, hi};
}

}  // namespace fishsim::robot
