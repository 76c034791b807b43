// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The FishSim Authors

#pragma once

#include <functional>
#include <map>

#include "fishsim/robot/skinning.hpp"

namespace fishsim::robot::meshes {

/// Icosphere with `subdivisions` refinement levels, single-bone weights.
inline SkinMesh icosphere(Real radius, int subdivisions, int n_links = 1) {
  const Real t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> verts = {
      {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
      {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  std::vector<std::array<int, 3>> faces = {
      {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11},
      {1, 5, 9}, {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8}, {3, 8, 9},
      {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};
  for (auto& v : verts) v.normalize();

  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      verts.push_back(((verts[a] + verts[b]) * 0.5).normalized());
      const int id = static_cast<int>(verts.size()) - 1;
      midpoint[key] = id;
      return id;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      const int a = mid(f[0], f[1]), b = mid(f[1], f[2]), c = mid(f[2], f[0]);
      next.push_back({f[0], a, c});
      next.push_back({f[1], b, a});
      next.push_back({f[2], c, b});
      next.push_back({a, b, c});
    }
    faces.swap(next);
  }

  SkinMesh m;
  m.vertices.reserve(verts.size());
  for (const auto& v : verts) m.vertices.push_back(v * radius);
  m.triangles = faces;
  m.weights = MatX::Zero(verts.size(), n_links);
  m.weights.col(0).setOnes();
  return m;
}

/// Watertight axis-aligned box centered at the origin with subdivided
/// faces; used as the thin-plate stand-in for coupling tests.
inline SkinMesh box(const Vec3& size, int nx, int ny, int nz, int n_links = 1) {
  std::map<std::array<long long, 3>, int> index;
  SkinMesh m;
  const int n[3] = {nx, ny, nz};
  auto vertex = [&](int ix, int iy, int iz) {
    const std::array<long long, 3> key = {ix, iy, iz};
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    const Vec3 p(size.x() * (Real(ix) / nx - 0.5), size.y() * (Real(iy) / ny - 0.5),
                 size.z() * (Real(iz) / nz - 0.5));
    m.vertices.push_back(p);
    const int id = static_cast<int>(m.vertices.size()) - 1;
    index[key] = id;
    return id;
  };
  // each face: axis = fixed dimension, side = 0 or max
  for (int axis = 0; axis < 3; ++axis) {
    const int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
    for (int side = 0; side < 2; ++side) {
      for (int i = 0; i < n[a1]; ++i) {
        for (int j = 0; j < n[a2]; ++j) {
          int idx[3];
          idx[axis] = side * n[axis];
          auto at = [&](int di, int dj) {
            idx[a1] = i + di;
            idx[a2] = j + dj;
            return vertex(idx[0], idx[1], idx[2]);
          };
          const int v00 = at(0, 0), v10 = at(1, 0), v11 = at(1, 1), v01 = at(0, 1);
          if (side == 1) {
            m.triangles.push_back({v00, v10, v11});
            m.triangles.push_back({v00, v11, v01});
          } else {
            m.triangles.push_back({v00, v11, v10});
            m.triangles.push_back({v00, v01, v11});
          }
        }
      }
    }
  }
  m.weights = MatX::Zero(m.vertices.size(), n_links);
  m.weights.col(0).setOnes();
  return m;
}

/// Fish body of length `length` along +x, nose at +length/2. Elliptic
/// cross sections with width/height profiles given on t in [0,1]
/// (t = 0 nose, t = 1 tail tip).
inline SkinMesh fish_tube(Real length, int n_segments, int n_ring,
                          const std::function<Real(Real)>& width,
                          const std::function<Real(Real)>& height, int n_links) {
  SkinMesh m;
  const Real x_nose = 0.5 * length;
  // interior rings only; the end caps are single vertices
  std::vector<std::vector<int>> rings;
  for (int s = 1; s < n_segments; ++s) {
    const Real t = Real(s) / n_segments;
    const Real x = x_nose - t * length;
    const Real w = std::max(width(t), 1e-4), h = std::max(height(t), 1e-4);
    std::vector<int> ring;
    for (int k = 0; k < n_ring; ++k) {
      const Real a = 2.0 * M_PI * k / n_ring;
      m.vertices.push_back(Vec3(x, 0.5 * w * std::cos(a), 0.5 * h * std::sin(a)));
      ring.push_back(static_cast<int>(m.vertices.size()) - 1);
    }
    rings.push_back(ring);
  }
  m.vertices.push_back(Vec3(x_nose, 0, 0));
  const int nose = static_cast<int>(m.vertices.size()) - 1;
  m.vertices.push_back(Vec3(x_nose - length, 0, 0));
  const int tail = static_cast<int>(m.vertices.size()) - 1;

  // winding chosen so all normals point outward (positive volume)
  for (int k = 0; k < n_ring; ++k) {
    const int k1 = (k + 1) % n_ring;
    m.triangles.push_back({nose, rings.front()[k], rings.front()[k1]});
  }
  for (size_t s = 0; s + 1 < rings.size(); ++s) {
    for (int k = 0; k < n_ring; ++k) {
      const int k1 = (k + 1) % n_ring;
      const int a = rings[s][k], b = rings[s][k1], c = rings[s + 1][k], d = rings[s + 1][k1];
      m.triangles.push_back({a, d, b});
      m.triangles.push_back({a, c, d});
    }
  }
  for (int k = 0; k < n_ring; ++k) {
    const int k1 = (k + 1) % n_ring;
    m.triangles.push_back({tail, rings.back()[k1], rings.back()[k]});
  }

  m.weights = MatX::Zero(m.vertices.size(), n_links);
  m.weights.col(0).setOnes();  // caller assigns real weights
  return m;
}

}  // namespace fishsim::robot::meshes
