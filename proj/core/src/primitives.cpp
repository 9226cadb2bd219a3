// Copyright 2026 The MeshDeform Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "meshdeform/primitives.hpp"

#include <cmath>
#include <stdexcept>

namespace meshdeform {

namespace {
constexpr double kTwoPi = 6.283185307179586476925;
}

TriMesh make_box(double size_x, double size_y, double size_z, int subdiv) {
  if (subdiv < 1) throw std::invalid_argument("box subdiv must be >= 1");
  TriMesh mesh;
  const Vec3 half(0.5 * size_x, 0.5 * size_y, 0.5 * size_z);
  // One vertex grid per face; shared edges are duplicated, which is fine for
  // sampling and loss purposes (the surface is still watertight as a set).
  const int n = subdiv + 1;
  auto add_face_grid = [&](const Vec3& origin, const Vec3& du, const Vec3& dv) {
    const int base = mesh.vertex_count();
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        mesh.vertices.push_back(origin + du * (static_cast<double>(i) / subdiv) +
                                dv * (static_cast<double>(j) / subdiv));
      }
    }
    for (int j = 0; j < subdiv; ++j) {
      for (int i = 0; i < subdiv; ++i) {
        const int a = base + j * n + i;
        const int b = a + 1;
        const int c = a + n;
        const int d = c + 1;
        mesh.faces.push_back({a, b, d});
        mesh.faces.push_back({a, d, c});
      }
    }
  };
  const Vec3 ex(size_x, 0, 0), ey(0, size_y, 0), ez(0, 0, size_z);
  add_face_grid(Vec3(-half.x(), -half.y(), -half.z()), ex, ey);  // z = -h
  add_face_grid(Vec3(-half.x(), -half.y(), +half.z()), ey, ex);  // z = +h
  add_face_grid(Vec3(-half.x(), -half.y(), -half.z()), ez, ex);  // y = -h
  add_face_grid(Vec3(-half.x(), +half.y(), -half.z()), ex, ez);  // y = +h
  add_face_grid(Vec3(-half.x(), -half.y(), -half.z()), ey, ez);  // x = -h
  add_face_grid(Vec3(+half.x(), -half.y(), -half.z()), ez, ey);  // x = +h
  return mesh;
}

TriMesh make_uv_sphere(double radius, int rings, int segments) {
  return make_ellipsoid(radius, radius, radius, rings, segments);
}

TriMesh make_ellipsoid(double rx, double ry, double rz, int rings, int segments) {
  if (rings < 2 || segments < 3) throw std::invalid_argument("sphere needs rings>=2, segments>=3");
  TriMesh mesh;
  mesh.vertices.emplace_back(0, ry, 0);  // north pole
  for (int r = 1; r < rings; ++r) {
    const double phi = M_PI * r / rings;
    for (int s = 0; s < segments; ++s) {
      const double theta = kTwoPi * s / segments;
      mesh.vertices.emplace_back(rx * std::sin(phi) * std::cos(theta), ry * std::cos(phi),
                                 rz * std::sin(phi) * std::sin(theta));
    }
  }
  mesh.vertices.emplace_back(0, -ry, 0);  // south pole
  const int south = mesh.vertex_count() - 1;
  auto ring_vtx = [&](int r, int s) { return 1 + (r - 1) * segments + (s % segments); };
  for (int s = 0; s < segments; ++s) {
    mesh.faces.push_back({0, ring_vtx(1, s + 1), ring_vtx(1, s)});
  }
  for (int r = 1; r + 1 < rings; ++r) {
    for (int s = 0; s < segments; ++s) {
      const int a = ring_vtx(r, s), b = ring_vtx(r, s + 1);
      const int c = ring_vtx(r + 1, s), d = ring_vtx(r + 1, s + 1);
      mesh.faces.push_back({a, b, d});
      mesh.faces.push_back({a, d, c});
    }
  }
  for (int s = 0; s < segments; ++s) {
    mesh.faces.push_back({south, ring_vtx(rings - 1, s), ring_vtx(rings - 1, s + 1)});
  }
  return mesh;
}

TriMesh make_cylinder(double radius, double height, int segments) {
  if (segments < 3) throw std::invalid_argument("cylinder needs segments>=3");
  TriMesh mesh;
  const double h = 0.5 * height;
  for (int s = 0; s < segments; ++s) {
    const double theta = kTwoPi * s / segments;
    const double x = radius * std::cos(theta), z = radius * std::sin(theta);
    mesh.vertices.emplace_back(x, -h, z);
    mesh.vertices.emplace_back(x, +h, z);
  }
  const int bottom_center = mesh.vertex_count();
  mesh.vertices.emplace_back(0, -h, 0);
  const int top_center = mesh.vertex_count();
  mesh.vertices.emplace_back(0, +h, 0);
  for (int s = 0; s < segments; ++s) {
    const int a = 2 * s, b = 2 * ((s + 1) % segments);
    mesh.faces.push_back({a, b, a + 1});
    mesh.faces.push_back({b, b + 1, a + 1});
    mesh.faces.push_back({bottom_center, b, a});
    mesh.faces.push_back({top_center, a + 1, b + 1});
  }
  return mesh;
}

TriMesh make_cone(double radius, double height, int segments) {
  if (segments < 3) throw std::invalid_argument("cone needs segments>=3");
  TriMesh mesh;
  const double h = 0.5 * height;
  for (int s = 0; s < segments; ++s) {
    const double theta = kTwoPi * s / segments;
    mesh.vertices.emplace_back(radius * std::cos(theta), -h, radius * std::sin(theta));
  }
  const int apex = mesh.vertex_count();
  mesh.vertices.emplace_back(0, +h, 0);
  const int base_center = mesh.vertex_count();
  mesh.vertices.emplace_back(0, -h, 0);
  for (int s = 0; s < segments; ++s) {
    const int a = s, b = (s + 1) % segments;
    mesh.faces.push_back({apex, b, a});
    mesh.faces.push_back({base_center, a, b});
  }
  return mesh;
}

TriMesh make_torus(double major_radius, double minor_radius, int major_segments,
                   int minor_segments) {
  if (major_segments < 3 || minor_segments < 3) {
    throw std::invalid_argument("torus needs at least 3 segments on each loop");
  }
  TriMesh mesh;
  for (int i = 0; i < major_segments; ++i) {
    const double u = kTwoPi * i / major_segments;
    for (int j = 0; j < minor_segments; ++j) {
      const double v = kTwoPi * j / minor_segments;
      const double r = major_radius + minor_radius * std::cos(v);
      mesh.vertices.emplace_back(r * std::cos(u), minor_radius * std::sin(v), r * std::sin(u));
    }
  }
  auto vtx = [&](int i, int j) {
    return (i % major_segments) * minor_segments + (j % minor_segments);
  };
  for (int i = 0; i < major_segments; ++i) {
    for (int j = 0; j < minor_segments; ++j) {
      const int a = vtx(i, j), b = vtx(i + 1, j), c = vtx(i, j + 1), d = vtx(i + 1, j + 1);
      mesh.faces.push_back({a, b, d});
      mesh.faces.push_back({a, d, c});
    }
  }
  return mesh;
}

}  // namespace meshdeform
