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

#include "meshdeform/geometry.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace meshdeform {

void TriMesh::validate() const {
  if (vertices.size() < 3) {
    throw std::invalid_argument("mesh must have at least 3 vertices, has " +
                                std::to_string(vertices.size()));
  }
  if (faces.empty()) {
    throw std::invalid_argument("mesh must have at least 1 face");
  }
  for (const Vec3& v : vertices) {
    if (!v.allFinite()) {
      throw std::invalid_argument("mesh has non-finite vertex coordinates");
    }
  }
  const int n = vertex_count();
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const auto& face = faces[f];
    for (int idx : face) {
      if (idx < 0 || idx >= n) {
        throw std::invalid_argument("face " + std::to_string(f) + " references vertex " +
                                    std::to_string(idx) + ", valid range is [0, " +
                                    std::to_string(n) + ")");
      }
    }
    if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2]) {
      throw std::invalid_argument("face " + std::to_string(f) +
                                  " references the same vertex twice");
    }
  }
}

void PointCloud::validate() const {
  if (points.empty()) {
    throw std::invalid_argument("point cloud is empty");
  }
  for (const Vec3& p : points) {
    if (!p.allFinite()) {
      throw std::invalid_argument("point cloud has non-finite coordinates");
    }
  }
}

int mirror_axis(SymmetryPlane plane) {
  switch (plane) {
    case SymmetryPlane::XZ:
      return 1;
    case SymmetryPlane::XY:
      return 2;
    case SymmetryPlane::YZ:
      return 0;
  }
  throw std::invalid_argument("unknown symmetry plane");
}

BoundingBox bounding_box(const std::vector<Vec3>& points) {
  if (points.empty()) {
    throw std::invalid_argument("bounding box of empty point set");
  }
  BoundingBox box{points.front(), points.front()};
  for (const Vec3& p : points) {
    box.min = box.min.cwiseMin(p);
    box.max = box.max.cwiseMax(p);
  }
  return box;
}

BoundingBox bounding_box(const PointCloud& cloud) { return bounding_box(cloud.points); }

BoundingBox bounding_box(const TriMesh& mesh) { return bounding_box(mesh.vertices); }

NormalizeTransform unit_cube_transform(const BoundingBox& box) {
  const double extent = box.max_extent();
  if (!(extent > 0.0)) {
    throw std::invalid_argument("cannot normalize a shape with zero extent");
  }
  return NormalizeTransform{1.0 / extent, box.center()};
}

TriMesh normalize_unit_cube(const TriMesh& mesh, NormalizeTransform* out_transform) {
  const NormalizeTransform t = unit_cube_transform(bounding_box(mesh));
  TriMesh out = mesh;
  for (Vec3& v : out.vertices) v = t.apply(v);
  if (out_transform) *out_transform = t;
  return out;
}

PointCloud normalize_unit_cube(const PointCloud& cloud, NormalizeTransform* out_transform) {
  const NormalizeTransform t = unit_cube_transform(bounding_box(cloud));
  PointCloud out = cloud;
  for (Vec3& p : out.points) p = t.apply(p);
  if (out_transform) *out_transform = t;
  return out;
}

std::vector<double> face_areas(const TriMesh& mesh) {
  std::vector<double> areas;
  areas.reserve(mesh.faces.size());
  for (const auto& f : mesh.faces) {
    const Vec3& a = mesh.vertices[f[0]];
    const Vec3& b = mesh.vertices[f[1]];
    const Vec3& c = mesh.vertices[f[2]];
    areas.push_back(0.5 * (b - a).cross(c - a).norm());
  }
  return areas;
}

double total_area(const TriMesh& mesh) {
  double sum = 0.0;
  for (double a : face_areas(mesh)) sum += a;
  return sum;
}

Vec3 mirror_point(const Vec3& p, SymmetryPlane plane) {
  Vec3 q = p;
  const int axis = mirror_axis(plane);
  q[axis] = -q[axis];
  return q;
}

PointCloud mirror_points(const PointCloud& cloud, SymmetryPlane plane) {
  PointCloud out = cloud;
  const int axis = mirror_axis(plane);
  for (Vec3& p : out.points) p[axis] = -p[axis];
  return out;
}

}  // namespace meshdeform
