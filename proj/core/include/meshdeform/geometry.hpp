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

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace meshdeform {

using Vec3 = Eigen::Vector3d;

/// Triangle mesh with fixed connectivity. All geometry is double precision;
/// face indices are zero-based.
struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int face_count() const { return static_cast<int>(faces.size()); }

  /// Throws std::invalid_argument if any invariant is violated: indices in
  /// range, no repeated vertex within a face, at least 3 vertices and 1 face,
  /// finite coordinates.
  void validate() const;
};

/// Unordered set of 3D points.
struct PointCloud {
  std::vector<Vec3> points;

  int size() const { return static_cast<int>(points.size()); }
  bool empty() const { return points.empty(); }

  void validate() const;
};

struct BoundingBox {
  Vec3 min;
  Vec3 max;

  Vec3 extent() const { return max - min; }
  Vec3 center() const { return 0.5 * (min + max); }
  double max_extent() const { return extent().maxCoeff(); }
};

/// Axis-aligned reflection plane through the origin. Named by the plane the
/// points are mirrored across; the remaining coordinate is negated.
enum class SymmetryPlane { XZ, XY, YZ };

/// Index of the coordinate negated by a reflection across `plane`.
int mirror_axis(SymmetryPlane plane);

/// Similarity transform produced by unit-cube normalization:
/// apply(p) = scale * (p - center). Uniform scale, so shape is preserved.
struct NormalizeTransform {
  double scale = 1.0;
  Vec3 center = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return scale * (p - center); }
  Vec3 invert(const Vec3& q) const { return q / scale + center; }
};

BoundingBox bounding_box(const std::vector<Vec3>& points);
BoundingBox bounding_box(const PointCloud& cloud);
BoundingBox bounding_box(const TriMesh& mesh);

/// Centers the shape at the origin and scales it uniformly so the largest
/// bounding-box extent is exactly 1. Throws on zero-extent input.
NormalizeTransform unit_cube_transform(const BoundingBox& box);
TriMesh normalize_unit_cube(const TriMesh& mesh, NormalizeTransform* out_transform = nullptr);
PointCloud normalize_unit_cube(const PointCloud& cloud, NormalizeTransform* out_transform = nullptr);

/// Triangle areas, ||(v2-v1) x (v3-v1)|| / 2. Degenerate faces yield 0.
std::vector<double> face_areas(const TriMesh& mesh);

double total_area(const TriMesh& mesh);

/// Reflects every point across the given plane; point order is preserved.
PointCloud mirror_points(const PointCloud& cloud, SymmetryPlane plane = SymmetryPlane::XZ);
Vec3 mirror_point(const Vec3& p, SymmetryPlane plane);

}  // namespace meshdeform
