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

#ifndef MESHDEFORM_METRICS_HPP_
#define MESHDEFORM_METRICS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "meshdeform/geometry.hpp"

namespace meshdeform {

/// Placement of a cubic voxel grid in world space. Cell (i, j, k) covers
/// [origin + h * (i, j, k), origin + h * (i + 1, j + 1, k + 1)).
struct GridFrame {
  Vec3 origin = Vec3::Zero();
  double cell_size = 1.0;

  bool operator==(const GridFrame& other) const {
    return cell_size == other.cell_size && origin == other.origin;
  }
};

/// Fits a grid of `resolution` cells per axis around `box` so the box sits
/// strictly inside the inner (resolution - 2)^3 block, leaving one empty
/// padding cell on every side for the exterior flood fill to start from.
GridFrame fit_frame(const BoundingBox& box, int resolution);

/// Occupancy grid over resolution^3 cubic cells. `solid` marks surface cells
/// plus every interior cell; `leak` records that the exterior flood fill
/// classified the mesh as unclosed, in which case `solid` holds surface
/// cells only.
struct VoxelGrid {
  int resolution = 0;
  GridFrame frame;
  std::vector<std::uint8_t> solid;
  bool leak = false;

  int cell_count() const { return resolution * resolution * resolution; }
  int index(int i, int j, int k) const { return (i * resolution + j) * resolution + k; }
  bool occupied(int i, int j, int k) const { return solid[static_cast<std::size_t>(index(i, j, k))] != 0; }
  int occupied_count() const;
  /// World-space volume of one cell.
  double cell_volume() const;
  /// occupied_count() * cell_volume().
  double solid_volume() const;

  void validate() const;
};

/// Marks cells overlapping the surface (separating-axis triangle-box tests),
/// then flood-fills the exterior from the padded boundary with 6-connected
/// steps; solid = not exterior. If the fill reaches more than 99% of the
/// non-surface cells the mesh is treated as unclosed: the grid degrades to
/// surface-only occupancy and `leak` is set.
VoxelGrid voxelize_solid(const TriMesh& mesh, int resolution, const GridFrame& frame);

/// Convenience overload on a frame fitted to the mesh's own bounding box.
VoxelGrid voxelize_solid(const TriMesh& mesh, int resolution = 32);

/// Intersection over union of two grids sharing resolution and frame.
/// Two empty grids count as identical: IoU 1.
double metric_iou(const VoxelGrid& a, const VoxelGrid& b);

/// Chamfer distance between two clouds. Callers compare shapes on equal
/// footing by normalizing each one to the unit cube first (the eval tool
/// does); the metric itself evaluates the clouds as given.
double metric_cd(const PointCloud& a, const PointCloud& b);

/// Earth mover's distance between two clouds of equal cardinality. Same
/// normalization contract as metric_cd.
double metric_emd(const PointCloud& a, const PointCloud& b);

/// Evaluation record. Fields are absent when not computable for the given
/// inputs: iou needs two meshes, emd needs equal-size clouds.
struct MetricReport {
  std::optional<double> cd;
  std::optional<double> emd;
  std::optional<double> iou;
  bool leak = false;

  void validate() const;
  /// Single-line record, absent fields serialized as null:
  ///   {"cd":...,"emd":...,"iou":...,"leak":...}
  std::string to_json() const;
  /// Header "cd,emd,iou,leak"; absent fields are empty, leak is 0/1.
  static std::string csv_header();
  std::string to_csv() const;
};

}  // namespace meshdeform

#endif  // MESHDEFORM_METRICS_HPP_
