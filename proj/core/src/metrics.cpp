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

#include "meshdeform/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "meshdeform/losses.hpp"

namespace meshdeform {

namespace {

bool axis_separates(double p0, double p1, double p2, double radius) {
  const double lo = std::min({p0, p1, p2});
  const double hi = std::max({p0, p1, p2});
  return lo > radius || hi < -radius;
}

// Plane n . x + d = 0 versus an origin-centered box: project the box onto n
// via its most anti-aligned and aligned corners.
bool plane_box_overlap(const Vec3& normal, double d, const Vec3& half) {
  Vec3 vmin;
  Vec3 vmax;
  for (int axis = 0; axis < 3; ++axis) {
    if (normal[axis] > 0.0) {
      vmin[axis] = -half[axis];
      vmax[axis] = half[axis];
    } else {
      vmin[axis] = half[axis];
      vmax[axis] = -half[axis];
    }
  }
  if (normal.dot(vmin) + d > 0.0) return false;
  return normal.dot(vmax) + d >= 0.0;
}

// Separating-axis triangle/box overlap: 9 edge-cross axes, the 3 box face
// normals, and the triangle plane. Touching counts as overlap. Degenerate
// triangles produce zero cross axes, which never separate, so segments and
// points are still marked.
bool tri_box_overlap(const Vec3& center, const Vec3& half, const Vec3& va, const Vec3& vb,
                     const Vec3& vc) {
  const Vec3 a = va - center;
  const Vec3 b = vb - center;
  const Vec3 c = vc - center;
  const Vec3 edges[3] = {b - a, c - b, a - c};

  for (int edge = 0; edge < 3; ++edge) {
    for (int axis = 0; axis < 3; ++axis) {
      const Vec3 sep = Vec3::Unit(axis).cross(edges[edge]);
      const double radius =
          half[0] * std::abs(sep[0]) + half[1] * std::abs(sep[1]) + half[2] * std::abs(sep[2]);
      if (axis_separates(sep.dot(a), sep.dot(b), sep.dot(c), radius)) return false;
    }
  }
  for (int axis = 0; axis < 3; ++axis) {
    if (axis_separates(a[axis], b[axis], c[axis], half[axis])) return false;
  }
  const Vec3 normal = edges[0].cross(edges[1]);
  return plane_box_overlap(normal, -normal.dot(a), half);
}

int clamp_cell(double grid_coord, int resolution) {
  const int cell = static_cast<int>(std::floor(grid_coord));
  return std::clamp(cell, 0, resolution - 1);
}

void append_field(std::string& out, const std::optional<double>& value) {
  if (!value.has_value()) return;
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", *value);
  out += buffer;
}

}  // namespace

GridFrame fit_frame(const BoundingBox& box, int resolution) {
  if (resolution < 2) throw std::invalid_argument("fit_frame: resolution must be >= 2");
  if (!box.min.allFinite() || !box.max.allFinite()) {
    throw std::invalid_argument("fit_frame: non-finite bounding box");
  }
  double extent = box.max_extent();
  if (!(extent > 0.0)) extent = 1.0;
  const int inner = std::max(resolution - 2, 1);
  // Slight expansion keeps boundary-aligned geometry strictly inside the
  // inner block, so the one-cell padding ring stays surface free.
  const double h = extent * (1.0 + 1e-9) / inner;
  GridFrame frame;
  frame.cell_size = h;
  frame.origin = box.center() - (0.5 * h * resolution) * Vec3::Ones();
  return frame;
}

int VoxelGrid::occupied_count() const {
  int count = 0;
  for (const std::uint8_t cell : solid) count += cell != 0;
  return count;
}

double VoxelGrid::cell_volume() const {
  return frame.cell_size * frame.cell_size * frame.cell_size;
}

double VoxelGrid::solid_volume() const { return occupied_count() * cell_volume(); }

void VoxelGrid::validate() const {
  if (resolution < 2) throw std::invalid_argument("VoxelGrid: resolution must be >= 2");
  if (solid.size() != static_cast<std::size_t>(cell_count())) {
    throw std::invalid_argument("VoxelGrid: occupancy size does not match resolution^3");
  }
  if (!(frame.cell_size > 0.0) || !frame.origin.allFinite()) {
    throw std::invalid_argument("VoxelGrid: invalid frame");
  }
}

VoxelGrid voxelize_solid(const TriMesh& mesh, int resolution, const GridFrame& frame) {
  mesh.validate();
  if (resolution < 2) throw std::invalid_argument("voxelize_solid: resolution must be >= 2");
  if (!(frame.cell_size > 0.0) || !frame.origin.allFinite()) {
    throw std::invalid_argument("voxelize_solid: invalid frame");
  }

  VoxelGrid grid;
  grid.resolution = resolution;
  grid.frame = frame;
  const int r = resolution;
  const std::size_t total = static_cast<std::size_t>(r) * r * r;
  const double h = frame.cell_size;
  const Vec3 half = Vec3::Constant(0.5 * h);

  std::vector<std::uint8_t> surface(total, 0);
  for (const std::array<int, 3>& face : mesh.faces) {
    const Vec3& a = mesh.vertices[static_cast<std::size_t>(face[0])];
    const Vec3& b = mesh.vertices[static_cast<std::size_t>(face[1])];
    const Vec3& c = mesh.vertices[static_cast<std::size_t>(face[2])];
    const Vec3 lo = a.cwiseMin(b).cwiseMin(c);
    const Vec3 hi = a.cwiseMax(b).cwiseMax(c);
    int cell_lo[3];
    int cell_hi[3];
    for (int axis = 0; axis < 3; ++axis) {
      cell_lo[axis] = clamp_cell((lo[axis] - frame.origin[axis]) / h, r);
      cell_hi[axis] = clamp_cell((hi[axis] - frame.origin[axis]) / h, r);
    }
    for (int i = cell_lo[0]; i <= cell_hi[0]; ++i) {
      for (int j = cell_lo[1]; j <= cell_hi[1]; ++j) {
        for (int k = cell_lo[2]; k <= cell_hi[2]; ++k) {
          const std::size_t id = static_cast<std::size_t>(grid.index(i, j, k));
          if (surface[id]) continue;
          const Vec3 center = frame.origin + h * (Vec3(i, j, k) + Vec3::Constant(0.5));
          if (tri_box_overlap(center, half, a, b, c)) surface[id] = 1;
        }
      }
    }
  }

  // Exterior fill: 6-connected from every non-surface boundary cell.
  std::vector<std::uint8_t> exterior(total, 0);
  std::vector<int> stack;
  const auto visit = [&](int i, int j, int k) {
    const int id = grid.index(i, j, k);
    if (!surface[static_cast<std::size_t>(id)] && !exterior[static_cast<std::size_t>(id)]) {
      exterior[static_cast<std::size_t>(id)] = 1;
      stack.push_back(id);
    }
  };
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) {
      for (int k = 0; k < r; ++k) {
        if (i == 0 || i == r - 1 || j == 0 || j == r - 1 || k == 0 || k == r - 1) visit(i, j, k);
      }
    }
  }
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    const int k = id % r;
    const int j = (id / r) % r;
    const int i = id / (r * r);
    if (i > 0) visit(i - 1, j, k);
    if (i < r - 1) visit(i + 1, j, k);
    if (j > 0) visit(i, j - 1, k);
    if (j < r - 1) visit(i, j + 1, k);
    if (k > 0) visit(i, j, k - 1);
    if (k < r - 1) visit(i, j, k + 1);
  }

  std::size_t surface_count = 0;
  std::size_t exterior_count = 0;
  for (std::size_t id = 0; id < total; ++id) {
    surface_count += surface[id];
    exterior_count += exterior[id];
  }
  const std::size_t non_surface = total - surface_count;
  // An unclosed surface lets the fill flood essentially every cell it could
  // reach; nearly-full exterior coverage of the non-surface cells is the
  // leak signal, and the grid then falls back to surface-only occupancy.
  grid.leak = non_surface > 0 && exterior_count * 100 > non_surface * 99;
  if (grid.leak) {
    grid.solid = std::move(surface);
  } else {
    grid.solid.assign(total, 0);
    for (std::size_t id = 0; id < total; ++id) grid.solid[id] = exterior[id] ? 0 : 1;
  }
  return grid;
}

VoxelGrid voxelize_solid(const TriMesh& mesh, int resolution) {
  return voxelize_solid(mesh, resolution, fit_frame(bounding_box(mesh), resolution));
}

double metric_iou(const VoxelGrid& a, const VoxelGrid& b) {
  a.validate();
  b.validate();
  if (a.resolution != b.resolution) throw std::invalid_argument("metric_iou: resolution mismatch");
  if (!(a.frame == b.frame)) throw std::invalid_argument("metric_iou: frame mismatch");

  std::size_t intersection = 0;
  std::size_t set_union = 0;
  for (std::size_t id = 0; id < a.solid.size(); ++id) {
    const bool in_a = a.solid[id] != 0;
    const bool in_b = b.solid[id] != 0;
    intersection += in_a && in_b;
    set_union += in_a || in_b;
  }
  if (set_union == 0) return 1.0;
  return static_cast<double>(intersection) / static_cast<double>(set_union);
}

double metric_cd(const PointCloud& a, const PointCloud& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("metric_cd: empty cloud");
  return chamfer(a, b).value;
}

double metric_emd(const PointCloud& a, const PointCloud& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("metric_emd: empty cloud");
  if (a.size() != b.size()) {
    std::ostringstream msg;
    msg << "metric_emd: cardinality mismatch (" << a.size() << " vs " << b.size() << ")";
    throw std::invalid_argument(msg.str());
  }
  return emd(a, b).value;
}

void MetricReport::validate() const {
  if (cd.has_value() && (!(*cd >= 0.0) || !std::isfinite(*cd))) {
    throw std::invalid_argument("MetricReport: cd must be finite and nonnegative");
  }
  if (emd.has_value() && (!(*emd >= 0.0) || !std::isfinite(*emd))) {
    throw std::invalid_argument("MetricReport: emd must be finite and nonnegative");
  }
  if (iou.has_value() && (!(*iou >= 0.0) || !(*iou <= 1.0))) {
    throw std::invalid_argument("MetricReport: iou must lie in [0, 1]");
  }
}

std::string MetricReport::to_json() const {
  const auto field = [](const std::optional<double>& value) -> std::string {
    if (!value.has_value()) return "null";
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.17g", *value);
    return buffer;
  };
  std::string out = "{\"cd\":" + field(cd) + ",\"emd\":" + field(emd) + ",\"iou\":" + field(iou) +
                    ",\"leak\":" + (leak ? "true" : "false") + "}";
  return out;
}

std::string MetricReport::csv_header() { return "cd,emd,iou,leak"; }

std::string MetricReport::to_csv() const {
  std::string out;
  append_field(out, cd);
  out += ',';
  append_field(out, emd);
  out += ',';
  append_field(out, iou);
  out += ',';
  out += leak ? '1' : '0';
  return out;
}

}  // namespace meshdeform
