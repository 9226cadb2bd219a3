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

#include <Eigen/Core>

#include "meshdeform/geometry.hpp"

namespace meshdeform {

/// Dense double matrix, row-major so flat serialization order matches the
/// (row, col) iteration order used in checkpoints.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline Mat cloud_to_matrix(const PointCloud& cloud) {
  Mat m(cloud.size(), 3);
  for (int i = 0; i < cloud.size(); ++i) m.row(i) = cloud.points[i].transpose();
  return m;
}

inline PointCloud matrix_to_cloud(const Mat& m) {
  PointCloud cloud;
  cloud.points.reserve(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    cloud.points.emplace_back(m(i, 0), m(i, 1), m(i, 2));
  }
  return cloud;
}

inline Mat vertices_to_matrix(const TriMesh& mesh) {
  Mat m(mesh.vertex_count(), 3);
  for (int i = 0; i < mesh.vertex_count(); ++i) m.row(i) = mesh.vertices[i].transpose();
  return m;
}

}  // namespace meshdeform
