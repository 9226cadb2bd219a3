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

#include "meshdeform/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace meshdeform {

SampleBatch sample_surface(const TriMesh& mesh, int count, Rng& rng) {
  mesh.validate();
  if (count < 0) throw std::invalid_argument("sample_surface: negative sample count");

  const std::vector<double> areas = face_areas(mesh);
  // Cumulative areas over faces with positive area; zero-area faces get zero
  // probability mass and can never be selected by the strict upper_bound.
  std::vector<double> cumulative(areas.size());
  double total = 0.0;
  for (std::size_t f = 0; f < areas.size(); ++f) {
    total += areas[f];
    cumulative[f] = total;
  }
  if (!(total > 0.0)) {
    throw std::invalid_argument("sample_surface: mesh has no face with positive area");
  }

  SampleBatch batch;
  batch.points.resize(count, 3);
  batch.face_index.resize(count);
  batch.weights.resize(count, 3);

  for (int s = 0; s < count; ++s) {
    const double u = rng.uniform() * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) --it;
    int f = static_cast<int>(it - cumulative.begin());
    // Guard against landing on a zero-area face through repeated cumulative
    // values; advance to the next face that contributed mass.
    while (areas[f] <= 0.0 && f + 1 < static_cast<int>(areas.size())) ++f;
    while (areas[f] <= 0.0 && f > 0) --f;

    const double r1 = rng.uniform();
    const double r2 = rng.uniform();
    const double sqrt_r1 = std::sqrt(r1);
    const double w1 = 1.0 - sqrt_r1;
    const double w2 = sqrt_r1 * (1.0 - r2);
    const double w3 = sqrt_r1 * r2;

    const auto& face = mesh.faces[f];
    const Vec3 p = w1 * mesh.vertices[face[0]] + w2 * mesh.vertices[face[1]] +
                   w3 * mesh.vertices[face[2]];

    batch.points.row(s) = p.transpose();
    batch.face_index[s] = f;
    batch.weights(s, 0) = w1;
    batch.weights(s, 1) = w2;
    batch.weights(s, 2) = w3;
  }
  return batch;
}

namespace {

void check_batch_against_mesh(const SampleBatch& batch, const TriMesh& mesh) {
  if (batch.points.rows() != batch.size() || batch.weights.rows() != batch.size()) {
    throw std::invalid_argument("sample batch: inconsistent row counts");
  }
  for (int s = 0; s < batch.size(); ++s) {
    const int f = batch.face_index[s];
    if (f < 0 || f >= mesh.face_count()) {
      throw std::invalid_argument("sample batch: face index out of range");
    }
  }
}

}  // namespace

Mat propagate(const SampleBatch& batch, const TriMesh& mesh, const Mat& vertex_values) {
  check_batch_against_mesh(batch, mesh);
  if (vertex_values.rows() != mesh.vertex_count()) {
    throw std::invalid_argument("propagate: vertex_values row count must equal vertex count");
  }
  Mat out(batch.size(), vertex_values.cols());
  for (int s = 0; s < batch.size(); ++s) {
    const auto& face = mesh.faces[batch.face_index[s]];
    out.row(s) = batch.weights(s, 0) * vertex_values.row(face[0]) +
                 batch.weights(s, 1) * vertex_values.row(face[1]) +
                 batch.weights(s, 2) * vertex_values.row(face[2]);
  }
  return out;
}

PointCloud resize_cloud(const PointCloud& cloud, int count, Rng& rng) {
  if (cloud.empty()) throw std::invalid_argument("resize_cloud: empty cloud");
  if (count < 1) throw std::invalid_argument("resize_cloud: count must be >= 1");
  const int n = cloud.size();
  if (count == n) return cloud;

  PointCloud out;
  out.points.reserve(static_cast<std::size_t>(count));
  if (count < n) {
    // Partial Fisher-Yates; order of selection is the output order.
    std::vector<int> index(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) index[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < count; ++i) {
      const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
      std::swap(index[static_cast<std::size_t>(i)], index[static_cast<std::size_t>(j)]);
      out.points.push_back(cloud.points[static_cast<std::size_t>(index[static_cast<std::size_t>(i)])]);
    }
  } else {
    for (int i = 0; i < count; ++i) {
      out.points.push_back(cloud.points[rng.below(static_cast<std::uint64_t>(n))]);
    }
  }
  return out;
}

Mat scatter_gradients(const SampleBatch& batch, const TriMesh& mesh, const Mat& sample_grads) {
  check_batch_against_mesh(batch, mesh);
  if (sample_grads.rows() != batch.size()) {
    throw std::invalid_argument("scatter_gradients: sample_grads row count must equal batch size");
  }
  Mat out = Mat::Zero(mesh.vertex_count(), sample_grads.cols());
  // Accumulation runs in sample order so the result is deterministic for a
  // given batch even though floating-point addition is not associative.
  for (int s = 0; s < batch.size(); ++s) {
    const auto& face = mesh.faces[batch.face_index[s]];
    out.row(face[0]) += batch.weights(s, 0) * sample_grads.row(s);
    out.row(face[1]) += batch.weights(s, 1) * sample_grads.row(s);
    out.row(face[2]) += batch.weights(s, 2) * sample_grads.row(s);
  }
  return out;
}

}  // namespace meshdeform
