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

#include <vector>

#include "meshdeform/geometry.hpp"
#include "meshdeform/matrix.hpp"
#include "meshdeform/rng.hpp"

namespace meshdeform {

/// A batch of surface samples that remembers where each sample came from.
///
/// Every sample stores the face it landed on and its barycentric weights, so
/// any per-vertex quantity (positions, offsets, gradients) can be moved
/// between the vertex domain and the sample domain by a linear map. That
/// linear map is what makes surface sampling differentiable: propagate() is
/// the forward map and scatter_gradients() is its exact adjoint.
struct SampleBatch {
  /// Sampled positions, one row per sample (n x 3).
  Mat points;
  /// Face index of each sample into the mesh this batch was drawn from.
  std::vector<int> face_index;
  /// Barycentric weights, one row per sample (n x 3). Rows are convex:
  /// nonnegative and summing to 1.
  Mat weights;

  int size() const { return static_cast<int>(face_index.size()); }
};

/// Draws `count` points uniformly by area from the surface of `mesh`.
///
/// Faces are chosen with probability proportional to their area (zero-area
/// faces are never chosen); the position within a face uses the square-root
/// warp so the distribution inside each triangle is uniform. Requires at
/// least one face with positive area.
SampleBatch sample_surface(const TriMesh& mesh, int count, Rng& rng);

/// Moves a per-vertex quantity into the sample domain.
///
/// Each output row is the barycentric combination of the three vertex rows
/// of the sample's face: rows(out)[s] = sum_i w_si * rows(vertex_values)[f_si].
/// `vertex_values` must have one row per mesh vertex; any column count works.
Mat propagate(const SampleBatch& batch, const TriMesh& mesh, const Mat& vertex_values);

/// Adjoint of propagate(): scatters per-sample gradients back to vertices.
///
/// Each sample adds w_si * sample_grads.row(s) into the row of its face's
/// i-th vertex. The result has one row per vertex; vertices touched by no
/// sample receive zero. For any X and G of matching shapes,
/// sum(propagate(X) .* G) == sum(X .* scatter_gradients(G)).
Mat scatter_gradients(const SampleBatch& batch, const TriMesh& mesh, const Mat& sample_grads);

/// Returns exactly `count` points drawn from `cloud`: the cloud itself when
/// sizes already match (no generator state consumed), a uniform subset
/// without replacement when the cloud is larger, and uniform draws with
/// replacement when it is smaller.
PointCloud resize_cloud(const PointCloud& cloud, int count, Rng& rng);

}  // namespace meshdeform
