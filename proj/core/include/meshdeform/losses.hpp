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

#include <Eigen/SparseCore>
#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "meshdeform/assignment.hpp"
#include "meshdeform/geometry.hpp"
#include "meshdeform/kdtree.hpp"
#include "meshdeform/matrix.hpp"

namespace meshdeform {

/// Relative weighting of the seven loss terms. All default to 1.
struct LossWeights {
  double cd_mesh = 1.0;
  double emd_mesh = 1.0;
  double cd_points = 1.0;
  double emd_points = 1.0;
  double sym = 1.0;
  double lap = 1.0;
  double lpi = 1.0;

  /// Throws std::invalid_argument if any weight is negative or non-finite.
  void validate() const;
};

/// Chamfer distance: sum over both clouds of the squared distance to the
/// nearest point in the other cloud. `gradient` is with respect to the rows
/// of `pc` and includes the contribution of the reverse sum through the pc
/// points chosen as nearest neighbors. Ties pick the lowest index.
struct ChamferResult {
  double value = 0.0;
  Mat gradient;
};
ChamferResult chamfer(const PointCloud& pc, const PointCloud& pc_t);
/// Variant reusing a prebuilt tree over pc_t; the tree must index exactly
/// pc_t's points. Saves the rebuild when pc_t is fixed across many calls.
ChamferResult chamfer_with_tree(const PointCloud& pc, const PointCloud& pc_t,
                                const KdTree& target_tree);
/// Tree-free O(n^2) variant; same values and ties bit for bit. Useful as a
/// cross-check path and for tiny clouds where tree construction dominates.
ChamferResult chamfer_brute(const PointCloud& pc, const PointCloud& pc_t);

/// Earth mover's distance: minimum over bijections of the sum of unsquared
/// point distances. Requires equal cardinalities. `gradient` row i is
/// (p_i - match_i) / |p_i - match_i|, zero for coincident pairs. `gap` is the
/// certified optimality gap of the underlying assignment (zero-ish when the
/// exact solver ran).
struct EmdResult {
  double value = 0.0;
  Mat gradient;
  double gap = 0.0;
  bool exact = true;
};
EmdResult emd(const PointCloud& pc, const PointCloud& pc_t,
              const AssignmentOptions& options = {}, AssignmentWarmStart* warm = nullptr);

/// Symmetry loss: chamfer plus EMD between the mirrored first cloud and the
/// target. The gradient chains through the reflection, so the mirrored axis
/// component is negated.
struct SymmetryResult {
  double value = 0.0;
  Mat gradient;
  double gap = 0.0;
};
SymmetryResult symmetry_loss(const PointCloud& pc, const PointCloud& pc_t, SymmetryPlane plane,
                             const AssignmentOptions& options = {},
                             AssignmentWarmStart* warm = nullptr);

enum class LaplacianKind {
  /// Umbrella operator: row i is v_i minus the mean of its edge neighbors.
  kUniform,
  /// Cotangent weights, row-normalized. Rows whose weight sum is not usable
  /// (non-finite or nearly zero, possible on poor triangles) degrade to zero
  /// rows rather than poisoning the loss.
  kCotangent,
};

/// Sparse N_V x N_V Laplacian. Isolated vertices get zero rows; every row
/// sums to zero, so the operator annihilates constant vertex fields.
Eigen::SparseMatrix<double> laplacian_matrix(const TriMesh& mesh,
                                             LaplacianKind kind = LaplacianKind::kUniform);

/// Sum over vertices of the Euclidean norm of the change in Laplacian
/// coordinates between the source vertices and `deformed`. Computed on the
/// displacement field directly, so a deformation that is exactly a constant
/// translation yields exactly zero. `gradient` is with respect to `deformed`.
struct LaplacianResult {
  double value = 0.0;
  Mat gradient;
};
LaplacianResult laplacian_loss(const TriMesh& source, const Mat& deformed,
                               LaplacianKind kind = LaplacianKind::kUniform);

/// Local permutation penalty configuration. Each active axis probes the
/// offset field at vertices shifted by epsilon along that axis; components
/// where the shifted offset is smaller than the base offset are penalized.
struct LpiConfig {
  double epsilon = 0.05;
  std::array<bool, 3> axes{true, true, true};
  /// When set, the probe compares delta + F(V+delta) - F(V) against zero,
  /// i.e. penalizes actual coordinate fold-over of deformed probe points
  /// rather than any decrease of the raw offset field.
  bool include_delta = false;

  void validate() const;
};

/// Evaluates the local permutation penalty for an arbitrary offset field.
///
/// `offset_field` maps an n x 3 matrix of positions to an n x 3 matrix of
/// offsets and is invoked once for the base positions and once per active
/// axis. The result carries d(loss)/d(field output) for every evaluation so
/// the caller can chain into whatever parameters produced the field.
struct LpiResult {
  double value = 0.0;
  Mat grad_base;
  std::vector<int> axes;
  std::vector<Mat> grad_shifted;
};
LpiResult lpi_loss(const std::function<Mat(const Mat&)>& offset_field, const Mat& vertices,
                   const LpiConfig& config);

/// One loss term ready for weighting: its scalar value (absent if the term
/// was not computed) and its gradients keyed by the name of the input they
/// differentiate.
struct TermInputs {
  std::optional<double> value;
  std::map<std::string, Mat> gradients;
};

struct LossBundle {
  TermInputs cd_mesh;
  TermInputs emd_mesh;
  TermInputs cd_points;
  TermInputs emd_points;
  TermInputs sym;
  TermInputs lap;
  TermInputs lpi;
  /// Largest certified assignment gap among the EMD-based terms.
  double emd_gap = 0.0;
};

/// Weighted combination of the seven terms. Per-term values are reported
/// unweighted; `total` and the merged gradients carry the weights. A missing
/// term is an error when its weight is nonzero and contributes nothing
/// otherwise.
struct LossReport {
  double cd_mesh = 0.0;
  double emd_mesh = 0.0;
  double cd_points = 0.0;
  double emd_points = 0.0;
  double sym = 0.0;
  double lap = 0.0;
  double lpi = 0.0;
  double total = 0.0;
  double emd_gap = 0.0;
  std::map<std::string, Mat> gradients;
};
LossReport combine(const LossBundle& bundle, const LossWeights& weights);

}  // namespace meshdeform
