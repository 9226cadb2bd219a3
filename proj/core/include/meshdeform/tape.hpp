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

#include "meshdeform/matrix.hpp"
#include "meshdeform/sampling.hpp"

namespace meshdeform {

/// Values flowing through the tape. 2-D only; scalars are 1x1 and feature
/// vectors are 1xD.
using Tensor = Mat;

/// Eager reverse-mode differentiation over a fixed set of primitives.
///
/// Each op evaluates immediately and records what its adjoint needs. After
/// the forward pass, backward(loss) walks the record once in reverse and
/// accumulates exact gradients into every node; leaves created by variable()
/// are the intended gradient sinks. A tape is single-use: one forward
/// construction, one backward sweep.
class Tape {
 public:
  using NodeId = int;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Leaf that participates in differentiation.
  NodeId variable(Tensor value);
  /// Leaf treated as fixed data; it still receives a gradient (callers may
  /// read it) but semantically nothing updates it.
  NodeId constant(Tensor value);

  const Tensor& value(NodeId id) const;
  int size() const { return static_cast<int>(nodes_.size()); }

  // Primitives. Shapes are validated on entry; violations throw
  // std::invalid_argument.

  /// y = x * W + b with b a 1 x D_out row broadcast over rows of x.
  NodeId linear(NodeId x, NodeId weights, NodeId bias);
  /// Componentwise max(x, 0). The derivative at exactly 0 is 0.
  NodeId relu(NodeId x);
  /// Componentwise min(x, 0). The derivative at exactly 0 is 0.
  NodeId min_zero(NodeId x);
  /// Columnwise max over rows: N x D -> 1 x D. Gradient routes to the argmax
  /// row of each column; ties keep the lowest row index.
  NodeId max_pool_points(NodeId x);
  /// [a | b] along columns; row counts must match.
  NodeId concat_cols(NodeId a, NodeId b);
  /// Repeats a 1 x D row `rows` times.
  NodeId tile_rows(NodeId x, int rows);
  NodeId add(NodeId a, NodeId b);
  NodeId sub(NodeId a, NodeId b);
  NodeId scale(NodeId x, double factor);
  /// Sum of all entries -> 1 x 1.
  NodeId sum(NodeId x);
  /// Barycentric interpolation of per-vertex rows onto `batch`'s samples
  /// (the forward of the sampling operator); the adjoint is the exact
  /// scatter of sample gradients back to vertex rows.
  NodeId barycentric_gather(NodeId vertex_values, const SampleBatch& batch, const TriMesh& mesh);
  /// Splices an externally computed scalar into the graph: `value` with a
  /// precomputed d(value)/d(input) of `input`'s shape. Used for losses whose
  /// forward pass runs outside the tape (nearest neighbors, assignment).
  NodeId external_scalar(NodeId input, double value, Tensor grad_wrt_input);
  /// Weighted sum of 1 x 1 nodes -> 1 x 1.
  NodeId weighted_sum(const std::vector<NodeId>& terms, const std::vector<double>& weights);

  /// Reverse sweep seeding d(loss)/d(loss) = 1. `loss` must be 1 x 1.
  /// Calling twice is an error: gradients would silently double-accumulate.
  void backward(NodeId loss);
  bool backward_run() const { return backward_run_; }

  /// Gradient of the last backward()'s loss with respect to node `id`.
  /// Zero-filled for nodes the loss does not depend on.
  const Tensor& gradient(NodeId id) const;

 private:
  enum class Op {
    kLeaf,
    kLinear,
    kRelu,
    kMinZero,
    kMaxPool,
    kConcatCols,
    kTileRows,
    kAdd,
    kSub,
    kScale,
    kSum,
    kGather,
    kExternalScalar,
    kWeightedSum,
  };

  struct Node {
    Op op = Op::kLeaf;
    Tensor value;
    Tensor grad;
    std::vector<NodeId> inputs;
    // Per-op payloads; only the relevant ones are populated.
    std::vector<int> argmax;            // kMaxPool: argmax row per column
    std::vector<int> gather_vertices;   // kGather: 3 vertex ids per sample
    Tensor gather_weights;              // kGather: n x 3 barycentric weights
    int gather_vertex_count = 0;        // kGather: rows of the vertex input
    double factor = 0.0;                // kScale
    Tensor external_grad;               // kExternalScalar
    std::vector<double> term_weights;   // kWeightedSum
  };

  NodeId push(Node node);
  const Node& at(NodeId id) const;
  void check_open() const;

  std::vector<Node> nodes_;
  bool backward_run_ = false;
};

}  // namespace meshdeform
