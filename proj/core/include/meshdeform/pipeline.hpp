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

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "meshdeform/geometry.hpp"
#include "meshdeform/losses.hpp"
#include "meshdeform/matrix.hpp"
#include "meshdeform/network.hpp"
#include "meshdeform/sampling.hpp"

namespace meshdeform {

/// Per-vertex (or per-point) displacement rows.
using OffsetField = Mat;

/// S' = (V + O, E). Connectivity is copied from the source untouched.
TriMesh apply_offsets(const TriMesh& source, const OffsetField& offsets);

enum class DeformMode { kNetwork, kDirect, kTrain };

/// Knobs shared by every pipeline entry point.
struct PipelineOptions {
  LossWeights weights{};
  /// Surface samples for encoding the source and for the mesh-pass losses.
  int mesh_samples = 2048;
  /// Samples for the second (point) pass.
  int point_samples = 2048;
  SymmetryPlane symmetry_plane = SymmetryPlane::XZ;
  LpiConfig lpi{};
  AssignmentOptions assignment{};

  void validate() const;
};

/// One deformation task.
struct DeformJob {
  TriMesh source;
  PointCloud target;
  PipelineOptions options{};
  int iterations = 500;
  double step_size = 1e-3;
  std::uint64_t seed = 0;
  DeformMode mode = DeformMode::kDirect;
  /// Redraw surface samples every iteration; a fixed batch otherwise.
  bool resample_per_step = true;

  void validate() const;
};

struct ForwardResult {
  TriMesh deformed;
  PointCloud deformed_points;
  LossReport report;
};

/// Full network forward pass with all seven loss terms.
///
/// Stages: sample the source surface and encode it; encode the target cloud;
/// decode per-vertex offsets at the source vertices; interpolate the
/// deformation onto a fresh surface batch for the mesh-pass Chamfer/EMD;
/// decode offsets for an independent point batch for the point-pass terms;
/// mirror the deformed mesh-pass samples for the symmetry term; compare
/// Laplacian coordinates for the detail term; probe the decoder at
/// axis-shifted vertices for the fold-over term; combine with the weights.
ForwardResult forward_pipeline(const TriMesh& source, const PointCloud& target,
                               const DeformNetParams& params, std::uint64_t seed,
                               const PipelineOptions& options = {});

struct OptimizeResult {
  TriMesh deformed;
  OffsetField offsets;
  /// Loss evaluated at the start of each step plus once after the last
  /// update: iterations + 1 rows.
  std::vector<LossReport> trace;
  /// Step whose iterate had the lowest total; the returned mesh/offsets.
  int best_step = 0;
  /// Loss became non-finite; the run stopped early and the trace ends at
  /// the offending evaluation.
  bool diverged = false;
};

/// Optimizes per-vertex offsets directly (no network): the offsets are the
/// free variable, updated by adaptive-moment descent on the mesh-pass
/// Chamfer/EMD, symmetry, and Laplacian terms. The fold-over term needs a
/// decoder function to probe off-vertex, so it does not exist in this mode;
/// the point-pass terms would duplicate the mesh pass. Returns the
/// best-total iterate.
OptimizeResult optimize_direct(const DeformJob& job);

struct TrainConfig {
  int epochs = 1;
  double learning_rate = 1e-4;
  std::uint64_t seed = 0;
  PipelineOptions options{};
  /// Redraw sampling seeds every step; reuse the first step's otherwise.
  bool resample_per_step = true;
  /// When nonempty, a checkpoint is written here after every epoch as
  /// epoch_NNNN.ckpt.
  std::string checkpoint_dir;
};

struct TrainResult {
  DeformNetParams params;
  std::vector<LossReport> trace;
};

/// Steps through (source, target) pairs in order, epochs times, updating the
/// network after each forward/backward pass. Throws NumericError with step
/// diagnostics if the loss goes non-finite.
TrainResult train(const std::vector<std::pair<TriMesh, PointCloud>>& pairs,
                  DeformNetParams params, const TrainConfig& config);

struct TemplateEntry {
  int id = 0;
  TriMesh mesh;
  /// Encoder feature of a deterministic surface sample; empty until
  /// embeddings are computed.
  Eigen::RowVectorXd embedding;
};

struct TemplateSet {
  std::vector<TemplateEntry> entries;

  bool has_embeddings() const;
  void validate() const;
};

/// Assigns ids 0..n-1 in input order; computes embeddings when an encoder is
/// given (each template sampled with `samples` points from a per-id stream
/// of `seed`).
TemplateSet build_template_set(std::vector<TriMesh> meshes, const MlpParams* embed_encoder,
                               int samples = 1024, std::uint64_t seed = 0);

/// Nearest template by embedding distance. Requires embeddings in the set;
/// `embed_encoder` produces the target's embedding and must be the encoder
/// the set was built with. Ties pick the lowest id.
int select_template(const PointCloud& target, const TemplateSet& templates,
                    const MlpParams& embed_encoder);

/// Fallback without a trained encoder: nearest template by Chamfer distance
/// between the target and a deterministic sample of each template. Ties
/// pick the lowest id.
int select_template_chamfer(const PointCloud& target, const TemplateSet& templates,
                            int samples = 1024, std::uint64_t seed = 0);

struct AutoencoderTrainConfig {
  int steps = 500;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  /// Reconstruction size: the decoder emits this many points.
  int output_points = 64;
  std::vector<int> encoder_widths{64, 128, 256};
  std::vector<int> decoder_hidden{256};
};

struct AutoencoderTrainResult {
  AutoencoderParams params;
  /// Reconstruction Chamfer loss per step.
  std::vector<double> trace;
};

/// Trains a point-cloud autoencoder (encoder + fixed-size point decoder)
/// with Chamfer reconstruction loss, cycling through `clouds` in order. The
/// encoder half is the retrieval embedding.
AutoencoderTrainResult train_autoencoder(const std::vector<PointCloud>& clouds,
                                         const AutoencoderTrainConfig& config);

/// Deforms toward a blend of two targets: the decoder runs with target
/// feature (1-t) * feat(a) + t * feat(b). At t = 0 and t = 1 the result is
/// bit-identical to deforming toward the single corresponding target.
TriMesh interpolate_targets(const TriMesh& source, const PointCloud& target_a,
                            const PointCloud& target_b, double t, const DeformNetParams& params,
                            std::uint64_t seed, const PipelineOptions& options = {});

/// Loss trace serialization: one row per report, columns
/// step,cd_mesh,emd_mesh,cd_points,emd_points,sym,lap,lpi,total with
/// round-trip precision.
void write_trace_csv(const std::vector<LossReport>& trace, std::ostream& out);
void save_trace_csv(const std::vector<LossReport>& trace, const std::string& path);

}  // namespace meshdeform
