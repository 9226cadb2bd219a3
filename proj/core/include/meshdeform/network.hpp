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
#include <string>
#include <utility>
#include <vector>

#include "meshdeform/geometry.hpp"
#include "meshdeform/rng.hpp"
#include "meshdeform/tape.hpp"

namespace meshdeform {

struct DenseLayer {
  Tensor weights;  // input_width x output_width
  Tensor bias;     // 1 x output_width
};

/// A shared per-point MLP: the same layers applied to every row of the
/// input. relu_after[k] controls the activation following layer k.
struct MlpParams {
  std::vector<DenseLayer> layers;
  std::vector<char> relu_after;

  int input_width() const;
  int output_width() const;
  /// Throws std::invalid_argument when consecutive layer shapes disagree or
  /// relu_after does not parallel layers.
  void validate() const;
};

/// Uniform fan-in initialization: every weight and bias entry drawn from
/// U(-1/sqrt(fan_in), 1/sqrt(fan_in)). Entries are consumed from `rng` layer
/// by layer, weights row-major then bias, so the result is a pure function
/// of the widths and the generator state.
MlpParams make_mlp(const std::vector<int>& widths, const std::vector<char>& relu_after, Rng& rng);

/// Zeroes the last layer's weights and bias. A decoder initialized this way
/// outputs exactly zero, so deformation starts at the identity.
void zero_final_layer(MlpParams& mlp);

/// Pooled per-cloud descriptor produced by an encoder.
struct GlobalFeature {
  Eigen::RowVectorXd values;
  int size() const { return static_cast<int>(values.size()); }
};

/// Tape node ids of one MLP's parameters, registered for one forward pass.
struct MlpVars {
  std::vector<std::pair<Tape::NodeId, Tape::NodeId>> layers;  // (weights, bias)
};

MlpVars register_mlp(Tape& tape, const MlpParams& mlp);

/// Applies the shared MLP to every row of x.
Tape::NodeId mlp_forward(Tape& tape, const MlpParams& mlp, const MlpVars& vars, Tape::NodeId x);

/// points (N x 3) -> per-point MLP -> columnwise max pool -> 1 x D feature.
/// Exactly permutation invariant in the input rows.
Tape::NodeId encode_pointcloud(Tape& tape, const MlpParams& encoder, const MlpVars& vars,
                               Tape::NodeId points);

/// Row-wise decoder input is [position | source_feat | target_feat]; output
/// is one offset row per position row.
Tape::NodeId offset_decoder(Tape& tape, const MlpParams& decoder, const MlpVars& vars,
                            Tape::NodeId positions, Tape::NodeId source_feat,
                            Tape::NodeId target_feat);

/// Gradients of one MLP's parameters after Tape::backward, in layer order.
std::vector<DenseLayer> collect_gradients(const Tape& tape, const MlpVars& vars);

/// Eager (gradient-free) encoder evaluation.
GlobalFeature encode_pointcloud(const PointCloud& points, const MlpParams& encoder);

/// Eager decoder evaluation at fixed features.
Mat decode_offsets(const Mat& positions, const GlobalFeature& source_feat,
                   const GlobalFeature& target_feat, const MlpParams& decoder);

/// Requested layer widths for the deformation network. Encoders run
/// 3 -> encoder[...] with relu after every layer; the decoder runs
/// (3 + 2 * feature) -> decoder_hidden[...] -> 3 with relu on hidden layers
/// and a linear, zero-initialized final layer.
struct NetworkWidths {
  std::vector<int> encoder{64, 128, 256};
  std::vector<int> decoder_hidden{512, 256};
};

/// Full parameter set: two independent encoders plus the offset decoder.
struct DeformNetParams {
  MlpParams source_encoder;
  MlpParams target_encoder;
  MlpParams decoder;

  int feature_width() const { return source_encoder.output_width(); }
  void validate() const;
  /// Architecture identity string; checkpoints embed it and loading against
  /// a different architecture is rejected.
  std::string fingerprint() const;
  /// Parameters in serialization order (source encoder, target encoder,
  /// decoder; weights then bias per layer).
  std::vector<Tensor*> parameter_list();
};

DeformNetParams init_deform_params(std::uint64_t seed, const NetworkWidths& widths = {});

/// Parameters of the point-cloud autoencoder used for retrieval embeddings:
/// the shared encoder and a decoder from the feature to a fixed-size point
/// set (flattened to 1 x 3*output_points).
struct AutoencoderParams {
  MlpParams encoder;
  MlpParams decoder;
  int output_points = 0;

  void validate() const;
  std::string fingerprint() const;
  std::vector<Tensor*> parameter_list();
};

AutoencoderParams init_autoencoder_params(std::uint64_t seed, int output_points,
                                          const std::vector<int>& encoder_widths = {64, 128, 256},
                                          const std::vector<int>& decoder_hidden = {256});

// Checkpoint container: magic, format version, fingerprint, then each MLP's
// structure and tensors. Binary, little-endian, doubles in row-major order.

void save_mlp_bundle(const std::string& path, const std::string& fingerprint,
                     const std::vector<const MlpParams*>& mlps);
/// Returns (stored fingerprint, mlps). Throws IoError on filesystem trouble
/// and ParseError on malformed content.
std::pair<std::string, std::vector<MlpParams>> load_mlp_bundle(const std::string& path);

void save_checkpoint(const std::string& path, const DeformNetParams& params);
/// expected_fingerprint empty = accept whatever architecture is stored.
DeformNetParams load_checkpoint(const std::string& path,
                                const std::string& expected_fingerprint = "");

void save_autoencoder(const std::string& path, const AutoencoderParams& params);
AutoencoderParams load_autoencoder(const std::string& path,
                                   const std::string& expected_fingerprint = "");

/// Adaptive-moment gradient descent with bias correction.
struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Adam {
 public:
  explicit Adam(const AdamConfig& config);

  /// Applies one update. `params` and `grads` are parallel; shapes must stay
  /// identical across calls because moment buffers persist.
  void step(const std::vector<Tensor*>& params, const std::vector<const Tensor*>& grads);

  std::int64_t steps_taken() const { return t_; }

 private:
  AdamConfig config_;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
  std::int64_t t_ = 0;
};

}  // namespace meshdeform
