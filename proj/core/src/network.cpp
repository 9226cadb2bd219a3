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

#include "meshdeform/network.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "meshdeform/errors.hpp"

namespace meshdeform {

int MlpParams::input_width() const {
  return layers.empty() ? 0 : static_cast<int>(layers.front().weights.rows());
}

int MlpParams::output_width() const {
  return layers.empty() ? 0 : static_cast<int>(layers.back().weights.cols());
}

void MlpParams::validate() const {
  if (layers.empty()) throw std::invalid_argument("MlpParams: no layers");
  if (relu_after.size() != layers.size()) {
    throw std::invalid_argument("MlpParams: relu_after must parallel layers");
  }
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const DenseLayer& layer = layers[k];
    if (layer.weights.rows() < 1 || layer.weights.cols() < 1) {
      throw std::invalid_argument("MlpParams: empty weight matrix");
    }
    if (layer.bias.rows() != 1 || layer.bias.cols() != layer.weights.cols()) {
      throw std::invalid_argument("MlpParams: bias shape mismatch");
    }
    if (k > 0 && layers[k - 1].weights.cols() != layer.weights.rows()) {
      throw std::invalid_argument("MlpParams: consecutive layer widths incompatible");
    }
    if (!layer.weights.allFinite() || !layer.bias.allFinite()) {
      throw std::invalid_argument("MlpParams: non-finite parameter entry");
    }
  }
}

MlpParams make_mlp(const std::vector<int>& widths, const std::vector<char>& relu_after, Rng& rng) {
  if (widths.size() < 2) throw std::invalid_argument("make_mlp: need at least input and output");
  if (relu_after.size() != widths.size() - 1) {
    throw std::invalid_argument("make_mlp: relu_after must have one entry per layer");
  }
  MlpParams mlp;
  mlp.relu_after = relu_after;
  for (std::size_t k = 0; k + 1 < widths.size(); ++k) {
    const int fan_in = widths[k];
    const int fan_out = widths[k + 1];
    if (fan_in < 1 || fan_out < 1) throw std::invalid_argument("make_mlp: widths must be >= 1");
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    DenseLayer layer;
    layer.weights.resize(fan_in, fan_out);
    for (int r = 0; r < fan_in; ++r) {
      for (int c = 0; c < fan_out; ++c) layer.weights(r, c) = rng.uniform(-bound, bound);
    }
    layer.bias.resize(1, fan_out);
    for (int c = 0; c < fan_out; ++c) layer.bias(0, c) = rng.uniform(-bound, bound);
    mlp.layers.push_back(std::move(layer));
  }
  return mlp;
}

void zero_final_layer(MlpParams& mlp) {
  if (mlp.layers.empty()) throw std::invalid_argument("zero_final_layer: no layers");
  mlp.layers.back().weights.setZero();
  mlp.layers.back().bias.setZero();
}

MlpVars register_mlp(Tape& tape, const MlpParams& mlp) {
  mlp.validate();
  MlpVars vars;
  for (const DenseLayer& layer : mlp.layers) {
    vars.layers.emplace_back(tape.variable(layer.weights), tape.variable(layer.bias));
  }
  return vars;
}

Tape::NodeId mlp_forward(Tape& tape, const MlpParams& mlp, const MlpVars& vars, Tape::NodeId x) {
  if (vars.layers.size() != mlp.layers.size()) {
    throw std::invalid_argument("mlp_forward: vars do not match params");
  }
  Tape::NodeId h = x;
  for (std::size_t k = 0; k < mlp.layers.size(); ++k) {
    h = tape.linear(h, vars.layers[k].first, vars.layers[k].second);
    if (mlp.relu_after[k]) h = tape.relu(h);
  }
  return h;
}

Tape::NodeId encode_pointcloud(Tape& tape, const MlpParams& encoder, const MlpVars& vars,
                               Tape::NodeId points) {
  return tape.max_pool_points(mlp_forward(tape, encoder, vars, points));
}

Tape::NodeId offset_decoder(Tape& tape, const MlpParams& decoder, const MlpVars& vars,
                            Tape::NodeId positions, Tape::NodeId source_feat,
                            Tape::NodeId target_feat) {
  const int rows = static_cast<int>(tape.value(positions).rows());
  const Tape::NodeId src_tiled = tape.tile_rows(source_feat, rows);
  const Tape::NodeId tgt_tiled = tape.tile_rows(target_feat, rows);
  const Tape::NodeId features = tape.concat_cols(src_tiled, tgt_tiled);
  const Tape::NodeId input = tape.concat_cols(positions, features);
  return mlp_forward(tape, decoder, vars, input);
}

std::vector<DenseLayer> collect_gradients(const Tape& tape, const MlpVars& vars) {
  std::vector<DenseLayer> grads;
  grads.reserve(vars.layers.size());
  for (const auto& [w_id, b_id] : vars.layers) {
    grads.push_back(DenseLayer{tape.gradient(w_id), tape.gradient(b_id)});
  }
  return grads;
}

GlobalFeature encode_pointcloud(const PointCloud& points, const MlpParams& encoder) {
  if (points.empty()) throw std::invalid_argument("encode_pointcloud: empty cloud");
  points.validate();
  Tape tape;
  const MlpVars vars = register_mlp(tape, encoder);
  const Tape::NodeId x = tape.constant(cloud_to_matrix(points));
  const Tape::NodeId feature = encode_pointcloud(tape, encoder, vars, x);
  GlobalFeature result;
  result.values = tape.value(feature).row(0);
  return result;
}

Mat decode_offsets(const Mat& positions, const GlobalFeature& source_feat,
                   const GlobalFeature& target_feat, const MlpParams& decoder) {
  Tape tape;
  const MlpVars vars = register_mlp(tape, decoder);
  const Tape::NodeId pos = tape.constant(positions);
  Tensor src(1, source_feat.size());
  src.row(0) = source_feat.values;
  Tensor tgt(1, target_feat.size());
  tgt.row(0) = target_feat.values;
  const Tape::NodeId out = offset_decoder(tape, decoder, vars, pos, tape.constant(std::move(src)),
                                          tape.constant(std::move(tgt)));
  return tape.value(out);
}

namespace {

std::string mlp_signature(const MlpParams& mlp) {
  std::ostringstream sig;
  sig << mlp.input_width();
  for (std::size_t k = 0; k < mlp.layers.size(); ++k) {
    sig << '-' << mlp.layers[k].weights.cols() << (mlp.relu_after[k] ? 'r' : 'l');
  }
  return sig.str();
}

}  // namespace

void DeformNetParams::validate() const {
  source_encoder.validate();
  target_encoder.validate();
  decoder.validate();
  if (source_encoder.input_width() != 3 || target_encoder.input_width() != 3) {
    throw std::invalid_argument("DeformNetParams: encoders must take 3-D points");
  }
  if (source_encoder.output_width() != target_encoder.output_width()) {
    throw std::invalid_argument("DeformNetParams: encoder feature widths differ");
  }
  if (decoder.input_width() != 3 + 2 * feature_width()) {
    throw std::invalid_argument("DeformNetParams: decoder input width mismatch");
  }
  if (decoder.output_width() != 3) {
    throw std::invalid_argument("DeformNetParams: decoder must output 3-D offsets");
  }
}

std::string DeformNetParams::fingerprint() const {
  return "meshdeform:deform:1:src=" + mlp_signature(source_encoder) +
         ":tgt=" + mlp_signature(target_encoder) + ":dec=" + mlp_signature(decoder);
}

std::vector<Tensor*> DeformNetParams::parameter_list() {
  std::vector<Tensor*> list;
  for (MlpParams* mlp : {&source_encoder, &target_encoder, &decoder}) {
    for (DenseLayer& layer : mlp->layers) {
      list.push_back(&layer.weights);
      list.push_back(&layer.bias);
    }
  }
  return list;
}

DeformNetParams init_deform_params(std::uint64_t seed, const NetworkWidths& widths) {
  if (widths.encoder.empty()) throw std::invalid_argument("init_deform_params: empty encoder");
  Rng root(seed);
  Rng src_rng = root.fork(0);
  Rng tgt_rng = root.fork(1);
  Rng dec_rng = root.fork(2);

  std::vector<int> enc_widths{3};
  enc_widths.insert(enc_widths.end(), widths.encoder.begin(), widths.encoder.end());
  const std::vector<char> enc_relu(widths.encoder.size(), 1);

  const int feature = widths.encoder.back();
  std::vector<int> dec_widths{3 + 2 * feature};
  dec_widths.insert(dec_widths.end(), widths.decoder_hidden.begin(), widths.decoder_hidden.end());
  dec_widths.push_back(3);
  std::vector<char> dec_relu(widths.decoder_hidden.size(), 1);
  dec_relu.push_back(0);

  DeformNetParams params;
  params.source_encoder = make_mlp(enc_widths, enc_relu, src_rng);
  params.target_encoder = make_mlp(enc_widths, enc_relu, tgt_rng);
  params.decoder = make_mlp(dec_widths, dec_relu, dec_rng);
  zero_final_layer(params.decoder);
  params.validate();
  return params;
}

void AutoencoderParams::validate() const {
  encoder.validate();
  decoder.validate();
  if (encoder.input_width() != 3) {
    throw std::invalid_argument("AutoencoderParams: encoder must take 3-D points");
  }
  if (decoder.input_width() != encoder.output_width()) {
    throw std::invalid_argument("AutoencoderParams: decoder input must match feature width");
  }
  if (output_points < 1 || decoder.output_width() != 3 * output_points) {
    throw std::invalid_argument("AutoencoderParams: decoder output must be 3 * output_points");
  }
}

std::string AutoencoderParams::fingerprint() const {
  return "meshdeform:autoencoder:1:enc=" + mlp_signature(encoder) +
         ":dec=" + mlp_signature(decoder) + ":points=" + std::to_string(output_points);
}

std::vector<Tensor*> AutoencoderParams::parameter_list() {
  std::vector<Tensor*> list;
  for (MlpParams* mlp : {&encoder, &decoder}) {
    for (DenseLayer& layer : mlp->layers) {
      list.push_back(&layer.weights);
      list.push_back(&layer.bias);
    }
  }
  return list;
}

AutoencoderParams init_autoencoder_params(std::uint64_t seed, int output_points,
                                          const std::vector<int>& encoder_widths,
                                          const std::vector<int>& decoder_hidden) {
  if (output_points < 1) {
    throw std::invalid_argument("init_autoencoder_params: output_points must be >= 1");
  }
  if (encoder_widths.empty()) {
    throw std::invalid_argument("init_autoencoder_params: empty encoder widths");
  }
  Rng root(seed);
  Rng enc_rng = root.fork(0);
  Rng dec_rng = root.fork(1);

  std::vector<int> enc{3};
  enc.insert(enc.end(), encoder_widths.begin(), encoder_widths.end());
  const std::vector<char> enc_relu(encoder_widths.size(), 1);

  std::vector<int> dec{encoder_widths.back()};
  dec.insert(dec.end(), decoder_hidden.begin(), decoder_hidden.end());
  dec.push_back(3 * output_points);
  std::vector<char> dec_relu(decoder_hidden.size(), 1);
  dec_relu.push_back(0);

  AutoencoderParams params;
  params.encoder = make_mlp(enc, enc_relu, enc_rng);
  params.decoder = make_mlp(dec, dec_relu, dec_rng);
  params.output_points = output_points;
  params.validate();
  return params;
}

namespace {

constexpr char kMagic[4] = {'M', 'D', 'F', 'C'};
constexpr std::uint32_t kFormatVersion = 1;
constexpr std::uint32_t kMaxDim = 1u << 20;
constexpr std::uint32_t kMaxLayers = 1024;
constexpr std::uint32_t kMaxMlps = 64;

void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char bytes[4];
  for (int i = 0; i < 4; ++i) bytes[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(bytes), 4);
}

std::uint32_t read_u32(std::istream& in, const std::string& path) {
  unsigned char bytes[4];
  in.read(reinterpret_cast<char*>(bytes), 4);
  if (!in) throw ParseError(path + ": truncated checkpoint");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[i]) << (8 * i);
  return v;
}

void write_tensor(std::ostream& out, const Tensor& t) {
  write_u32(out, static_cast<std::uint32_t>(t.rows()));
  write_u32(out, static_cast<std::uint32_t>(t.cols()));
  out.write(reinterpret_cast<const char*>(t.data()),
            static_cast<std::streamsize>(sizeof(double)) * t.size());
}

Tensor read_tensor(std::istream& in, const std::string& path) {
  const std::uint32_t rows = read_u32(in, path);
  const std::uint32_t cols = read_u32(in, path);
  if (rows == 0 || cols == 0 || rows > kMaxDim || cols > kMaxDim) {
    throw ParseError(path + ": tensor dimensions out of range");
  }
  Tensor t(rows, cols);
  in.read(reinterpret_cast<char*>(t.data()),
          static_cast<std::streamsize>(sizeof(double)) * t.size());
  if (!in) throw ParseError(path + ": truncated checkpoint");
  if (!t.allFinite()) throw ParseError(path + ": non-finite tensor entry");
  return t;
}

}  // namespace

void save_mlp_bundle(const std::string& path, const std::string& fingerprint,
                     const std::vector<const MlpParams*>& mlps) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path + ": cannot open for writing");
  out.write(kMagic, 4);
  write_u32(out, kFormatVersion);
  write_u32(out, static_cast<std::uint32_t>(fingerprint.size()));
  out.write(fingerprint.data(), static_cast<std::streamsize>(fingerprint.size()));
  write_u32(out, static_cast<std::uint32_t>(mlps.size()));
  for (const MlpParams* mlp : mlps) {
    mlp->validate();
    write_u32(out, static_cast<std::uint32_t>(mlp->layers.size()));
    for (std::size_t k = 0; k < mlp->layers.size(); ++k) {
      write_u32(out, mlp->relu_after[k] ? 1 : 0);
      write_tensor(out, mlp->layers[k].weights);
      write_tensor(out, mlp->layers[k].bias);
    }
  }
  out.flush();
  if (!out) throw IoError(path + ": write failed");
}

std::pair<std::string, std::vector<MlpParams>> load_mlp_bundle(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path + ": cannot open");

  char magic[4];
  in.read(magic, 4);
  if (!in || magic[0] != kMagic[0] || magic[1] != kMagic[1] || magic[2] != kMagic[2] ||
      magic[3] != kMagic[3]) {
    throw ParseError(path + ": not a checkpoint file");
  }
  const std::uint32_t version = read_u32(in, path);
  if (version != kFormatVersion) {
    throw ParseError(path + ": unsupported checkpoint version " + std::to_string(version));
  }
  const std::uint32_t fp_len = read_u32(in, path);
  if (fp_len > 4096) throw ParseError(path + ": fingerprint length out of range");
  std::string fingerprint(fp_len, '\0');
  in.read(fingerprint.data(), fp_len);
  if (!in) throw ParseError(path + ": truncated checkpoint");

  const std::uint32_t mlp_count = read_u32(in, path);
  if (mlp_count == 0 || mlp_count > kMaxMlps) {
    throw ParseError(path + ": mlp count out of range");
  }
  std::vector<MlpParams> mlps(mlp_count);
  for (MlpParams& mlp : mlps) {
    const std::uint32_t layer_count = read_u32(in, path);
    if (layer_count == 0 || layer_count > kMaxLayers) {
      throw ParseError(path + ": layer count out of range");
    }
    for (std::uint32_t k = 0; k < layer_count; ++k) {
      const std::uint32_t relu = read_u32(in, path);
      if (relu > 1) throw ParseError(path + ": bad activation tag");
      DenseLayer layer;
      layer.weights = read_tensor(in, path);
      layer.bias = read_tensor(in, path);
      mlp.layers.push_back(std::move(layer));
      mlp.relu_after.push_back(static_cast<char>(relu));
    }
    try {
      mlp.validate();
    } catch (const std::invalid_argument& e) {
      throw ParseError(path + ": inconsistent checkpoint: " + e.what());
    }
  }
  return {std::move(fingerprint), std::move(mlps)};
}

void save_checkpoint(const std::string& path, const DeformNetParams& params) {
  params.validate();
  save_mlp_bundle(path, params.fingerprint(),
                  {&params.source_encoder, &params.target_encoder, &params.decoder});
}

DeformNetParams load_checkpoint(const std::string& path, const std::string& expected_fingerprint) {
  auto [fingerprint, mlps] = load_mlp_bundle(path);
  if (mlps.size() != 3) throw ParseError(path + ": expected 3 parameter groups");
  DeformNetParams params;
  params.source_encoder = std::move(mlps[0]);
  params.target_encoder = std::move(mlps[1]);
  params.decoder = std::move(mlps[2]);
  try {
    params.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(path + ": inconsistent checkpoint: " + e.what());
  }
  if (fingerprint != params.fingerprint()) {
    throw ParseError(path + ": fingerprint does not match stored architecture");
  }
  if (!expected_fingerprint.empty() && fingerprint != expected_fingerprint) {
    throw ParseError(path + ": architecture fingerprint mismatch (have '" + fingerprint +
                     "', want '" + expected_fingerprint + "')");
  }
  return params;
}

void save_autoencoder(const std::string& path, const AutoencoderParams& params) {
  params.validate();
  save_mlp_bundle(path, params.fingerprint(), {&params.encoder, &params.decoder});
}

AutoencoderParams load_autoencoder(const std::string& path,
                                   const std::string& expected_fingerprint) {
  auto [fingerprint, mlps] = load_mlp_bundle(path);
  if (mlps.size() != 2) throw ParseError(path + ": expected 2 parameter groups");
  AutoencoderParams params;
  params.encoder = std::move(mlps[0]);
  params.decoder = std::move(mlps[1]);
  params.output_points = params.decoder.output_width() / 3;
  try {
    params.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(path + ": inconsistent checkpoint: " + e.what());
  }
  if (fingerprint != params.fingerprint()) {
    throw ParseError(path + ": fingerprint does not match stored architecture");
  }
  if (!expected_fingerprint.empty() && fingerprint != expected_fingerprint) {
    throw ParseError(path + ": architecture fingerprint mismatch (have '" + fingerprint +
                     "', want '" + expected_fingerprint + "')");
  }
  return params;
}

Adam::Adam(const AdamConfig& config) : config_(config) {
  if (!(config.learning_rate >= 0.0) || !(config.beta1 >= 0.0 && config.beta1 < 1.0) ||
      !(config.beta2 >= 0.0 && config.beta2 < 1.0) || !(config.epsilon > 0.0)) {
    throw std::invalid_argument("Adam: hyperparameters out of range");
  }
}

void Adam::step(const std::vector<Tensor*>& params, const std::vector<const Tensor*>& grads) {
  if (params.size() != grads.size()) {
    throw std::invalid_argument("Adam::step: params and grads must parallel");
  }
  if (m_.empty()) {
    m_.resize(params.size());
    v_.resize(params.size());
    for (std::size_t k = 0; k < params.size(); ++k) {
      m_[k] = Tensor::Zero(params[k]->rows(), params[k]->cols());
      v_[k] = Tensor::Zero(params[k]->rows(), params[k]->cols());
    }
  }
  if (m_.size() != params.size()) {
    throw std::invalid_argument("Adam::step: parameter count changed between steps");
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (std::size_t k = 0; k < params.size(); ++k) {
    Tensor& p = *params[k];
    const Tensor& g = *grads[k];
    if (g.rows() != p.rows() || g.cols() != p.cols()) {
      throw std::invalid_argument("Adam::step: gradient shape mismatch");
    }
    m_[k] = config_.beta1 * m_[k] + (1.0 - config_.beta1) * g;
    v_[k] = config_.beta2 * v_[k] + (1.0 - config_.beta2) * g.cwiseProduct(g);
    const Tensor m_hat = m_[k] / bc1;
    const Tensor v_hat = v_[k] / bc2;
    p.array() -= config_.learning_rate * m_hat.array() / (v_hat.array().sqrt() + config_.epsilon);
  }
}

}  // namespace meshdeform
