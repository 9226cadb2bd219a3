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

#include "meshdeform/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "meshdeform/errors.hpp"
#include "meshdeform/kdtree.hpp"

namespace meshdeform {

namespace {

// Fixed substream ids. interpolate_targets replays kSourceEncode to match
// forward_pipeline's source feature bit for bit.
constexpr std::uint64_t kStreamSourceEncode = 0;
constexpr std::uint64_t kStreamTargetResizeMesh = 1;
constexpr std::uint64_t kStreamMeshPass = 2;
constexpr std::uint64_t kStreamPointPass = 3;
constexpr std::uint64_t kStreamTargetResizePoints = 4;

}  // namespace

TriMesh apply_offsets(const TriMesh& source, const OffsetField& offsets) {
  if (offsets.rows() != source.vertex_count() || offsets.cols() != 3) {
    throw std::invalid_argument("apply_offsets: offsets must be vertex_count x 3");
  }
  TriMesh out = source;
  for (int i = 0; i < out.vertex_count(); ++i) {
    out.vertices[static_cast<std::size_t>(i)] += offsets.row(i).transpose();
  }
  return out;
}

void PipelineOptions::validate() const {
  weights.validate();
  lpi.validate();
  if (mesh_samples < 1 || point_samples < 1) {
    throw std::invalid_argument("PipelineOptions: sample counts must be >= 1");
  }
}

void DeformJob::validate() const {
  source.validate();
  if (target.empty()) throw std::invalid_argument("DeformJob: empty target cloud");
  target.validate();
  options.validate();
  if (iterations < 0) throw std::invalid_argument("DeformJob: negative iteration budget");
  if (!(step_size > 0.0) || !std::isfinite(step_size)) {
    throw std::invalid_argument("DeformJob: step size must be positive");
  }
}

namespace {

struct ForwardGraph {
  std::unique_ptr<Tape> tape;
  Tape::NodeId total = -1;
  MlpVars src_vars;
  MlpVars tgt_vars;
  MlpVars dec_vars;
  ForwardResult result;
};

ForwardGraph run_forward(const TriMesh& source, const PointCloud& target,
                         const DeformNetParams& params, std::uint64_t seed,
                         const PipelineOptions& opts) {
  source.validate();
  if (target.empty()) throw std::invalid_argument("forward_pipeline: empty target cloud");
  target.validate();
  opts.validate();
  params.validate();

  Rng root(seed);
  Rng enc_rng = root.fork(kStreamSourceEncode);
  Rng tgt_mesh_rng = root.fork(kStreamTargetResizeMesh);
  Rng mesh_rng = root.fork(kStreamMeshPass);
  Rng point_rng = root.fork(kStreamPointPass);
  Rng tgt_point_rng = root.fork(kStreamTargetResizePoints);

  ForwardGraph g;
  g.tape = std::make_unique<Tape>();
  Tape& tape = *g.tape;
  g.src_vars = register_mlp(tape, params.source_encoder);
  g.tgt_vars = register_mlp(tape, params.target_encoder);
  g.dec_vars = register_mlp(tape, params.decoder);

  // Features: the source is a mesh, so its encoder sees a surface sample;
  // the target is already a cloud and is encoded whole.
  const SampleBatch enc_batch = sample_surface(source, opts.mesh_samples, enc_rng);
  const Tape::NodeId src_feat = encode_pointcloud(tape, params.source_encoder, g.src_vars,
                                                  tape.constant(enc_batch.points));
  const Tape::NodeId tgt_feat = encode_pointcloud(tape, params.target_encoder, g.tgt_vars,
                                                  tape.constant(cloud_to_matrix(target)));

  // Mesh pass: per-vertex offsets, deformed samples via stored barycentric
  // provenance, shape losses against a resized target.
  const Mat vertices = vertices_to_matrix(source);
  const Tape::NodeId positions = tape.constant(vertices);
  const Tape::NodeId offsets =
      offset_decoder(tape, params.decoder, g.dec_vars, positions, src_feat, tgt_feat);
  const Tape::NodeId deformed_vertices = tape.add(positions, offsets);
  // Offsets past ~1e150 overflow the squared-distance losses and produce
  // non-finite assignment costs; fail as a numeric error, not a usage error.
  if (!tape.value(offsets).allFinite() || tape.value(offsets).cwiseAbs().maxCoeff() > 1e150) {
    throw NumericError("forward_pipeline: decoded offsets overflow the loss terms");
  }
  g.result.deformed = apply_offsets(source, tape.value(offsets));

  const SampleBatch mesh_batch = sample_surface(source, opts.mesh_samples, mesh_rng);
  const Tape::NodeId mesh_samples_node =
      tape.barycentric_gather(deformed_vertices, mesh_batch, source);
  const PointCloud mesh_cloud = matrix_to_cloud(tape.value(mesh_samples_node));
  const PointCloud target_mesh = resize_cloud(target, opts.mesh_samples, tgt_mesh_rng);

  const ChamferResult cd_m = chamfer(mesh_cloud, target_mesh);
  const EmdResult emd_m = emd(mesh_cloud, target_mesh, opts.assignment);
  const SymmetryResult sym_r =
      symmetry_loss(mesh_cloud, target_mesh, opts.symmetry_plane, opts.assignment);
  const Tape::NodeId cd_mesh_node = tape.external_scalar(mesh_samples_node, cd_m.value, cd_m.gradient);
  const Tape::NodeId emd_mesh_node =
      tape.external_scalar(mesh_samples_node, emd_m.value, emd_m.gradient);
  const Tape::NodeId sym_node = tape.external_scalar(mesh_samples_node, sym_r.value, sym_r.gradient);

  const LaplacianResult lap_r = laplacian_loss(source, tape.value(deformed_vertices));
  const Tape::NodeId lap_node = tape.external_scalar(deformed_vertices, lap_r.value, lap_r.gradient);

  // Point pass: the decoder also deforms a free point sample of the source
  // surface, so it learns the deformation as a field rather than only at
  // the vertices.
  const SampleBatch point_batch = sample_surface(source, opts.point_samples, point_rng);
  const Tape::NodeId point_positions = tape.constant(point_batch.points);
  const Tape::NodeId point_offsets =
      offset_decoder(tape, params.decoder, g.dec_vars, point_positions, src_feat, tgt_feat);
  const Tape::NodeId deformed_points_node = tape.add(point_positions, point_offsets);
  const PointCloud point_cloud = matrix_to_cloud(tape.value(deformed_points_node));
  const PointCloud target_points = resize_cloud(target, opts.point_samples, tgt_point_rng);

  const ChamferResult cd_p = chamfer(point_cloud, target_points);
  const EmdResult emd_p = emd(point_cloud, target_points, opts.assignment);
  const Tape::NodeId cd_points_node =
      tape.external_scalar(deformed_points_node, cd_p.value, cd_p.gradient);
  const Tape::NodeId emd_points_node =
      tape.external_scalar(deformed_points_node, emd_p.value, emd_p.gradient);
  g.result.deformed_points = point_cloud;

  // Fold-over probe: compare the offset field at axis-shifted vertices with
  // the field at the vertices; negative components are penalized.
  std::vector<Tape::NodeId> lpi_terms;
  for (int axis = 0; axis < 3; ++axis) {
    if (!opts.lpi.axes[static_cast<std::size_t>(axis)]) continue;
    Mat shifted = vertices;
    shifted.col(axis).array() += opts.lpi.epsilon;
    const Tape::NodeId shifted_offsets = offset_decoder(tape, params.decoder, g.dec_vars,
                                                        tape.constant(shifted), src_feat, tgt_feat);
    Tape::NodeId diff = tape.sub(shifted_offsets, offsets);
    if (opts.lpi.include_delta) {
      Mat delta = Mat::Zero(vertices.rows(), 3);
      delta.col(axis).array() = opts.lpi.epsilon;
      diff = tape.add(diff, tape.constant(delta));
    }
    lpi_terms.push_back(tape.scale(tape.sum(tape.min_zero(diff)), -1.0));
  }
  Tape::NodeId lpi_node;
  if (lpi_terms.empty()) {
    lpi_node = tape.constant(Tensor::Zero(1, 1));
  } else {
    lpi_node = tape.weighted_sum(lpi_terms, std::vector<double>(lpi_terms.size(), 1.0));
  }

  const std::vector<Tape::NodeId> term_nodes = {cd_mesh_node, emd_mesh_node, cd_points_node,
                                                emd_points_node, sym_node, lap_node, lpi_node};
  const std::vector<double> term_weights = {
      opts.weights.cd_mesh, opts.weights.emd_mesh, opts.weights.cd_points,
      opts.weights.emd_points, opts.weights.sym,   opts.weights.lap,
      opts.weights.lpi};
  g.total = tape.weighted_sum(term_nodes, term_weights);

  LossBundle bundle;
  bundle.cd_mesh.value = cd_m.value;
  bundle.emd_mesh.value = emd_m.value;
  bundle.cd_points.value = cd_p.value;
  bundle.emd_points.value = emd_p.value;
  bundle.sym.value = sym_r.value;
  bundle.lap.value = lap_r.value;
  bundle.lpi.value = tape.value(lpi_node)(0, 0);
  bundle.emd_gap = std::max({emd_m.gap, emd_p.gap, sym_r.gap});
  g.result.report = combine(bundle, opts.weights);
  return g;
}

}  // namespace

ForwardResult forward_pipeline(const TriMesh& source, const PointCloud& target,
                               const DeformNetParams& params, std::uint64_t seed,
                               const PipelineOptions& options) {
  return run_forward(source, target, params, seed, options).result;
}

OptimizeResult optimize_direct(const DeformJob& job) {
  job.validate();
  if (job.mode != DeformMode::kDirect) {
    throw std::invalid_argument("optimize_direct: job mode must be direct");
  }
  const TriMesh& source = job.source;
  const int n = job.options.mesh_samples;

  Rng root(job.seed);
  Rng mesh_rng = root.fork(kStreamMeshPass);
  Rng tgt_rng = root.fork(kStreamTargetResizeMesh);

  const PointCloud target = resize_cloud(job.target, n, tgt_rng);
  const KdTree target_tree(cloud_to_matrix(target));

  // Terms that need the decoder as a function (fold-over probe) or a second
  // decoder pass do not exist when the offsets themselves are the variable.
  LossWeights weights = job.options.weights;
  weights.cd_points = 0.0;
  weights.emd_points = 0.0;
  weights.lpi = 0.0;

  const Mat vertices = vertices_to_matrix(source);
  OptimizeResult out;
  out.offsets = Mat::Zero(vertices.rows(), 3);
  OffsetField current = out.offsets;

  Adam adam(AdamConfig{job.step_size, 0.9, 0.999, 1e-8});
  AssignmentWarmStart emd_warm;
  AssignmentWarmStart sym_warm;
  double best_total = std::numeric_limits<double>::infinity();
  SampleBatch batch;

  for (int step = 0; step <= job.iterations; ++step) {
    if (step == 0 || job.resample_per_step) batch = sample_surface(source, n, mesh_rng);

    const Mat deformed = vertices + current;
    const Mat samples = propagate(batch, source, deformed);

    // Divergence guard: past ~1e150 the squared distances and assignment
    // costs overflow to infinity, which the assignment solver rejects as
    // invalid input. Record an honest non-finite row and stop instead.
    if (!samples.allFinite() || samples.cwiseAbs().maxCoeff() > 1e150) {
      LossReport report;
      report.total = std::numeric_limits<double>::infinity();
      out.trace.push_back(report);
      out.diverged = true;
      break;
    }
    const PointCloud sample_cloud = matrix_to_cloud(samples);

    const ChamferResult cd = chamfer_with_tree(sample_cloud, target, target_tree);
    const EmdResult em = emd(sample_cloud, target, job.options.assignment, &emd_warm);
    const SymmetryResult sym = symmetry_loss(sample_cloud, target, job.options.symmetry_plane,
                                             job.options.assignment, &sym_warm);
    const LaplacianResult lap = laplacian_loss(source, deformed);

    LossBundle bundle;
    bundle.cd_mesh.value = cd.value;
    bundle.emd_mesh.value = em.value;
    bundle.sym.value = sym.value;
    bundle.lap.value = lap.value;
    bundle.emd_gap = std::max(em.gap, sym.gap);
    const LossReport report = combine(bundle, weights);
    out.trace.push_back(report);

    if (!std::isfinite(report.total)) {
      out.diverged = true;
      break;
    }
    if (report.total < best_total) {
      best_total = report.total;
      out.best_step = step;
      out.offsets = current;
    }
    if (step == job.iterations) break;

    const Mat sample_grad = weights.cd_mesh * cd.gradient + weights.emd_mesh * em.gradient +
                            weights.sym * sym.gradient;
    Mat offset_grad = scatter_gradients(batch, source, sample_grad);
    offset_grad += weights.lap * lap.gradient;

    adam.step({&current}, {&offset_grad});
  }

  out.deformed = apply_offsets(source, out.offsets);
  return out;
}

TrainResult train(const std::vector<std::pair<TriMesh, PointCloud>>& pairs,
                  DeformNetParams params, const TrainConfig& config) {
  if (pairs.empty()) throw std::invalid_argument("train: empty pair list");
  params.validate();
  config.options.validate();
  if (config.epochs < 0) throw std::invalid_argument("train: negative epoch count");
  if (!(config.learning_rate >= 0.0)) {
    throw std::invalid_argument("train: learning rate must be nonnegative");
  }

  TrainResult out;
  out.params = std::move(params);
  Adam adam(AdamConfig{config.learning_rate, 0.9, 0.999, 1e-8});
  Rng seed_rng(config.seed);
  std::uint64_t fixed_seed = 0;
  bool have_fixed = false;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t pair_index = 0; pair_index < pairs.size(); ++pair_index) {
      std::uint64_t step_seed;
      if (config.resample_per_step) {
        step_seed = seed_rng.next_u64();
      } else {
        if (!have_fixed) {
          fixed_seed = seed_rng.next_u64();
          have_fixed = true;
        }
        step_seed = fixed_seed;
      }

      ForwardGraph g;
      try {
        g = run_forward(pairs[pair_index].first, pairs[pair_index].second, out.params, step_seed,
                        config.options);
      } catch (const NumericError& e) {
        std::ostringstream msg;
        msg << "train: numeric failure at epoch " << epoch << ", pair " << pair_index << ": "
            << e.what();
        throw NumericError(msg.str());
      }
      if (!std::isfinite(g.result.report.total)) {
        std::ostringstream msg;
        msg << "train: non-finite loss at epoch " << epoch << ", pair " << pair_index
            << " (total = " << g.result.report.total << ")";
        throw NumericError(msg.str());
      }
      g.tape->backward(g.total);

      std::vector<DenseLayer> grad_store;
      for (const MlpVars* vars : {&g.src_vars, &g.tgt_vars, &g.dec_vars}) {
        std::vector<DenseLayer> grads = collect_gradients(*g.tape, *vars);
        for (DenseLayer& layer : grads) grad_store.push_back(std::move(layer));
      }
      std::vector<const Tensor*> grad_ptrs;
      for (const DenseLayer& layer : grad_store) {
        grad_ptrs.push_back(&layer.weights);
        grad_ptrs.push_back(&layer.bias);
      }
      adam.step(out.params.parameter_list(), grad_ptrs);
      out.trace.push_back(g.result.report);
    }
    if (!config.checkpoint_dir.empty()) {
      char name[32];
      std::snprintf(name, sizeof(name), "epoch_%04d.ckpt", epoch + 1);
      save_checkpoint(config.checkpoint_dir + "/" + name, out.params);
    }
  }
  return out;
}

bool TemplateSet::has_embeddings() const {
  if (entries.empty()) return false;
  const Eigen::Index width = entries.front().embedding.size();
  if (width == 0) return false;
  for (const TemplateEntry& entry : entries) {
    if (entry.embedding.size() != width) return false;
  }
  return true;
}

void TemplateSet::validate() const {
  if (entries.empty()) throw std::invalid_argument("TemplateSet: empty set");
  const Eigen::Index width = entries.front().embedding.size();
  for (const TemplateEntry& entry : entries) {
    entry.mesh.validate();
    if (entry.embedding.size() != width) {
      throw std::invalid_argument("TemplateSet: embeddings have mixed lengths");
    }
  }
}

TemplateSet build_template_set(std::vector<TriMesh> meshes, const MlpParams* embed_encoder,
                               int samples, std::uint64_t seed) {
  if (meshes.empty()) throw std::invalid_argument("build_template_set: no templates");
  if (samples < 1) throw std::invalid_argument("build_template_set: samples must be >= 1");
  TemplateSet set;
  Rng root(seed);
  for (std::size_t i = 0; i < meshes.size(); ++i) {
    TemplateEntry entry;
    entry.id = static_cast<int>(i);
    entry.mesh = std::move(meshes[i]);
    if (embed_encoder != nullptr) {
      Rng rng = root.fork(static_cast<std::uint64_t>(entry.id));
      const SampleBatch batch = sample_surface(entry.mesh, samples, rng);
      entry.embedding = encode_pointcloud(matrix_to_cloud(batch.points), *embed_encoder).values;
    }
    set.entries.push_back(std::move(entry));
  }
  return set;
}

int select_template(const PointCloud& target, const TemplateSet& templates,
                    const MlpParams& embed_encoder) {
  templates.validate();
  if (!templates.has_embeddings()) {
    throw std::invalid_argument("select_template: template set has no embeddings");
  }
  const GlobalFeature feature = encode_pointcloud(target, embed_encoder);
  if (feature.values.size() != templates.entries.front().embedding.size()) {
    throw std::invalid_argument("select_template: encoder width does not match embeddings");
  }

  int best_id = templates.entries.front().id;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const TemplateEntry& entry : templates.entries) {
    const double dist = (entry.embedding - feature.values).squaredNorm();
    if (dist < best_dist || (dist == best_dist && entry.id < best_id)) {
      best_dist = dist;
      best_id = entry.id;
    }
  }
  return best_id;
}

int select_template_chamfer(const PointCloud& target, const TemplateSet& templates, int samples,
                            std::uint64_t seed) {
  templates.validate();
  if (target.empty()) throw std::invalid_argument("select_template_chamfer: empty target");
  if (samples < 1) throw std::invalid_argument("select_template_chamfer: samples must be >= 1");

  Rng root(seed);
  int best_id = templates.entries.front().id;
  double best_value = std::numeric_limits<double>::infinity();
  for (const TemplateEntry& entry : templates.entries) {
    Rng rng = root.fork(static_cast<std::uint64_t>(entry.id));
    const SampleBatch batch = sample_surface(entry.mesh, samples, rng);
    const double value = chamfer(target, matrix_to_cloud(batch.points)).value;
    if (value < best_value || (value == best_value && entry.id < best_id)) {
      best_value = value;
      best_id = entry.id;
    }
  }
  return best_id;
}

AutoencoderTrainResult train_autoencoder(const std::vector<PointCloud>& clouds,
                                         const AutoencoderTrainConfig& config) {
  if (clouds.empty()) throw std::invalid_argument("train_autoencoder: empty training set");
  for (const PointCloud& cloud : clouds) {
    if (cloud.empty()) throw std::invalid_argument("train_autoencoder: empty cloud in set");
    cloud.validate();
  }
  if (config.steps < 0) throw std::invalid_argument("train_autoencoder: negative step count");
  if (!(config.learning_rate >= 0.0)) {
    throw std::invalid_argument("train_autoencoder: learning rate must be nonnegative");
  }

  AutoencoderTrainResult out;
  out.params = init_autoencoder_params(config.seed, config.output_points, config.encoder_widths,
                                       config.decoder_hidden);
  Adam adam(AdamConfig{config.learning_rate, 0.9, 0.999, 1e-8});

  for (int step = 0; step < config.steps; ++step) {
    const PointCloud& cloud = clouds[static_cast<std::size_t>(step) % clouds.size()];

    Tape tape;
    MlpVars enc_vars = register_mlp(tape, out.params.encoder);
    MlpVars dec_vars = register_mlp(tape, out.params.decoder);
    const Tape::NodeId input = tape.constant(cloud_to_matrix(cloud));
    const Tape::NodeId feature = encode_pointcloud(tape, out.params.encoder, enc_vars, input);
    const Tape::NodeId flat = mlp_forward(tape, out.params.decoder, dec_vars, feature);

    // The 1 x 3n decoder row is the row-major flattening of an n x 3 cloud,
    // so reconstruction and gradient just reinterpret the same storage.
    const Tensor& flat_value = tape.value(flat);
    const Eigen::Map<const Mat> recon(flat_value.data(), config.output_points, 3);
    const ChamferResult cd = chamfer(matrix_to_cloud(recon), cloud);

    out.trace.push_back(cd.value);
    if (!std::isfinite(cd.value)) {
      std::ostringstream msg;
      msg << "train_autoencoder: non-finite loss at step " << step;
      throw NumericError(msg.str());
    }

    Tensor flat_grad(1, 3 * config.output_points);
    Eigen::Map<Mat>(flat_grad.data(), config.output_points, 3) = cd.gradient;
    const Tape::NodeId loss = tape.external_scalar(flat, cd.value, std::move(flat_grad));
    tape.backward(loss);

    std::vector<DenseLayer> grad_store;
    for (const MlpVars* vars : {&enc_vars, &dec_vars}) {
      std::vector<DenseLayer> grads = collect_gradients(tape, *vars);
      for (DenseLayer& layer : grads) grad_store.push_back(std::move(layer));
    }
    std::vector<const Tensor*> grad_ptrs;
    for (const DenseLayer& layer : grad_store) {
      grad_ptrs.push_back(&layer.weights);
      grad_ptrs.push_back(&layer.bias);
    }
    adam.step(out.params.parameter_list(), grad_ptrs);
  }
  return out;
}

TriMesh interpolate_targets(const TriMesh& source, const PointCloud& target_a,
                            const PointCloud& target_b, double t, const DeformNetParams& params,
                            std::uint64_t seed, const PipelineOptions& options) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw std::invalid_argument("interpolate_targets: t must lie in [0, 1]");
  }
  source.validate();
  if (target_a.empty() || target_b.empty()) {
    throw std::invalid_argument("interpolate_targets: empty target cloud");
  }
  options.validate();
  params.validate();

  Rng root(seed);
  Rng enc_rng = root.fork(kStreamSourceEncode);
  const SampleBatch enc_batch = sample_surface(source, options.mesh_samples, enc_rng);
  const GlobalFeature src_feat =
      encode_pointcloud(matrix_to_cloud(enc_batch.points), params.source_encoder);
  const GlobalFeature feat_a = encode_pointcloud(target_a, params.target_encoder);
  const GlobalFeature feat_b = encode_pointcloud(target_b, params.target_encoder);

  GlobalFeature blended;
  if (t == 0.0) {
    blended = feat_a;
  } else if (t == 1.0) {
    blended = feat_b;
  } else {
    blended.values = (1.0 - t) * feat_a.values + t * feat_b.values;
  }

  const Mat offsets =
      decode_offsets(vertices_to_matrix(source), src_feat, blended, params.decoder);
  return apply_offsets(source, offsets);
}

void write_trace_csv(const std::vector<LossReport>& trace, std::ostream& out) {
  out << "step,cd_mesh,emd_mesh,cd_points,emd_points,sym,lap,lpi,total\n";
  char buffer[32];
  const auto put = [&](double v) {
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    out << ',' << buffer;
  };
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const LossReport& r = trace[i];
    out << i;
    put(r.cd_mesh);
    put(r.emd_mesh);
    put(r.cd_points);
    put(r.emd_points);
    put(r.sym);
    put(r.lap);
    put(r.lpi);
    put(r.total);
    out << '\n';
  }
}

void save_trace_csv(const std::vector<LossReport>& trace, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(path + ": cannot open for writing");
  write_trace_csv(trace, out);
  out.flush();
  if (!out) throw IoError(path + ": write failed");
}

}  // namespace meshdeform
