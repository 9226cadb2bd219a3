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

#include "meshdeform/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace meshdeform {

namespace {

void check_nonempty(const PointCloud& pc, const char* role) {
  if (pc.empty()) {
    throw std::invalid_argument(std::string("losses: ") + role + " cloud is empty");
  }
  pc.validate();
}

}  // namespace

void LossWeights::validate() const {
  const double all[] = {cd_mesh, emd_mesh, cd_points, emd_points, sym, lap, lpi};
  for (double w : all) {
    if (!std::isfinite(w) || w < 0.0) {
      throw std::invalid_argument("LossWeights: weights must be finite and nonnegative");
    }
  }
}

void LpiConfig::validate() const {
  if (!std::isfinite(epsilon) || epsilon <= 0.0) {
    throw std::invalid_argument("LpiConfig: epsilon must be positive");
  }
}

ChamferResult chamfer(const PointCloud& pc, const PointCloud& pc_t) {
  check_nonempty(pc_t, "target");
  return chamfer_with_tree(pc, pc_t, KdTree(cloud_to_matrix(pc_t)));
}

ChamferResult chamfer_with_tree(const PointCloud& pc, const PointCloud& pc_t,
                                const KdTree& target_tree) {
  check_nonempty(pc, "first");
  check_nonempty(pc_t, "target");
  if (target_tree.size() != pc_t.size()) {
    throw std::invalid_argument("chamfer: tree does not index the target cloud");
  }

  ChamferResult result;
  result.gradient = Mat::Zero(pc.size(), 3);

  for (int i = 0; i < pc.size(); ++i) {
    const NearestResult nn = target_tree.nearest(pc.points[i]);
    result.value += nn.sq_dist;
    const Vec3 diff = pc.points[i] - pc_t.points[nn.index];
    result.gradient.row(i) += 2.0 * diff.transpose();
  }

  const KdTree pc_tree(cloud_to_matrix(pc));
  for (int j = 0; j < pc_t.size(); ++j) {
    const NearestResult nn = pc_tree.nearest(pc_t.points[j]);
    result.value += nn.sq_dist;
    const Vec3 diff = pc.points[nn.index] - pc_t.points[j];
    result.gradient.row(nn.index) += 2.0 * diff.transpose();
  }
  return result;
}

ChamferResult chamfer_brute(const PointCloud& pc, const PointCloud& pc_t) {
  check_nonempty(pc, "first");
  check_nonempty(pc_t, "target");

  const Mat a = cloud_to_matrix(pc);
  const Mat b = cloud_to_matrix(pc_t);
  ChamferResult result;
  result.gradient = Mat::Zero(pc.size(), 3);

  for (int i = 0; i < pc.size(); ++i) {
    const NearestResult nn = brute_force_nearest(b, pc.points[i]);
    result.value += nn.sq_dist;
    const Vec3 diff = pc.points[i] - pc_t.points[nn.index];
    result.gradient.row(i) += 2.0 * diff.transpose();
  }
  for (int j = 0; j < pc_t.size(); ++j) {
    const NearestResult nn = brute_force_nearest(a, pc_t.points[j]);
    result.value += nn.sq_dist;
    const Vec3 diff = pc.points[nn.index] - pc_t.points[j];
    result.gradient.row(nn.index) += 2.0 * diff.transpose();
  }
  return result;
}

EmdResult emd(const PointCloud& pc, const PointCloud& pc_t, const AssignmentOptions& options,
              AssignmentWarmStart* warm) {
  check_nonempty(pc, "first");
  check_nonempty(pc_t, "target");
  if (pc.size() != pc_t.size()) {
    throw std::invalid_argument("emd: point clouds must have equal cardinality");
  }
  const int n = pc.size();

  // The cost matrix dominates the footprint at optimizer scale, so the buffer
  // persists across calls; columns stream in struct-of-arrays order.
  static thread_local Mat cost;
  static thread_local Eigen::VectorXd tx, ty, tz;
  cost.resize(n, n);
  tx.resize(n);
  ty.resize(n);
  tz.resize(n);
  for (int j = 0; j < n; ++j) {
    tx[j] = pc_t.points[j].x();
    ty[j] = pc_t.points[j].y();
    tz[j] = pc_t.points[j].z();
  }
  for (int i = 0; i < n; ++i) {
    const Vec3& p = pc.points[i];
    cost.row(i) = ((tx.array() - p.x()).square() + (ty.array() - p.y()).square() +
                   (tz.array() - p.z()).square())
                      .sqrt()
                      .transpose();
  }

  const AssignmentResult match = solve_assignment(cost, options, warm);

  EmdResult result;
  result.value = match.cost;
  result.gap = match.gap;
  result.exact = match.exact;
  result.gradient = Mat::Zero(n, 3);
  for (int i = 0; i < n; ++i) {
    const Vec3 diff = pc.points[i] - pc_t.points[match.target_of_source[i]];
    const double dist = diff.norm();
    if (dist > 0.0) result.gradient.row(i) = (diff / dist).transpose();
  }
  return result;
}

SymmetryResult symmetry_loss(const PointCloud& pc, const PointCloud& pc_t, SymmetryPlane plane,
                             const AssignmentOptions& options, AssignmentWarmStart* warm) {
  const PointCloud mirrored = mirror_points(pc, plane);
  const ChamferResult cd = chamfer(mirrored, pc_t);
  const EmdResult em = emd(mirrored, pc_t, options, warm);

  SymmetryResult result;
  result.value = cd.value + em.value;
  result.gap = em.gap;
  result.gradient = cd.gradient + em.gradient;
  result.gradient.col(mirror_axis(plane)) *= -1.0;
  return result;
}

namespace {

/// Edge adjacency with per-neighbor weights and the row's weight sum. A row
/// with weight_sum == 0 acts as isolated (its Laplacian row is zero).
struct Adjacency {
  std::vector<std::vector<std::pair<int, double>>> neighbors;
  std::vector<double> weight_sum;
};

Adjacency build_adjacency(const TriMesh& mesh, LaplacianKind kind) {
  mesh.validate();
  const int n = mesh.vertex_count();
  Adjacency adj;
  adj.neighbors.resize(n);
  adj.weight_sum.assign(n, 0.0);

  // Accumulate symmetric edge weights. Uniform uses 1 per unique edge;
  // cotangent sums the cotangents of the angles opposite the edge.
  std::vector<std::map<int, double>> weight(n);
  for (const auto& face : mesh.faces) {
    for (int corner = 0; corner < 3; ++corner) {
      const int a = face[corner];
      const int b = face[(corner + 1) % 3];
      const int c = face[(corner + 2) % 3];
      if (kind == LaplacianKind::kUniform) {
        // Insert each undirected edge once regardless of sharing faces.
        if (a < b) weight[a][b] = 1.0;
      } else {
        // Cotangent at c of the angle subtending edge (a, b).
        const Vec3 u = mesh.vertices[a] - mesh.vertices[c];
        const Vec3 v = mesh.vertices[b] - mesh.vertices[c];
        const double cross_norm = u.cross(v).norm();
        const double cot = cross_norm > 0.0 ? u.dot(v) / cross_norm : 0.0;
        if (std::isfinite(cot)) {
          const int lo = std::min(a, b);
          const int hi = std::max(a, b);
          weight[lo][hi] += cot;
        }
      }
    }
  }

  for (int i = 0; i < n; ++i) {
    for (const auto& [j, w] : weight[i]) {
      adj.neighbors[i].emplace_back(j, w);
      adj.neighbors[j].emplace_back(i, w);
    }
  }
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (const auto& [j, w] : adj.neighbors[i]) sum += w;
    if (!std::isfinite(sum) || std::abs(sum) < 1e-12) sum = 0.0;
    adj.weight_sum[i] = sum;
  }
  return adj;
}

}  // namespace

Eigen::SparseMatrix<double> laplacian_matrix(const TriMesh& mesh, LaplacianKind kind) {
  const Adjacency adj = build_adjacency(mesh, kind);
  const int n = mesh.vertex_count();

  std::vector<Eigen::Triplet<double>> triplets;
  for (int i = 0; i < n; ++i) {
    if (adj.weight_sum[i] == 0.0) continue;
    triplets.emplace_back(i, i, 1.0);
    for (const auto& [j, w] : adj.neighbors[i]) {
      triplets.emplace_back(i, j, -w / adj.weight_sum[i]);
    }
  }
  Eigen::SparseMatrix<double> lap(n, n);
  lap.setFromTriplets(triplets.begin(), triplets.end());
  return lap;
}

LaplacianResult laplacian_loss(const TriMesh& source, const Mat& deformed, LaplacianKind kind) {
  if (deformed.rows() != source.vertex_count() || deformed.cols() != 3) {
    throw std::invalid_argument("laplacian_loss: deformed positions must be vertex_count x 3");
  }
  const Adjacency adj = build_adjacency(source, kind);
  const int n = source.vertex_count();

  // The loss depends only on Lap(deformed) - Lap(source) = Lap(displacement),
  // so it is evaluated on the displacement field. This keeps a constant
  // translation exactly at zero instead of within roundoff.
  const Mat displacement = deformed - vertices_to_matrix(source);

  Mat residual(n, 3);
  for (int i = 0; i < n; ++i) {
    if (adj.weight_sum[i] == 0.0) {
      residual.row(i).setZero();
      continue;
    }
    Eigen::RowVector3d acc = Eigen::RowVector3d::Zero();
    for (const auto& [j, w] : adj.neighbors[i]) acc += w * displacement.row(j);
    residual.row(i) = displacement.row(i) - acc / adj.weight_sum[i];
  }

  LaplacianResult result;
  Mat residual_grad(n, 3);
  for (int i = 0; i < n; ++i) {
    const double norm = residual.row(i).norm();
    result.value += norm;
    residual_grad.row(i) = norm > 0.0 ? (residual.row(i) / norm).eval() : residual.row(i);
  }

  // Transpose of the Laplacian: each row keeps its own direction and
  // receives -w/weight_sum(i) of every row i it neighbors.
  result.gradient = Mat::Zero(n, 3);
  for (int i = 0; i < n; ++i) {
    if (adj.weight_sum[i] == 0.0) continue;
    result.gradient.row(i) += residual_grad.row(i);
    for (const auto& [j, w] : adj.neighbors[i]) {
      result.gradient.row(j) -= (w / adj.weight_sum[i]) * residual_grad.row(i);
    }
  }
  return result;
}

LpiResult lpi_loss(const std::function<Mat(const Mat&)>& offset_field, const Mat& vertices,
                   const LpiConfig& config) {
  config.validate();
  if (vertices.cols() != 3) {
    throw std::invalid_argument("lpi_loss: vertices must have 3 columns");
  }
  if (!offset_field) {
    throw std::invalid_argument("lpi_loss: offset field is not callable");
  }

  const Mat base = offset_field(vertices);
  if (base.rows() != vertices.rows() || base.cols() != 3) {
    throw std::invalid_argument("lpi_loss: offset field must return rows x 3");
  }

  LpiResult result;
  result.grad_base = Mat::Zero(base.rows(), 3);

  for (int axis = 0; axis < 3; ++axis) {
    if (!config.axes[static_cast<std::size_t>(axis)]) continue;
    Mat shifted_positions = vertices;
    shifted_positions.col(axis).array() += config.epsilon;
    const Mat shifted = offset_field(shifted_positions);
    if (shifted.rows() != base.rows() || shifted.cols() != 3) {
      throw std::invalid_argument("lpi_loss: offset field must return rows x 3");
    }

    Mat diff = shifted - base;
    if (config.include_delta) diff.col(axis).array() += config.epsilon;

    Mat grad_shift = Mat::Zero(base.rows(), 3);
    for (Eigen::Index r = 0; r < diff.rows(); ++r) {
      for (Eigen::Index c = 0; c < 3; ++c) {
        if (diff(r, c) < 0.0) {
          result.value -= diff(r, c);
          grad_shift(r, c) = -1.0;
          result.grad_base(r, c) += 1.0;
        }
      }
    }
    result.axes.push_back(axis);
    result.grad_shifted.push_back(std::move(grad_shift));
  }
  return result;
}

namespace {

struct WeightedTerm {
  const TermInputs* term;
  double weight;
  double* report_value;
  const char* name;
};

}  // namespace

LossReport combine(const LossBundle& bundle, const LossWeights& weights) {
  weights.validate();
  LossReport report;
  report.emd_gap = bundle.emd_gap;

  const WeightedTerm terms[] = {
      {&bundle.cd_mesh, weights.cd_mesh, &report.cd_mesh, "cd_mesh"},
      {&bundle.emd_mesh, weights.emd_mesh, &report.emd_mesh, "emd_mesh"},
      {&bundle.cd_points, weights.cd_points, &report.cd_points, "cd_points"},
      {&bundle.emd_points, weights.emd_points, &report.emd_points, "emd_points"},
      {&bundle.sym, weights.sym, &report.sym, "sym"},
      {&bundle.lap, weights.lap, &report.lap, "lap"},
      {&bundle.lpi, weights.lpi, &report.lpi, "lpi"},
  };

  for (const WeightedTerm& entry : terms) {
    if (!entry.term->value.has_value()) {
      if (entry.weight != 0.0) {
        throw std::invalid_argument(std::string("combine: term '") + entry.name +
                                    "' has nonzero weight but was not computed");
      }
      continue;
    }
    *entry.report_value = *entry.term->value;
    report.total += entry.weight * *entry.term->value;
    if (entry.weight == 0.0) continue;
    for (const auto& [role, grad] : entry.term->gradients) {
      auto it = report.gradients.find(role);
      if (it == report.gradients.end()) {
        report.gradients.emplace(role, (entry.weight * grad).eval());
      } else {
        if (it->second.rows() != grad.rows() || it->second.cols() != grad.cols()) {
          throw std::invalid_argument("combine: gradient shape mismatch for role '" + role + "'");
        }
        it->second += entry.weight * grad;
      }
    }
  }
  return report;
}

}  // namespace meshdeform
