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

#include "meshdeform/tape.hpp"

#include <stdexcept>
#include <utility>

namespace meshdeform {

Tape::NodeId Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return static_cast<NodeId>(nodes_.size()) - 1;
}

const Tape::Node& Tape::at(NodeId id) const {
  if (id < 0 || id >= size()) throw std::invalid_argument("Tape: node id out of range");
  return nodes_[static_cast<std::size_t>(id)];
}

void Tape::check_open() const {
  if (backward_run_) {
    throw std::logic_error("Tape: cannot record ops after backward()");
  }
}

const Tensor& Tape::value(NodeId id) const { return at(id).value; }

Tape::NodeId Tape::variable(Tensor value) {
  check_open();
  Node node;
  node.op = Op::kLeaf;
  node.value = std::move(value);
  return push(std::move(node));
}

Tape::NodeId Tape::constant(Tensor value) { return variable(std::move(value)); }

Tape::NodeId Tape::linear(NodeId x, NodeId weights, NodeId bias) {
  check_open();
  const Tensor& xv = at(x).value;
  const Tensor& wv = at(weights).value;
  const Tensor& bv = at(bias).value;
  if (xv.cols() != wv.rows()) {
    throw std::invalid_argument("Tape::linear: input and weight shapes incompatible");
  }
  if (bv.rows() != 1 || bv.cols() != wv.cols()) {
    throw std::invalid_argument("Tape::linear: bias must be 1 x output_width");
  }
  Node node;
  node.op = Op::kLinear;
  node.inputs = {x, weights, bias};
  node.value = xv * wv;
  node.value.rowwise() += bv.row(0);
  return push(std::move(node));
}

Tape::NodeId Tape::relu(NodeId x) {
  check_open();
  Node node;
  node.op = Op::kRelu;
  node.inputs = {x};
  node.value = at(x).value.cwiseMax(0.0);
  return push(std::move(node));
}

Tape::NodeId Tape::min_zero(NodeId x) {
  check_open();
  Node node;
  node.op = Op::kMinZero;
  node.inputs = {x};
  node.value = at(x).value.cwiseMin(0.0);
  return push(std::move(node));
}

Tape::NodeId Tape::max_pool_points(NodeId x) {
  check_open();
  const Tensor& xv = at(x).value;
  if (xv.rows() < 1) throw std::invalid_argument("Tape::max_pool_points: empty input");
  Node node;
  node.op = Op::kMaxPool;
  node.inputs = {x};
  node.value.resize(1, xv.cols());
  node.argmax.resize(static_cast<std::size_t>(xv.cols()));
  for (Eigen::Index c = 0; c < xv.cols(); ++c) {
    int best_row = 0;
    double best = xv(0, c);
    for (Eigen::Index r = 1; r < xv.rows(); ++r) {
      if (xv(r, c) > best) {
        best = xv(r, c);
        best_row = static_cast<int>(r);
      }
    }
    node.value(0, c) = best;
    node.argmax[static_cast<std::size_t>(c)] = best_row;
  }
  return push(std::move(node));
}

Tape::NodeId Tape::concat_cols(NodeId a, NodeId b) {
  check_open();
  const Tensor& av = at(a).value;
  const Tensor& bv = at(b).value;
  if (av.rows() != bv.rows()) {
    throw std::invalid_argument("Tape::concat_cols: row counts differ");
  }
  Node node;
  node.op = Op::kConcatCols;
  node.inputs = {a, b};
  node.value.resize(av.rows(), av.cols() + bv.cols());
  node.value.leftCols(av.cols()) = av;
  node.value.rightCols(bv.cols()) = bv;
  return push(std::move(node));
}

Tape::NodeId Tape::tile_rows(NodeId x, int rows) {
  check_open();
  const Tensor& xv = at(x).value;
  if (xv.rows() != 1) throw std::invalid_argument("Tape::tile_rows: input must be 1 x D");
  if (rows < 1) throw std::invalid_argument("Tape::tile_rows: rows must be >= 1");
  Node node;
  node.op = Op::kTileRows;
  node.inputs = {x};
  node.value = xv.replicate(rows, 1);
  return push(std::move(node));
}

Tape::NodeId Tape::add(NodeId a, NodeId b) {
  check_open();
  const Tensor& av = at(a).value;
  const Tensor& bv = at(b).value;
  if (av.rows() != bv.rows() || av.cols() != bv.cols()) {
    throw std::invalid_argument("Tape::add: shape mismatch");
  }
  Node node;
  node.op = Op::kAdd;
  node.inputs = {a, b};
  node.value = av + bv;
  return push(std::move(node));
}

Tape::NodeId Tape::sub(NodeId a, NodeId b) {
  check_open();
  const Tensor& av = at(a).value;
  const Tensor& bv = at(b).value;
  if (av.rows() != bv.rows() || av.cols() != bv.cols()) {
    throw std::invalid_argument("Tape::sub: shape mismatch");
  }
  Node node;
  node.op = Op::kSub;
  node.inputs = {a, b};
  node.value = av - bv;
  return push(std::move(node));
}

Tape::NodeId Tape::scale(NodeId x, double factor) {
  check_open();
  Node node;
  node.op = Op::kScale;
  node.inputs = {x};
  node.factor = factor;
  node.value = factor * at(x).value;
  return push(std::move(node));
}

Tape::NodeId Tape::sum(NodeId x) {
  check_open();
  Node node;
  node.op = Op::kSum;
  node.inputs = {x};
  node.value.resize(1, 1);
  node.value(0, 0) = at(x).value.sum();
  return push(std::move(node));
}

Tape::NodeId Tape::barycentric_gather(NodeId vertex_values, const SampleBatch& batch,
                                      const TriMesh& mesh) {
  check_open();
  const Tensor& verts = at(vertex_values).value;
  if (verts.rows() != mesh.vertex_count()) {
    throw std::invalid_argument("Tape::barycentric_gather: vertex row count mismatch");
  }
  Node node;
  node.op = Op::kGather;
  node.inputs = {vertex_values};
  node.value = propagate(batch, mesh, verts);
  // The adjoint must survive the caller's mesh/batch going away, so the
  // per-sample vertex ids and weights are copied onto the tape.
  node.gather_vertices.reserve(static_cast<std::size_t>(batch.size()) * 3);
  for (int s = 0; s < batch.size(); ++s) {
    const auto& face = mesh.faces[batch.face_index[s]];
    node.gather_vertices.push_back(face[0]);
    node.gather_vertices.push_back(face[1]);
    node.gather_vertices.push_back(face[2]);
  }
  node.gather_weights = batch.weights;
  node.gather_vertex_count = mesh.vertex_count();
  return push(std::move(node));
}

Tape::NodeId Tape::external_scalar(NodeId input, double value, Tensor grad_wrt_input) {
  check_open();
  const Tensor& iv = at(input).value;
  if (grad_wrt_input.rows() != iv.rows() || grad_wrt_input.cols() != iv.cols()) {
    throw std::invalid_argument("Tape::external_scalar: gradient shape must match input");
  }
  Node node;
  node.op = Op::kExternalScalar;
  node.inputs = {input};
  node.value.resize(1, 1);
  node.value(0, 0) = value;
  node.external_grad = std::move(grad_wrt_input);
  return push(std::move(node));
}

Tape::NodeId Tape::weighted_sum(const std::vector<NodeId>& terms,
                                const std::vector<double>& weights) {
  check_open();
  if (terms.size() != weights.size() || terms.empty()) {
    throw std::invalid_argument("Tape::weighted_sum: terms and weights must match and be nonempty");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const Tensor& tv = at(terms[k]).value;
    if (tv.rows() != 1 || tv.cols() != 1) {
      throw std::invalid_argument("Tape::weighted_sum: terms must be 1 x 1");
    }
    total += weights[k] * tv(0, 0);
  }
  Node node;
  node.op = Op::kWeightedSum;
  node.inputs = terms;
  node.term_weights = weights;
  node.value.resize(1, 1);
  node.value(0, 0) = total;
  return push(std::move(node));
}

void Tape::backward(NodeId loss) {
  if (backward_run_) {
    throw std::logic_error("Tape::backward: called twice on the same tape");
  }
  const Node& loss_node = at(loss);
  if (loss_node.value.rows() != 1 || loss_node.value.cols() != 1) {
    throw std::invalid_argument("Tape::backward: loss node must be 1 x 1");
  }
  backward_run_ = true;

  for (Node& node : nodes_) {
    node.grad = Tensor::Zero(node.value.rows(), node.value.cols());
  }
  nodes_[static_cast<std::size_t>(loss)].grad(0, 0) = 1.0;

  for (NodeId id = loss; id >= 0; --id) {
    Node& node = nodes_[static_cast<std::size_t>(id)];
    const Tensor& g = node.grad;
    switch (node.op) {
      case Op::kLeaf:
        break;
      case Op::kLinear: {
        Node& x = nodes_[static_cast<std::size_t>(node.inputs[0])];
        Node& w = nodes_[static_cast<std::size_t>(node.inputs[1])];
        Node& b = nodes_[static_cast<std::size_t>(node.inputs[2])];
        x.grad.noalias() += g * w.value.transpose();
        w.grad.noalias() += x.value.transpose() * g;
        b.grad.row(0) += g.colwise().sum();
        break;
      }
      case Op::kRelu: {
        Node& x = nodes_[static_cast<std::size_t>(node.inputs[0])];
        x.grad.array() += g.array() * (x.value.array() > 0.0).cast<double>();
        break;
      }
      case Op::kMinZero: {
        Node& x = nodes_[static_cast<std::size_t>(node.inputs[0])];
        x.grad.array() += g.array() * (x.value.array() < 0.0).cast<double>();
        break;
      }
      case Op::kMaxPool: {
        Node& x = nodes_[static_cast<std::size_t>(node.inputs[0])];
        for (Eigen::Index c = 0; c < g.cols(); ++c) {
          x.grad(node.argmax[static_cast<std::size_t>(c)], c) += g(0, c);
        }
        break;
      }
      case Op::kConcatCols: {
        Node& a = nodes_[static_cast<std::size_t>(node.inputs[0])];
        Node& b = nodes_[static_cast<std::size_t>(node.inputs[1])];
        a.grad += g.leftCols(a.value.cols());
        b.grad += g.rightCols(b.value.cols());
        break;
      }
      case Op::kTileRows: {
        Node& x = nodes_[static_cast<std::size_t>(node.inputs[0])];
        x.grad.row(0) += g.colwise().sum();
        break;
      }
      case Op::kAdd: {
        nodes_[static_cast<std::size_t>(node.inputs[0])].grad += g;
        nodes_[static_cast<std::size_t>(node.inputs[1])].grad += g;
        break;
      }
      case Op::kSub: {
        nodes_[static_cast<std::size_t>(node.inputs[0])].grad += g;
        nodes_[static_cast<std::size_t>(node.inputs[1])].grad -= g;
        break;
      }
      case Op::kScale: {
        nodes_[static_cast<std::size_t>(node.inputs[0])].grad += node.factor * g;
        break;
      }
      case Op::kSum: {
        Node& x = nodes_[static_cast<std::size_t>(node.inputs[0])];
        x.grad.array() += g(0, 0);
        break;
      }
      case Op::kGather: {
        Node& x = nodes_[static_cast<std::size_t>(node.inputs[0])];
        // Sample order, matching scatter_gradients' deterministic reduction.
        for (Eigen::Index s = 0; s < node.gather_weights.rows(); ++s) {
          const std::size_t base = static_cast<std::size_t>(s) * 3;
          for (int corner = 0; corner < 3; ++corner) {
            x.grad.row(node.gather_vertices[base + static_cast<std::size_t>(corner)]) +=
                node.gather_weights(s, corner) * g.row(s);
          }
        }
        break;
      }
      case Op::kExternalScalar: {
        Node& x = nodes_[static_cast<std::size_t>(node.inputs[0])];
        x.grad += g(0, 0) * node.external_grad;
        break;
      }
      case Op::kWeightedSum: {
        for (std::size_t k = 0; k < node.inputs.size(); ++k) {
          nodes_[static_cast<std::size_t>(node.inputs[k])].grad(0, 0) +=
              node.term_weights[k] * g(0, 0);
        }
        break;
      }
    }
  }
}

const Tensor& Tape::gradient(NodeId id) const {
  if (!backward_run_) {
    throw std::logic_error("Tape::gradient: backward() has not run");
  }
  return at(id).grad;
}

}  // namespace meshdeform
