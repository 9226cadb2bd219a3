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

#include "meshdeform/kdtree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace meshdeform {

NearestResult brute_force_nearest(const Mat& points, const Vec3& query) {
  if (points.rows() == 0) {
    throw std::invalid_argument("brute_force_nearest: empty point set");
  }
  NearestResult best{-1, std::numeric_limits<double>::infinity()};
  for (int i = 0; i < static_cast<int>(points.rows()); ++i) {
    const Vec3 p(points(i, 0), points(i, 1), points(i, 2));
    const double d = squared_distance(query, p);
    if (d < best.sq_dist) {
      best.sq_dist = d;
      best.index = i;
    }
  }
  return best;
}

KdTree::KdTree(const Mat& points) : points_(points) {
  if (points_.rows() > 0 && points_.cols() != 3) {
    throw std::invalid_argument("KdTree: points must have 3 columns");
  }
  const int n = size();
  if (n == 0) return;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  nodes_.reserve(n);
  root_ = build(order, 0, n);
}

int KdTree::build(std::vector<int>& order, int lo, int hi) {
  if (lo >= hi) return -1;

  // Split on the widest axis of the range's bounding box. Ties pick the
  // lowest axis so the tree shape is deterministic.
  Vec3 mn = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 mx = -mn;
  for (int i = lo; i < hi; ++i) {
    const auto row = points_.row(order[i]);
    for (int a = 0; a < 3; ++a) {
      mn[a] = std::min(mn[a], row[a]);
      mx[a] = std::max(mx[a], row[a]);
    }
  }
  int axis = 0;
  double widest = mx[0] - mn[0];
  for (int a = 1; a < 3; ++a) {
    if (mx[a] - mn[a] > widest) {
      widest = mx[a] - mn[a];
      axis = a;
    }
  }

  const int mid = lo + (hi - lo) / 2;
  std::nth_element(order.begin() + lo, order.begin() + mid, order.begin() + hi,
                   [&](int a, int b) {
                     const double ca = points_(a, axis);
                     const double cb = points_(b, axis);
                     if (ca != cb) return ca < cb;
                     return a < b;
                   });

  const int node_id = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{order[mid], axis, -1, -1});
  const int left = build(order, lo, mid);
  const int right = build(order, mid + 1, hi);
  nodes_[node_id].left = left;
  nodes_[node_id].right = right;
  return node_id;
}

NearestResult KdTree::nearest(const Vec3& query) const {
  if (empty()) throw std::invalid_argument("KdTree::nearest: empty tree");
  NearestResult best{-1, std::numeric_limits<double>::infinity()};
  search(root_, query, best);
  return best;
}

void KdTree::search(int node_id, const Vec3& query, NearestResult& best) const {
  if (node_id < 0) return;
  const Node& node = nodes_[node_id];
  const int idx = node.point;
  const Vec3 p(points_(idx, 0), points_(idx, 1), points_(idx, 2));
  const double d = squared_distance(query, p);
  if (d < best.sq_dist || (d == best.sq_dist && idx < best.index)) {
    best.sq_dist = d;
    best.index = idx;
  }

  const double diff = query[node.axis] - points_(idx, node.axis);
  const int near_child = diff < 0.0 ? node.left : node.right;
  const int far_child = diff < 0.0 ? node.right : node.left;
  search(near_child, query, best);
  // Strict inequality: an equal-distance point across the plane may have a
  // lower index, so the far side is pruned only when it cannot tie.
  if (!(diff * diff > best.sq_dist)) search(far_child, query, best);
}

}  // namespace meshdeform
