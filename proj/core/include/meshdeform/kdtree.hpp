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

namespace meshdeform {

struct NearestResult {
  int index = -1;
  double sq_dist = 0.0;
};

/// Shared squared-distance kernel. Every nearest-neighbor path (tree, brute
/// force, tests) must call this so results agree bitwise, not just
/// approximately.
inline double squared_distance(const Vec3& a, const Vec3& b) {
  const double dx = a.x() - b.x();
  const double dy = a.y() - b.y();
  const double dz = a.z() - b.z();
  return dx * dx + dy * dy + dz * dz;
}

/// Reference nearest neighbor: scans all rows in index order. Ties on
/// distance keep the lower index.
NearestResult brute_force_nearest(const Mat& points, const Vec3& query);

/// Static median-split kd-tree over a fixed point set.
///
/// nearest() returns exactly what brute_force_nearest() returns, including
/// on ties: candidates are compared by (sq_dist, index) and subtrees are
/// pruned only when the splitting plane is strictly farther than the current
/// best, so an equal-distance lower-index point is never skipped.
class KdTree {
 public:
  KdTree() = default;
  explicit KdTree(const Mat& points);

  int size() const { return static_cast<int>(points_.rows()); }
  bool empty() const { return size() == 0; }

  NearestResult nearest(const Vec3& query) const;

 private:
  struct Node {
    int point = -1;
    int axis = 0;
    int left = -1;
    int right = -1;
  };

  int build(std::vector<int>& order, int lo, int hi);
  void search(int node, const Vec3& query, NearestResult& best) const;

  Mat points_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace meshdeform
