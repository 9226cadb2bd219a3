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

#include "doctest.h"
#include "meshdeform/kdtree.hpp"
#include "meshdeform/rng.hpp"
#include "test_util.hpp"

using namespace meshdeform;
using testutil::random_mat;

TEST_CASE("single point tree always answers that point") {
  Mat points(1, 3);
  points << 4, 5, 6;
  const KdTree tree(points);
  const NearestResult nn = tree.nearest(Vec3(0, 0, 0));
  CHECK(nn.index == 0);
  CHECK(nn.sq_dist == squared_distance(Vec3(4, 5, 6), Vec3(0, 0, 0)));
}

TEST_CASE("tree matches brute force bitwise on random clouds") {
  Rng rng(101);
  for (int size : {1, 2, 3, 7, 33, 128, 511}) {
    const Mat points = random_mat(rng, size, 3, -2.0, 2.0);
    const KdTree tree(points);
    REQUIRE(tree.size() == size);
    for (int q = 0; q < 60; ++q) {
      const Vec3 query(rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3));
      const NearestResult want = brute_force_nearest(points, query);
      const NearestResult got = tree.nearest(query);
      CHECK(got.index == want.index);
      CHECK(got.sq_dist == want.sq_dist);
    }
    // Querying the data points themselves must hit distance zero.
    for (int i = 0; i < std::min(size, 16); ++i) {
      const NearestResult self = tree.nearest(points.row(i).transpose());
      CHECK(self.sq_dist == 0.0);
      CHECK(points.row(self.index) == points.row(i));
    }
  }
}

TEST_CASE("equidistant candidates resolve to the lowest index") {
  // Queries at lattice midpoints are exactly equidistant to several points.
  Mat grid(27, 3);
  int row = 0;
  for (int x = 0; x < 3; ++x) {
    for (int y = 0; y < 3; ++y) {
      for (int z = 0; z < 3; ++z) grid.row(row++) << x, y, z;
    }
  }
  const KdTree tree(grid);
  Rng rng(7);
  for (int q = 0; q < 200; ++q) {
    const Vec3 query(0.5 + rng.below(2), 0.5 + rng.below(2), 0.5 + rng.below(2));
    const NearestResult want = brute_force_nearest(grid, query);
    const NearestResult got = tree.nearest(query);
    CHECK(got.index == want.index);
    CHECK(got.sq_dist == want.sq_dist);
  }
}

TEST_CASE("duplicate points report the first copy") {
  Mat points(5, 3);
  points << 1, 1, 1,
            0, 0, 0,
            1, 1, 1,
            1, 1, 1,
            2, 2, 2;
  const KdTree tree(points);
  const NearestResult nn = tree.nearest(Vec3(1.1, 1, 1));
  CHECK(nn.index == 0);
  CHECK(nn.index == brute_force_nearest(points, Vec3(1.1, 1, 1)).index);
}

TEST_CASE("degenerate geometry still matches brute force") {
  Rng rng(55);
  // All points on a line: splits collapse along one axis.
  Mat line(64, 3);
  for (int i = 0; i < 64; ++i) line.row(i) << rng.uniform(-1, 1), 0.25, -0.5;
  const KdTree tree(line);
  for (int q = 0; q < 50; ++q) {
    const Vec3 query(rng.uniform(-2, 2), rng.uniform(-1, 1), rng.uniform(-1, 1));
    const NearestResult want = brute_force_nearest(line, query);
    const NearestResult got = tree.nearest(query);
    CHECK(got.index == want.index);
    CHECK(got.sq_dist == want.sq_dist);
  }

  // Coincident cluster plus one outlier.
  Mat cluster(9, 3);
  for (int i = 0; i < 8; ++i) cluster.row(i) << 0, 0, 0;
  cluster.row(8) << 5, 5, 5;
  const KdTree cluster_tree(cluster);
  CHECK(cluster_tree.nearest(Vec3(1, 1, 1)).index == 0);
  CHECK(cluster_tree.nearest(Vec3(4, 4, 4)).index == 8);
}

TEST_CASE("an empty tree reports no neighbor") {
  const KdTree tree;
  CHECK(tree.empty());
  CHECK(tree.size() == 0);
}
