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

#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "meshdeform/primitives.hpp"
#include "meshdeform/sampling.hpp"
#include "test_util.hpp"

using namespace meshdeform;
using testutil::random_mat;

namespace {

// Unit right triangle in the z=0 plane.
TriMesh single_triangle() {
  TriMesh mesh;
  mesh.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)};
  mesh.faces = {{0, 1, 2}};
  return mesh;
}

// Unit square split along the diagonal, z = 0.
TriMesh unit_square() {
  TriMesh mesh;
  mesh.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0)};
  mesh.faces = {{0, 1, 2}, {0, 2, 3}};
  return mesh;
}

}  // namespace

TEST_CASE("samples carry consistent provenance") {
  const TriMesh mesh = make_uv_sphere(1.0, 6, 8);
  Rng rng(42);
  const SampleBatch batch = sample_surface(mesh, 500, rng);
  REQUIRE(batch.size() == 500);
  REQUIRE(batch.points.rows() == 500);
  REQUIRE(batch.weights.rows() == 500);
  for (int s = 0; s < batch.size(); ++s) {
    const int f = batch.face_index[s];
    REQUIRE(f >= 0);
    REQUIRE(f < mesh.face_count());
    // Weights are convex coordinates.
    double sum = 0.0;
    for (int i = 0; i < 3; ++i) {
      CHECK(batch.weights(s, i) >= 0.0);
      CHECK(batch.weights(s, i) <= 1.0);
      sum += batch.weights(s, i);
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    // The stored point is exactly the weighted combination of its face.
    const auto& face = mesh.faces[f];
    const Vec3 rebuilt = batch.weights(s, 0) * mesh.vertices[face[0]] +
                         batch.weights(s, 1) * mesh.vertices[face[1]] +
                         batch.weights(s, 2) * mesh.vertices[face[2]];
    CHECK((batch.points.row(s).transpose() - rebuilt).norm() <= 1e-12);
  }
}

TEST_CASE("sampling is deterministic per seed and decorrelated across streams") {
  const TriMesh mesh = make_box(1.0, 2.0, 0.5);
  Rng a(9), b(9), c(10);
  const SampleBatch first = sample_surface(mesh, 200, a);
  const SampleBatch second = sample_surface(mesh, 200, b);
  const SampleBatch other = sample_surface(mesh, 200, c);
  CHECK(first.points == second.points);
  CHECK(first.weights == second.weights);
  CHECK(first.face_index == second.face_index);
  CHECK(first.points != other.points);
}

TEST_CASE("zero-area faces are never selected") {
  TriMesh mesh = single_triangle();
  mesh.vertices.push_back(Vec3(2, 2, 0));
  mesh.vertices.push_back(Vec3(3, 3, 0));
  mesh.vertices.push_back(Vec3(4, 4, 0));
  mesh.faces.push_back({3, 4, 5});  // Collinear: zero area.
  Rng rng(5);
  const SampleBatch batch = sample_surface(mesh, 300, rng);
  for (int s = 0; s < batch.size(); ++s) CHECK(batch.face_index[s] == 0);
}

TEST_CASE("sampling requires positive total area") {
  TriMesh degenerate;
  degenerate.vertices = {Vec3(0, 0, 0), Vec3(1, 1, 1), Vec3(2, 2, 2)};
  degenerate.faces = {{0, 1, 2}};
  Rng rng(1);
  CHECK_THROWS_AS(sample_surface(degenerate, 10, rng), std::invalid_argument);
  CHECK_THROWS_AS(sample_surface(single_triangle(), -1, rng), std::invalid_argument);
}

TEST_CASE("face selection follows area: 3:1 split") {
  // Two faces with areas 1.5 and 0.5 (ratio 3:1).
  TriMesh mesh;
  mesh.vertices = {Vec3(0, 0, 0), Vec3(3, 0, 0), Vec3(0, 1, 0),
                   Vec3(5, 0, 0), Vec3(6, 0, 0), Vec3(5, 1, 0)};
  mesh.faces = {{0, 1, 2}, {3, 4, 5}};
  Rng rng(77);
  const int n = 40000;
  const SampleBatch batch = sample_surface(mesh, n, rng);
  int on_large = 0;
  for (int s = 0; s < n; ++s) on_large += batch.face_index[s] == 0 ? 1 : 0;
  const double frac = static_cast<double>(on_large) / n;
  CHECK(std::abs(frac - 0.75) < 0.015);
}

TEST_CASE("positions inside a face are uniform (chi-square on a square)") {
  const TriMesh mesh = unit_square();
  Rng rng(2026);
  const int n = 20000;
  const SampleBatch batch = sample_surface(mesh, n, rng);
  // 4x4 grid over the unit square; expected count is n/16 per cell.
  int counts[16] = {0};
  for (int s = 0; s < n; ++s) {
    const int cx = std::min(3, static_cast<int>(batch.points(s, 0) * 4.0));
    const int cy = std::min(3, static_cast<int>(batch.points(s, 1) * 4.0));
    ++counts[cy * 4 + cx];
  }
  const double expected = n / 16.0;
  double chi2 = 0.0;
  for (int c = 0; c < 16; ++c) {
    const double d = counts[c] - expected;
    chi2 += d * d / expected;
  }
  // 0.001 critical value for 15 degrees of freedom.
  CHECK(chi2 < 37.697);
}

TEST_CASE("propagate applies barycentric weights exactly") {
  const TriMesh mesh = single_triangle();
  SampleBatch batch;
  batch.points.resize(2, 3);
  batch.face_index = {0, 0};
  batch.weights.resize(2, 3);
  batch.weights.row(0) << 1.0 / 3, 1.0 / 3, 1.0 / 3;
  batch.weights.row(1) << 0.5, 0.25, 0.25;
  batch.points.setZero();

  Mat values(3, 2);
  values << 3, 0,
            0, 6,
            9, 12;
  const Mat out = propagate(batch, mesh, values);
  REQUIRE(out.rows() == 2);
  REQUIRE(out.cols() == 2);
  CHECK(out(0, 0) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(out(0, 1) == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(out(1, 0) == doctest::Approx(0.5 * 3 + 0.25 * 9).epsilon(1e-15));
  CHECK(out(1, 1) == doctest::Approx(0.25 * 6 + 0.25 * 12).epsilon(1e-15));
}

TEST_CASE("propagate is linear in the vertex values") {
  const TriMesh mesh = make_uv_sphere(1.0, 5, 7);
  Rng rng(4);
  const SampleBatch batch = sample_surface(mesh, 64, rng);
  const Mat x = random_mat(rng, mesh.vertex_count(), 3, -1, 1);
  const Mat y = random_mat(rng, mesh.vertex_count(), 3, -1, 1);
  const Mat lhs = propagate(batch, mesh, 2.0 * x + 3.0 * y);
  const Mat rhs = 2.0 * propagate(batch, mesh, x) + 3.0 * propagate(batch, mesh, y);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("propagate of vertex positions reproduces the sampled points") {
  const TriMesh mesh = make_torus(1.0, 0.3, 8, 6);
  Rng rng(13);
  const SampleBatch batch = sample_surface(mesh, 100, rng);
  Mat positions(mesh.vertex_count(), 3);
  for (int v = 0; v < mesh.vertex_count(); ++v) positions.row(v) = mesh.vertices[v].transpose();
  const Mat rebuilt = propagate(batch, mesh, positions);
  CHECK((rebuilt - batch.points).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("scatter_gradients distributes one sample by its weights") {
  TriMesh mesh = single_triangle();
  mesh.vertices.push_back(Vec3(5, 5, 5));  // Untouched vertex stays zero.
  SampleBatch batch;
  batch.points = Mat::Zero(1, 3);
  batch.face_index = {0};
  batch.weights.resize(1, 3);
  batch.weights << 0.5, 0.25, 0.25;
  Mat grads(1, 3);
  grads << 1, 2, 3;
  const Mat out = scatter_gradients(batch, mesh, grads);
  REQUIRE(out.rows() == 4);
  CHECK(out.row(0) == Eigen::RowVector3d(0.5, 1.0, 1.5));
  CHECK(out.row(1) == Eigen::RowVector3d(0.25, 0.5, 0.75));
  CHECK(out.row(2) == Eigen::RowVector3d(0.25, 0.5, 0.75));
  CHECK(out.row(3) == Eigen::RowVector3d(0, 0, 0));
}

TEST_CASE("scatter_gradients is the exact adjoint of propagate") {
  const TriMesh mesh = make_ellipsoid(1.0, 0.5, 2.0, 6, 9);
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const SampleBatch batch = sample_surface(mesh, 50 + trial * 13, rng);
    const Mat x = random_mat(rng, mesh.vertex_count(), 3, -2, 2);
    const Mat g = random_mat(rng, batch.size(), 3, -2, 2);
    const double forward = (propagate(batch, mesh, x).array() * g.array()).sum();
    const double adjoint = (x.array() * scatter_gradients(batch, mesh, g).array()).sum();
    CHECK(std::abs(forward - adjoint) <=
          1e-10 * std::max(1.0, std::max(std::abs(forward), std::abs(adjoint))));
  }
}

TEST_CASE("scatter_gradients matches finite differences of a frozen batch") {
  // With the batch frozen, s(V) = propagate(V) is linear, so central
  // differences recover the gradient of g . s(V) to near machine precision.
  const TriMesh mesh = make_box(1, 1, 1);
  Rng rng(31);
  const SampleBatch batch = sample_surface(mesh, 40, rng);
  const Mat g = random_mat(rng, batch.size(), 3, -1, 1);

  Mat v0(mesh.vertex_count(), 3);
  for (int v = 0; v < mesh.vertex_count(); ++v) v0.row(v) = mesh.vertices[v].transpose();

  const Mat analytic = scatter_gradients(batch, mesh, g);
  const Mat numeric = testutil::fd_gradient(
      [&](const Mat& v) { return (propagate(batch, mesh, v).array() * g.array()).sum(); }, v0,
      1e-5);
  CHECK(testutil::max_rel_diff(numeric, analytic) <= 1e-6);
}

TEST_CASE("propagate and scatter validate their inputs") {
  const TriMesh mesh = single_triangle();
  Rng rng(3);
  SampleBatch batch = sample_surface(mesh, 4, rng);
  CHECK_THROWS_AS(propagate(batch, mesh, Mat::Zero(2, 3)), std::invalid_argument);
  CHECK_THROWS_AS(scatter_gradients(batch, mesh, Mat::Zero(3, 3)), std::invalid_argument);
  batch.face_index[0] = 9;
  CHECK_THROWS_AS(propagate(batch, mesh, Mat::Zero(3, 3)), std::invalid_argument);
}

TEST_CASE("resize_cloud keeps the cloud when sizes already match") {
  PointCloud cloud;
  for (int i = 0; i < 8; ++i) cloud.points.push_back(Vec3(i, 2 * i, 3 * i));
  Rng rng(17);
  Rng untouched(17);
  const PointCloud out = resize_cloud(cloud, 8, rng);
  REQUIRE(out.size() == 8);
  for (int i = 0; i < 8; ++i) CHECK(out.points[i] == cloud.points[i]);
  // No generator state may be consumed on the identity path.
  CHECK(rng.next_u64() == untouched.next_u64());
}

TEST_CASE("resize_cloud shrinks by subset without replacement") {
  PointCloud cloud;
  for (int i = 0; i < 20; ++i) cloud.points.push_back(Vec3(i, 0, 0));
  Rng rng(23);
  const PointCloud out = resize_cloud(cloud, 12, rng);
  REQUIRE(out.size() == 12);
  std::vector<bool> seen(20, false);
  for (const Vec3& p : out.points) {
    const int id = static_cast<int>(p.x());
    REQUIRE(id >= 0);
    REQUIRE(id < 20);
    CHECK(p == cloud.points[static_cast<std::size_t>(id)]);
    CHECK_FALSE(seen[static_cast<std::size_t>(id)]);  // No duplicates.
    seen[static_cast<std::size_t>(id)] = true;
  }
}

TEST_CASE("resize_cloud grows by draws with replacement") {
  PointCloud cloud;
  cloud.points = {Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};
  Rng rng(29);
  const PointCloud out = resize_cloud(cloud, 50, rng);
  REQUIRE(out.size() == 50);
  bool used[3] = {false, false, false};
  for (const Vec3& p : out.points) {
    bool matched = false;
    for (int i = 0; i < 3; ++i) {
      if (p == cloud.points[static_cast<std::size_t>(i)]) {
        used[i] = true;
        matched = true;
      }
    }
    CHECK(matched);
  }
  // With 50 draws over 3 points, every point appears with overwhelming odds.
  CHECK(used[0]);
  CHECK(used[1]);
  CHECK(used[2]);
}

TEST_CASE("resize_cloud rejects empty input and nonpositive counts") {
  Rng rng(1);
  PointCloud empty;
  CHECK_THROWS_AS(resize_cloud(empty, 4, rng), std::invalid_argument);
  PointCloud one;
  one.points = {Vec3(0, 0, 0)};
  CHECK_THROWS_AS(resize_cloud(one, 0, rng), std::invalid_argument);
}
